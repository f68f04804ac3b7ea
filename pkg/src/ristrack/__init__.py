"""Beam tracking simulator for a binary-switching reflective surface
localized by two-anchor UWB ranging."""

from .geometry import (RisLayout, RisGeometry, PolarPoint, TrajectorySpec,
                       build_geometry, polar_to_cartesian, element_distances,
                       sample_trajectory)
from .channel import (CarrierSpec, ChannelVector, AntennaGains, EffectiveChannel,
                      cascaded_channel, effective_channel, magnitude_db)
from .optimizer import (ON_AMPLITUDE, PhaseSet, RisConfig, OffStateConfig,
                        ideal_phases, quantize_rd, amplitude, optimize,
                        predict_at, alignment_bound)
from .beamsplit import (SplitSpec, SubSurfacePartition, SplitConfig,
                        split_targets, partition, phase_match, optimize_split,
                        phase_grid)
from .uwb import (AnchorPair, RangingNoise, UwbEstimate, CorrectionState,
                  TriangulationError, simulate_ranging, triangulate,
                  correct_step, correct_stream, momentum_series,
                  calibrate_sigma, calibrate_bias,
                  DEFAULT_SIGMA_RANGE, DEFAULT_BIAS_RANGE)
from .sim import (Scenario, TraceRecord, run_tracking, run_sweep, summarize,
                  write_trace_csv, OFF_STATE)

__version__ = "0.1.0"
