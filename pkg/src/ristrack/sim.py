"""Scenario orchestration: tracking runs, angle sweeps and summaries.

The central separation: configurations are optimized toward the
position *estimate* (possibly noisy, possibly corrected) while the
channel is always evaluated at the *true* receiver position. Every
tracking run also carries the off-state baseline, the same surface
with every element neutral, which is what the receiver would get from
a plain reflective plate.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import beamsplit, optimizer, uwb
from .channel import AntennaGains, CarrierSpec, effective_channel, cascaded_channel
from .geometry import (PolarPoint, RisLayout, TrajectorySpec, build_geometry,
                       sample_trajectory)
from .optimizer import OffStateConfig, PhaseSet
from .uwb import AnchorPair, RangingNoise, TriangulationError, UwbEstimate

OFF_STATE = "off-state"

TRACE_COLUMNS = ("time_s", "true_d_m", "true_nu_deg", "est_d_m", "est_nu_deg",
                 "corr_d_m", "corr_nu_deg", "method", "mag_db", "predicted_db",
                 "skipped")


def _default_tx():
    return PolarPoint(2.0, -30.0)


def _default_trajectory():
    return TrajectorySpec(start=PolarPoint(2.0, -10.0))


@dataclass
class Scenario:
    """Everything a run needs. ``split`` None means the conventional
    single-beam method; ``noise`` None means perfect estimates;
    ``correction`` is None (off) or a (beta_d, beta_nu) pair."""

    layout: RisLayout = field(default_factory=RisLayout)
    carrier: CarrierSpec = field(default_factory=CarrierSpec)
    gains: AntennaGains = field(default_factory=AntennaGains)
    tx: PolarPoint = field(default_factory=_default_tx)
    trajectory: TrajectorySpec = field(default_factory=_default_trajectory)
    split: object = None
    phases: PhaseSet = field(default_factory=PhaseSet)
    anchors: AnchorPair = field(default_factory=AnchorPair)
    noise: RangingNoise = None
    correction: tuple = None

    def method_label(self):
        return "conventional" if self.split is None else self.split.method


@dataclass
class TraceRecord:
    time: float
    true_pos: PolarPoint
    estimate: UwbEstimate
    corrected: UwbEstimate
    method: str
    magnitude_db: float
    predicted_db: float
    skipped: bool = False


def _estimate_stream(scenario, samples):
    """Per-sample raw estimates; None where triangulation failed."""
    if scenario.noise is None:
        return [UwbEstimate(p.distance, p.angle, t, k + 1)
                for k, (t, p) in enumerate(samples)]
    rng = scenario.noise.make_rng()
    out = []
    for k, (t, p) in enumerate(samples):
        r1, r2 = uwb.simulate_ranging(p, scenario.anchors, scenario.noise, rng)
        try:
            est = uwb.triangulate(r1, r2, scenario.anchors, t, k + 1)
        except TriangulationError:
            est = None
        out.append(est)
    return out


def run_tracking(scenario):
    """Track the trajectory, optimizing toward each sample's estimate.

    Returns records for the scenario's method followed by the same
    number of off-state baseline records. Samples whose estimate could
    not be triangulated are flagged and reuse the previous config (an
    all-neutral surface if there is none yet); the correction filter
    only advances on samples that produced an estimate.
    """
    geom = build_geometry(scenario.layout)
    samples = sample_trajectory(scenario.trajectory)
    estimates = _estimate_stream(scenario, samples)

    state_d = state_a = None
    if scenario.correction is not None:
        beta_d, beta_nu = scenario.correction
        state_d = uwb.CorrectionState(beta=beta_d)
        state_a = uwb.CorrectionState(beta=beta_nu)

    label = scenario.method_label()
    records = []
    off_records = []
    config = None
    off_config = OffStateConfig(geom.element_count)
    for (t, true_pos), est in zip(samples, estimates):
        corrected = None
        if est is not None and scenario.correction is not None:
            d_corr, state_d = uwb.correct_step(state_d, est.distance)
            a_corr, state_a = uwb.correct_step(state_a, est.angle)
            corrected = UwbEstimate(d_corr, a_corr, est.timestamp, est.sample_index)

        skipped = est is None
        if not skipped:
            target_est = corrected if corrected is not None else est
            target = PolarPoint(target_est.distance, target_est.angle,
                                scenario.trajectory.start.height)
            if scenario.split is None:
                config = optimizer.optimize(geom, scenario.tx, target,
                                            scenario.carrier, scenario.phases,
                                            scenario.gains)
            else:
                config = beamsplit.optimize_split(geom, scenario.tx, target,
                                                  scenario.split, scenario.carrier,
                                                  scenario.phases,
                                                  scenario.gains).combined

        chan_true = cascaded_channel(geom, scenario.tx, true_pos, scenario.carrier)
        active = config if config is not None else off_config
        mag = effective_channel(chan_true, active, scenario.gains).magnitude_db
        predicted = config.predicted.magnitude_db if config is not None else math.nan
        records.append(TraceRecord(t, true_pos, est, corrected, label,
                                   mag, predicted, skipped))

        off_mag = effective_channel(chan_true, off_config, scenario.gains).magnitude_db
        off_records.append(TraceRecord(t, true_pos, est, None, OFF_STATE,
                                       off_mag, math.nan, skipped))
    return records + off_records


def run_sweep(scenario, angles, fixed_distance=2.25):
    """Optimize toward (fixed_distance, angle) for each angle with the
    receiver parked at the trajectory start; no noise, no splitting.

    Angles at the +-90 degree domain edge are nudged inward by a hair
    so a full [-90, 90] sweep stays valid.
    """
    geom = build_geometry(scenario.layout)
    true_pos = scenario.trajectory.start
    chan_true = cascaded_channel(geom, scenario.tx, true_pos, scenario.carrier)
    limit = 90.0 - 1e-9
    records = []
    for a in angles:
        a_t = min(max(float(a), -limit), limit)
        target = PolarPoint(fixed_distance, a_t)
        config = optimizer.optimize(geom, scenario.tx, target, scenario.carrier,
                                    scenario.phases, scenario.gains)
        mag = effective_channel(chan_true, config, scenario.gains).magnitude_db
        est = UwbEstimate(fixed_distance, a_t)
        records.append(TraceRecord(0.0, true_pos, est, None, "conventional",
                                   mag, config.predicted.magnitude_db))
    return records


def summarize(records, baseline=OFF_STATE):
    """Per-method statistics over a record list.

    Reports mean and worst-case magnitude, sample and skip counts, the
    mean gap to the named baseline method (when present) and, when
    off-state records are present, the fraction of samples falling
    below the off-state level at the same instant.
    """
    if not records:
        raise ValueError("no records to summarize")
    by_method = {}
    for r in records:
        by_method.setdefault(r.method, []).append(r)

    base = by_method.get(baseline)
    off = by_method.get(OFF_STATE)
    out = {}
    for method, recs in by_method.items():
        mags = np.array([r.magnitude_db for r in recs])
        entry = {
            "mean_db": float(mags.mean()),
            "worst_db": float(mags.min()),
            "samples": len(recs),
            "skipped": sum(1 for r in recs if r.skipped),
        }
        if base is not None and method != baseline and len(base) == len(recs):
            entry["gap_to_%s_db" % baseline.replace("-", "_")] = float(
                mags.mean() - np.mean([r.magnitude_db for r in base]))
        if off is not None and method != OFF_STATE and len(off) == len(recs):
            below = sum(1 for r, o in zip(recs, off) if r.magnitude_db < o.magnitude_db)
            entry["frac_below_off_state"] = below / len(recs)
        out[method] = entry
    return out


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return ""
    return repr(float(x))


def write_trace_csv(records, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for r in records:
            w.writerow([
                _fmt(r.time),
                _fmt(r.true_pos.distance),
                _fmt(r.true_pos.angle),
                _fmt(r.estimate.distance if r.estimate else None),
                _fmt(r.estimate.angle if r.estimate else None),
                _fmt(r.corrected.distance if r.corrected else None),
                _fmt(r.corrected.angle if r.corrected else None),
                r.method,
                _fmt(r.magnitude_db),
                _fmt(r.predicted_db),
                "1" if r.skipped else "0",
            ])
