"""Multi-beam configurations around an uncertain position estimate.

The surface is cut along its horizontal axis into side-by-side
sections of whole element columns. Each section is optimized toward
its own target, offset from the estimate either in angle (ASM) or in
distance (DSM), which widens the covered region at the cost of peak
magnitude. The per-section candidate phases are then matched so the
partial beams add up constructively at the estimate itself.
"""

import numpy as np
from dataclasses import dataclass

from .channel import AntennaGains, CarrierSpec, EffectiveChannel, cascaded_channel
from .geometry import PolarPoint
from .optimizer import ON_AMPLITUDE, PhaseSet, RisConfig, candidate_states, ideal_phases

METHODS = ("ASM", "DSM")
MATCHING_MODES = ("exhaustive", "same-phase", "independent")

# refuse exhaustive searches whose combination grid would not fit in
# memory; partial sums keep cost at T^P complex additions
MAX_COMBINATIONS = 2 ** 24


@dataclass(frozen=True)
class SplitSpec:
    """How to split: method, splitting factor (degrees for ASM, meters
    for DSM), beam count P and the phase matching mode. Matching mode
    None picks the method default (exhaustive for DSM, same-phase for
    ASM, where equal phases are already near-optimal)."""

    method: str
    factor: float
    beam_count: int = 2
    phase_matching: str = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.factor < 0:
            raise ValueError("factor must be nonnegative")
        if int(self.beam_count) != self.beam_count or self.beam_count < 1:
            raise ValueError("beam_count must be a positive integer")
        if self.phase_matching is not None and self.phase_matching not in MATCHING_MODES:
            raise ValueError(f"phase_matching must be one of {MATCHING_MODES}")

    def resolved_matching(self):
        if self.phase_matching is not None:
            return self.phase_matching
        return "exhaustive" if self.method == "DSM" else "same-phase"


@dataclass(frozen=True)
class SubSurfacePartition:
    """Disjoint, exhaustive element index sets, one per section."""

    element_index_sets: tuple


@dataclass
class SplitConfig:
    """Combined multi-beam configuration plus its per-beam parts."""

    per_beam_configs: list
    chosen_phases: list
    combined: RisConfig


def split_targets(estimate, spec):
    """Targets for each beam: the split coordinate takes P evenly
    spaced offsets spanning [-factor/2, +factor/2] (just the estimate
    for P = 1), the other coordinate is unchanged."""
    if spec.beam_count == 1:
        offsets = np.array([0.0])
    else:
        offsets = np.linspace(-spec.factor / 2.0, spec.factor / 2.0, spec.beam_count)
    out = []
    for o in offsets:
        if spec.method == "ASM":
            out.append(PolarPoint(estimate.distance, estimate.angle + o, estimate.height))
        else:
            out.append(PolarPoint(estimate.distance + o, estimate.angle, estimate.height))
    return out


def partition(geom, beam_count):
    """Split the surface along the horizontal axis into ``beam_count``
    sections of whole element columns, left to right.

    Section sizes differ by at most one column; the leftover columns go
    to the leftmost sections. Splitting this way keeps each section the
    full surface height, so the sections stay wide-angle horizontally,
    which is what lets slightly offset beams still cover the estimate.
    """
    xs = geom.element_positions[:, 0]
    col_values = np.sort(np.unique(xs))
    n_cols = len(col_values)
    if not 1 <= beam_count <= n_cols:
        raise ValueError(f"beam_count must be between 1 and {n_cols} element columns")
    base, extra = divmod(n_cols, beam_count)
    sizes = [base + 1 if i < extra else base for i in range(beam_count)]
    rank = {v: i for i, v in enumerate(col_values)}
    col_of = np.array([rank[v] for v in xs])
    sets = []
    start = 0
    for s in sizes:
        sets.append(np.where((col_of >= start) & (col_of < start + s))[0])
        start += s
    return SubSurfacePartition(tuple(sets))


def phase_match(partial_sums, mode, tie_break="lexicographic"):
    """Pick one candidate index per beam from partial sums at the
    estimate.

    ``partial_sums`` is a (P, T) complex array, entry (i, t) being the
    section-i contribution under candidate phase t evaluated at the
    estimate. Exhaustive mode maximizes |sum_i S[i, t_i]| over all T^P
    combinations, same-phase constrains all t_i equal, independent
    maximizes each |S[i, t]| alone. Ties resolve to the smallest index
    tuple in lexicographic order.
    """
    S = np.asarray(partial_sums, dtype=complex)
    if S.ndim != 2 or S.size == 0:
        raise ValueError("partial_sums must be a nonempty (P, T) array")
    n_beams, n_phases = S.shape
    if mode == "same-phase":
        t = int(np.argmax(np.abs(S.sum(axis=0))))
        return [t] * n_beams
    if mode == "independent":
        return [int(np.argmax(np.abs(S[i]))) for i in range(n_beams)]
    if mode != "exhaustive":
        raise ValueError(f"unknown phase matching mode {mode!r}")
    if n_phases ** n_beams > MAX_COMBINATIONS:
        raise ValueError("combination grid too large for exhaustive matching")
    acc = np.zeros((n_phases,) * n_beams, dtype=complex)
    for i in range(n_beams):
        shape = [1] * n_beams
        shape[i] = n_phases
        acc = acc + S[i].reshape(shape)
    # np.argmax on the flattened C-ordered grid returns the first and
    # therefore lexicographically smallest maximizing tuple
    flat = int(np.argmax(np.abs(acc)))
    return [int(t) for t in np.unravel_index(flat, acc.shape)]


def optimize_split(geom, tx, estimate, spec, carrier=None, phases=None, gains=None):
    """Optimize each section toward its target and phase match.

    Section i (left to right) is paired with target i (ascending
    offset). Candidate scoring for matching happens at the estimate:
    partial sums use the cascaded channel of the estimate point even
    though each section's switch pattern is computed for its target.
    """
    if carrier is None:
        carrier = CarrierSpec()
    if phases is None:
        phases = PhaseSet()
    if gains is None:
        gains = AntennaGains()

    targets = split_targets(estimate, spec)
    sections = partition(geom, spec.beam_count).element_index_sets
    chan_est = cascaded_channel(geom, tx, estimate, carrier).coefficients
    phi_all = [ideal_phases(_restrict(geom, idx), tx, tgt, carrier)
               for idx, tgt in zip(sections, targets)]

    scale = gains.amplitude_factor()
    n_phases = len(phases.values)
    states_per_section = []
    partial = np.zeros((spec.beam_count, n_phases), dtype=complex)
    for i, idx in enumerate(sections):
        st = candidate_states(phi_all[i], phases.values)
        states_per_section.append(st)
        coeffs = np.where(st, -ON_AMPLITUDE + 0j, 1.0 + 0j)
        partial[i] = np.sum(coeffs * chan_est[idx][None, :], axis=1)

    chosen = phase_match(partial, spec.resolved_matching())

    per_beam = []
    full_states = np.zeros(geom.element_count, dtype=bool)
    for i, idx in enumerate(sections):
        st = states_per_section[i][chosen[i]]
        full_states[idx] = st
        per_beam.append(RisConfig(
            st, float(phases.values[chosen[i]]),
            EffectiveChannel.from_value(scale * partial[i, chosen[i]])))
    combined_value = scale * sum(partial[i, chosen[i]] for i in range(spec.beam_count))
    combined = RisConfig(full_states, per_beam[0].chosen_phase,
                         EffectiveChannel.from_value(combined_value))
    return SplitConfig(per_beam, [c.chosen_phase for c in per_beam], combined)


def phase_grid(geom, tx, estimate, spec, carrier=None, phases=None, gains=None):
    """Magnitude (dB) at the estimate for every candidate combination
    of a two-beam split.

    Returns a (T, T) array: rows index the positive-offset beam's
    candidate phase, columns the negative-offset beam's. The diagonal
    holds the same-phase combinations.
    """
    if spec.beam_count != 2:
        raise ValueError("phase grids are defined for beam_count = 2")
    if carrier is None:
        carrier = CarrierSpec()
    if phases is None:
        phases = PhaseSet()
    if gains is None:
        gains = AntennaGains()
    from .channel import magnitude_db

    targets = split_targets(estimate, spec)
    sections = partition(geom, 2).element_index_sets
    chan_est = cascaded_channel(geom, tx, estimate, carrier).coefficients
    partial = np.zeros((2, len(phases.values)), dtype=complex)
    for i, (idx, tgt) in enumerate(zip(sections, targets)):
        phi = ideal_phases(_restrict(geom, idx), tx, tgt, carrier)
        st = candidate_states(phi, phases.values)
        coeffs = np.where(st, -ON_AMPLITUDE + 0j, 1.0 + 0j)
        partial[i] = np.sum(coeffs * chan_est[idx][None, :], axis=1)
    scale = gains.amplitude_factor()
    # beam 1 carries the + offset, beam 0 the - offset
    grid = scale * (partial[1][:, None] + partial[0][None, :])
    return np.vectorize(magnitude_db)(grid)


class _SectionView:
    """Lightweight geometry view over a subset of elements."""

    def __init__(self, positions):
        self.element_positions = positions
        self.element_count = positions.shape[0]


def _restrict(geom, index_set):
    return _SectionView(geom.element_positions[index_set])
