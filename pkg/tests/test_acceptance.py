"""End-to-end checks tying the package to its numeric targets.

Each test prints a single ACCEPTANCE line with the measured numbers and
windows before asserting, so a full run doubles as a scorecard.
"""

import time

import numpy as np

from ristrack import (AnchorPair, PhaseSet, PolarPoint, RangingNoise,
                      SplitSpec, TrajectorySpec, alignment_bound,
                      build_geometry, cascaded_channel, correct_stream,
                      optimize, phase_grid, run_sweep, run_tracking,
                      simulate_ranging, triangulate)
from ristrack.channel import AntennaGains
from ristrack.geometry import RisLayout
from ristrack.optimizer import ON_AMPLITUDE, TWO_PI, _wrap
from ristrack.sim import OFF_STATE, Scenario
from ristrack.beamsplit import optimize_split
from ristrack.uwb import (DEFAULT_BIAS_RANGE, DEFAULT_SIGMA_RANGE,
                          UwbEstimate)


def _report(num, name, ok, detail):
    verdict = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {name}: {verdict} ({detail})")
    assert ok, f"{name}: {detail}"


def _method_mags(records, method):
    return np.array([r.magnitude_db for r in records if r.method == method])


def test_01_splitting_loss_about_1db_asm_2db_dsm():
    t0 = time.perf_counter()
    phases = PhaseSet(t_count=1)
    conv = run_tracking(Scenario(phases=phases))
    asm = run_tracking(Scenario(phases=phases, split=SplitSpec("ASM", 2.5, 2)))
    dsm = run_tracking(Scenario(phases=phases, split=SplitSpec("DSM", 0.1, 2)))
    gap_asm = _method_mags(conv, "conventional").mean() - _method_mags(asm, "ASM").mean()
    gap_dsm = _method_mags(conv, "conventional").mean() - _method_mags(dsm, "DSM").mean()
    elapsed = time.perf_counter() - t0
    ok = (0.5 <= gap_asm <= 1.5) and (1.25 <= gap_dsm <= 2.75) and elapsed < 10.0
    _report(1, "splitting loss", ok,
            f"conv-ASM {gap_asm:+.4f} dB in [0.5, 1.5], "
            f"conv-DSM {gap_dsm:+.4f} dB in [1.25, 2.75], {elapsed:.1f}s < 10s")


def test_02_nested_phase_sets_never_lose():
    runs = {t: _method_mags(run_tracking(Scenario(phases=PhaseSet(t_count=t))),
                            "conventional")
            for t in (1, 2, 4)}
    d12 = runs[2] - runs[1]
    d24 = runs[4] - runs[2]
    ok = bool(np.all(d12 >= 0.0) and np.all(d24 >= 0.0))
    _report(2, "nested phase sets monotone", ok,
            f"min(T2-T1) {d12.min():+.3e} dB, min(T4-T2) {d24.min():+.3e} dB, "
            f"both >= 0 exactly over {len(d12)} samples")


def test_03_phase_matched_dsm_recovers():
    t0 = time.perf_counter()
    phases = PhaseSet(t_count=4)
    conv = run_tracking(Scenario(phases=phases))
    dsm = run_tracking(Scenario(phases=phases,
                                split=SplitSpec("DSM", 0.1, 2, "exhaustive")))
    conv_m = _method_mags(conv, "conventional")
    dsm_m = _method_mags(dsm, "DSM")
    gap = conv_m.mean() - dsm_m.mean()
    surpass = int(np.sum(dsm_m > conv_m))
    elapsed = time.perf_counter() - t0
    ok = gap <= 0.5 and surpass >= 1 and elapsed < 30.0
    _report(3, "matched DSM recovery", ok,
            f"mean gap {gap:+.4f} dB <= 0.5, surpasses at {surpass}/{len(conv_m)} "
            f"samples >= 1, {elapsed:.1f}s < 30s")


def test_04_phase_grid_structure():
    geom = build_geometry()
    tx = PolarPoint(2.0, -30.0)
    est = PolarPoint(2.0, -10.0)
    phases = PhaseSet(t_count=8)
    asm = phase_grid(geom, tx, est, SplitSpec("ASM", 2.5, 2), phases=phases)
    dsm = phase_grid(geom, tx, est, SplitSpec("DSM", 0.1, 2), phases=phases)
    r, c = np.unravel_index(np.argmax(asm), asm.shape)
    diag_dist = abs(int(r) - int(c))
    spread_asm = float(np.ptp(asm))
    spread_dsm = float(np.ptp(dsm))
    ok = diag_dist <= 1 and spread_dsm < spread_asm
    _report(4, "grid structure", ok,
            f"ASM argmax ({r}, {c}) diag distance {diag_dist} <= 1, "
            f"worst-combo drop DSM {spread_dsm:.2f} dB < ASM {spread_asm:.2f} dB")


def test_05_correction_fixed_point_and_equivariance():
    rng = np.random.default_rng(42)
    base_d = 2.0 + 0.05 * rng.standard_normal(40)
    base_a = 20.0 + 1.5 * rng.standard_normal(40)
    worst_fix = 0.0
    for beta in (0.0, 0.3, 0.55, 1.0):
        const = [UwbEstimate(2.25, 25.0, 0.1 * k, k) for k in range(1, 21)]
        out = correct_stream(const, beta_d=beta, beta_nu=beta)
        worst_fix = max(worst_fix,
                        max(abs(o.distance - 2.25) for o in out),
                        max(abs(o.angle - 25.0) for o in out))
    # shift/scale the same stream and compare transformed outputs
    worst_eq = 0.0
    for a, b in ((2.0, 0.5), (0.25, 1.0), (3.0, 0.0)):
        raw = [UwbEstimate(d, ang, 0.1 * k, k)
               for k, (d, ang) in enumerate(zip(base_d, base_a), start=1)]
        tf = [UwbEstimate(a * d + b, a * ang + b, 0.1 * k, k)
              for k, (d, ang) in enumerate(zip(base_d, base_a), start=1)]
        out_raw = correct_stream(raw, beta_d=0.3, beta_nu=0.55)
        out_tf = correct_stream(tf, beta_d=0.3, beta_nu=0.55)
        for u, v in zip(out_raw, out_tf):
            worst_eq = max(worst_eq, abs(v.distance - (a * u.distance + b)),
                           abs(v.angle - (a * u.angle + b)))
    ok = worst_fix == 0.0 and worst_eq <= 1e-9
    _report(5, "filter fixed point and equivariance", ok,
            f"fixed-point residual {worst_fix:.1e} == 0, "
            f"equivariance residual {worst_eq:.1e} <= 1e-9")


def test_06_correction_range_reduction():
    pos = PolarPoint(2.25, 25.0)
    anchors = AnchorPair()
    red_d, red_a = [], []
    for seed in range(50):
        noise = RangingNoise(sigma_range=DEFAULT_SIGMA_RANGE, seed=seed)
        rng = noise.make_rng()
        samples = []
        for k in range(1, 501):
            r1, r2 = simulate_ranging(pos, anchors, noise, rng)
            samples.append(triangulate(r1, r2, anchors, timestamp=0.1 * k,
                                       sample_index=k))
        corrected = correct_stream(samples, beta_d=0.3, beta_nu=0.55)
        raw_d = np.array([s.distance for s in samples])
        raw_a = np.array([s.angle for s in samples])
        cor_d = np.array([c.distance for c in corrected])
        cor_a = np.array([c.angle for c in corrected])
        red_d.append(100.0 * (1.0 - np.ptp(cor_d) / np.ptp(raw_d)))
        red_a.append(100.0 * (1.0 - np.ptp(cor_a) / np.ptp(raw_a)))
    med_d = float(np.median(red_d))
    med_a = float(np.median(red_a))
    ok = (51.0 <= med_d <= 81.0) and (30.0 <= med_a <= 60.0)
    _report(6, "correction range reduction", ok,
            f"median distance shrink {med_d:.1f}% in [51, 81], "
            f"median angle shrink {med_a:.1f}% in [30, 60], 50 seeds x 500 samples")


def test_07_sweep_peaks_at_receiver_with_nearby_minima():
    scenario = Scenario(trajectory=TrajectorySpec(start=PolarPoint(2.25, 25.0)),
                        phases=PhaseSet(t_count=8))
    angles = np.arange(-90.0, 91.0, 1.0)
    records = run_sweep(scenario, list(angles), fixed_distance=2.25)
    mags = np.array([r.magnitude_db for r in records])
    peak = float(angles[int(np.argmax(mags))])
    interior = np.arange(1, len(angles) - 1)
    is_min = (mags[interior] < mags[interior - 1]) & (mags[interior] < mags[interior + 1])
    min_angles = angles[interior][is_min]
    offs = min_angles - peak
    left = offs[(offs <= -2.0) & (offs >= -8.0)]
    right = offs[(offs >= 2.0) & (offs <= 8.0)]
    # nearest local minimum on each side must not hug the peak
    near = offs[np.abs(offs) <= 8.0]
    hugging = near[np.abs(near) < 2.0]
    ok = (abs(peak - 25.0) <= 1.0 and len(left) >= 1 and len(right) >= 1
          and len(hugging) == 0)
    _report(7, "sweep peak and sidelobe dips", ok,
            f"peak {peak:.0f} deg within 25 +- 1, nearest dips at "
            f"{left.max() if len(left) else float('nan'):+.0f} and "
            f"{right.min() if len(right) else float('nan'):+.0f} deg offsets, "
            f"both inside [2, 8] deg")


def test_08_split_plus_correction_beats_conventional_worst_case():
    t0 = time.perf_counter()
    wins = 0
    below = 0
    seeds = 50
    for seed in range(seeds):
        conv = run_tracking(Scenario(
            noise=RangingNoise(sigma_range=DEFAULT_SIGMA_RANGE,
                               bias_range=DEFAULT_BIAS_RANGE, seed=seed)))
        asm = run_tracking(Scenario(
            noise=RangingNoise(sigma_range=DEFAULT_SIGMA_RANGE,
                               bias_range=DEFAULT_BIAS_RANGE, seed=seed),
            split=SplitSpec("ASM", 7.0, 5),
            correction=(0.3, 0.55)))
        conv_m = _method_mags(conv, "conventional")
        asm_m = _method_mags(asm, "ASM")
        off_m = _method_mags(conv, OFF_STATE)
        if asm_m.min() > conv_m.min():
            wins += 1
        if np.any(conv_m < off_m):
            below += 1
    elapsed = time.perf_counter() - t0
    ok = wins >= 48 and below >= 25
    _report(8, "worst-case improvement", ok,
            f"split+correction wins worst case {wins}/{seeds} >= 48, "
            f"conventional dips below off-state in {below}/{seeds} seeds >= 25, "
            f"{elapsed:.0f}s")


def test_09_toy_surface_matches_enumeration_and_bound():
    layout = RisLayout(modules_x=1, modules_y=1, elems_per_module_x=3,
                       elems_per_module_y=4, module_width=0.0675,
                       module_height=0.0617)
    geom = build_geometry(layout)
    tx = PolarPoint(2.0, -30.0)
    target = PolarPoint(2.25, 25.0)
    gains = AntennaGains()
    phases = PhaseSet(t_count=8)
    config = optimize(geom, tx, target, phases=phases, gains=gains)
    chan = cascaded_channel(geom, tx, target)

    # independent sweep of every candidate rule phase
    best = -np.inf
    for c in phases.values:
        shifted = _wrap(c - np.angle(chan.coefficients))
        states = (shifted >= np.pi / 2) & (shifted < 3 * np.pi / 2)
        refl = np.where(states, -ON_AMPLITUDE + 0.0j, 1.0 + 0.0j)
        val = gains.amplitude_factor() * abs(np.sum(chan.coefficients * refl))
        best = max(best, val)
    got = abs(config.predicted.value)
    rel_enum = abs(got - best) / best

    bound = abs(alignment_bound(geom, tx, target, gains=gains).value)
    direct = gains.amplitude_factor() * np.sum(np.abs(chan.coefficients))
    rel_bound = abs(bound - direct) / direct
    ok = rel_enum <= 1e-9 and rel_bound <= 1e-9 and got <= bound * (1 + 1e-12)
    _report(9, "toy-surface oracle equivalence", ok,
            f"optimizer vs rule enumeration rel err {rel_enum:.1e} <= 1e-9, "
            f"continuous bound identity rel err {rel_bound:.1e} <= 1e-9, "
            f"12 elements, T=8")


def test_10_exhaustive_matching_is_fast():
    geom = build_geometry()
    tx = PolarPoint(2.0, -30.0)
    est = PolarPoint(2.0, -10.0)
    spec = SplitSpec("DSM", 0.1, 5, "exhaustive")
    phases = PhaseSet(t_count=8)
    optimize_split(geom, tx, est, spec, phases=phases)  # warm caches
    t0 = time.perf_counter()
    config = optimize_split(geom, tx, est, spec, phases=phases)
    elapsed = time.perf_counter() - t0
    combos = len(phases.values) ** 5
    ok = elapsed < 1.0 and len(config.chosen_phases) == 5
    _report(10, "exhaustive matching speed", ok,
            f"P=5, T=8, {geom.element_count} elements, {combos} combinations "
            f"in {elapsed:.3f}s < 1s")
