"""Acceptance suite: one test per release criterion, tolerances pinned.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or on
failure) so the suite doubles as a release checklist. Run with:

    pytest tests/test_acceptance.py -v
"""

import statistics
import time

import numpy as np
import pytest

from safefpr import (
    DEFAULT_CAMERA_RIG,
    KinematicState,
    ModelParams,
    PredictorConfig,
    estimate_compute_ops,
    evaluate_scene,
    feasible_latency_scan,
    fraction_of_provisioned,
    generate_scenario,
    list_families,
    oracle_best_latency,
    predict_trajectories,
    required_fpr_cell,
    run_scenario,
    scenario_mrf,
    tolerable_latency,
)
from safefpr.oracle import feasible_latency_scan as scan
from safefpr.report import analyze_trace
from safefpr.types import MPH_TO_MPS, L0_FIXED

from conftest import corpus_params, random_case

DEFAULTS = ModelParams()


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f" ({detail})" if detail else ""))


def test_criterion_1_compute_demand_identity():
    """Two actors, one trajectory each: exactly 60 kilo-ops per tick."""
    got = estimate_compute_ops(2, 1, DEFAULTS)
    _report("criterion 1: compute-demand identity", got == 60_000, f"got {got}")
    assert got == 60_000


def _perf_scene():
    specs = [
        (30, 0, 14, 0.0), (55, 3.5, 16, 0.0), (80, -3.5, 18, 0.0),
        (20, 3.5, 15, 0.0), (15, -3.5, 13, 0.0), (120, 0, 20, 0.0),
        (-25, 0, 17, 0.0), (-40, 3.5, 19, 0.0), (45, 7, 12, -1.0),
        (65, -7, 22, 0.5), (100, 3.5, 10, -2.0), (35, -10.5, 8, 0.0),
    ]
    cfg = PredictorConfig(num_variants=5)
    return {
        f"a{i:02d}": predict_trajectories(
            KinematicState(float(x), float(y), float(v), float(a)), cfg
        )
        for i, (x, y, v, a) in enumerate(specs)
    }


def test_criterion_2_per_tick_latency_budget():
    """12 actors x 5 trajectories, all cameras: < 2 ms median, < 5 ms p99."""
    params = DEFAULTS.replace(l0_policy=L0_FIXED)
    ego = KinematicState(0.0, 0.0, 15.0)
    trajs = _perf_scene()
    evaluate_scene(ego, trajs, DEFAULT_CAMERA_RIG, 1 / 30, params)  # JIT warm-up

    samples = []
    for _ in range(500):
        t0 = time.perf_counter()
        evaluate_scene(ego, trajs, DEFAULT_CAMERA_RIG, 1 / 30, params)
        samples.append((time.perf_counter() - t0) * 1e3)
    samples.sort()
    median = statistics.median(samples)
    p99 = samples[int(len(samples) * 0.99) - 1]
    ok = median < 2.0 and p99 < 5.0
    _report("criterion 2: per-tick latency budget", ok, f"median {median:.3f} ms, p99 {p99:.3f} ms")
    assert median < 2.0
    assert p99 < 5.0


def test_criterion_3_fraction_arithmetic():
    """Peak-demand fractions over a 3-camera 30 Hz system, 2-decimal exact."""
    pairs = {32.0: 0.36, 11.0: 0.12, 3.0: 0.03, 9.0: 0.10}
    got = {total: fraction_of_provisioned(total, 3, DEFAULTS) for total in pairs}
    ok = all(got[t] == pytest.approx(want, abs=1e-12) for t, want in pairs.items())
    _report("criterion 3: fraction arithmetic", ok, f"{got}")
    for total, want in pairs.items():
        assert got[total] == pytest.approx(want, abs=1e-12)


def _sweep(separation: float):
    n = 26
    top = 80.0 * MPH_TO_MPS
    speeds = [top * i / (n - 1) for i in range(n)]
    return speeds, [
        [required_fpr_cell(ve, va, separation, DEFAULTS) for va in speeds] for ve in speeds
    ]


def test_criterion_4_sweep_qualitative_reproduction():
    """Street speeds need at most 2 Hz at a 30 m budget; at a 100 m budget
    every feasible highway-speed cell needs at most 5 Hz. 26x26 grid,
    0-80 mph, candidate-latency policy, < 10 s."""
    street_cap = 11.18  # 25 mph
    t0 = time.time()
    speeds, grid30 = _sweep(30.0)
    _, grid100 = _sweep(100.0)
    elapsed = time.time() - t0

    def finite(cell):
        return cell is not None and not np.isinf(cell)

    bad30 = [
        (ve, va, cell)
        for ve, row in zip(speeds, grid30)
        for va, cell in zip(speeds, row)
        if ve <= street_cap and finite(cell) and round(cell, 6) > 2.0
    ]
    bad100 = [
        (ve, va, cell)
        for ve, row in zip(speeds, grid100)
        for va, cell in zip(speeds, row)
        if ve >= street_cap and finite(cell) and round(cell, 6) > 5.0
    ]
    ok = not bad30 and not bad100 and elapsed < 10.0
    detail = f"{len(bad30)} street violations, {len(bad100)} highway violations, {elapsed:.1f}s"
    _report("criterion 4: sweep qualitative reproduction", ok, detail)
    assert elapsed < 10.0
    assert bad30 == []
    # Known model deviation: a handful of cells sit in the narrow band where
    # the braking distance almost exhausts the 100 m budget, so only
    # latencies below 0.2 s fit and the required rate lands above 5 Hz even
    # though the cell is feasible. See the sweep notes in the README.
    assert bad100 == [], f"feasible cells above 5 Hz at 100 m: {bad100}"


def test_criterion_5_search_conservatism_vs_oracle():
    """10,000 randomized cases: the fast search never beats the exhaustive
    scan, and every finite result re-passes the scan. Zero violations,
    < 60 s."""
    rng = np.random.default_rng(20240817)
    n = 10_000
    t0 = time.time()
    exceeds = 0
    rejected = 0
    finite = 0
    for i in range(n):
        ego, traj, l0 = random_case(rng)
        params = corpus_params(i)
        est = tolerable_latency(ego, traj, l0, params)
        if est.latency is None:
            continue
        finite += 1
        verdict = oracle_best_latency(ego, traj, l0, params)
        if verdict.best_latency is None or est.latency > verdict.best_latency + 1e-12:
            exceeds += 1
        if not scan(ego, traj, l0, est.latency, params):
            rejected += 1
    elapsed = time.time() - t0
    ok = exceeds == 0 and rejected == 0 and elapsed < 60.0
    detail = f"{finite} finite of {n}, {exceeds} exceed, {rejected} rejected, {elapsed:.1f}s"
    _report("criterion 5: search conservatism vs oracle", ok, detail)
    assert exceeds == 0
    assert rejected == 0
    assert elapsed < 60.0


def test_criterion_6_mrf_soundness_on_families():
    """For each of the nine families: the closed-loop minimum required rate
    never exceeds the model's maximum estimate, and running at the
    estimated rates produces no collision. < 5 min."""
    t0 = time.time()
    failures = []
    for family in list_families():
        script = generate_scenario(family)
        baseline = run_scenario(script, DEFAULTS, frame_rate=30.0)
        analysis = analyze_trace(baseline.trace, DEFAULTS)
        max_estimate = max(analysis.summary["max_fpr_per_camera"].values())
        mrf = scenario_mrf(script, DEFAULTS, collision_radius=0.5)
        adaptive = run_scenario(script, DEFAULTS, adaptive=True)
        if mrf is None:
            failures.append((family, "collides even at the maximum rate"))
        elif mrf > max_estimate:
            failures.append((family, f"mrf {mrf} > max estimate {max_estimate:.2f}"))
        if adaptive.collision is not None:
            failures.append((family, f"collision at estimated rates: {adaptive.collision}"))
    elapsed = time.time() - t0
    ok = not failures and elapsed < 300.0
    _report("criterion 6: MRF soundness on families", ok, f"{failures or 'all nine'}; {elapsed:.0f}s")
    assert failures == []
    assert elapsed < 300.0


def test_criterion_7_monotonicity_suite():
    """Required rate monotone in ego speed, anti-monotone in actor speed and
    separation; oracle feasibility monotone down the latency grid.
    >= 1000 cases per property, zero violations."""

    def rate_key(cell):
        if cell is None:
            return np.inf  # infeasible dominates any finite requirement
        return cell

    rng = np.random.default_rng(99)
    v_e_bad = v_a_bad = s_bad = grid_bad = 0

    for _ in range(1000):
        sn = rng.uniform(10.0, 150.0)
        va = rng.uniform(0.0, 35.0)
        v1, v2 = sorted(rng.uniform(0.0, 36.0, size=2))
        if rate_key(required_fpr_cell(v1, va, sn, DEFAULTS)) > rate_key(
            required_fpr_cell(v2, va, sn, DEFAULTS)
        ):
            v_e_bad += 1

    for _ in range(1000):
        sn = rng.uniform(10.0, 150.0)
        ve = rng.uniform(0.0, 36.0)
        a1, a2 = sorted(rng.uniform(0.0, 35.0, size=2))
        if rate_key(required_fpr_cell(ve, a2, sn, DEFAULTS)) > rate_key(
            required_fpr_cell(ve, a1, sn, DEFAULTS)
        ):
            v_a_bad += 1

    for _ in range(1000):
        ve = rng.uniform(0.0, 36.0)
        va = rng.uniform(0.0, 35.0)
        s1, s2 = sorted(rng.uniform(5.0, 200.0, size=2))
        if rate_key(required_fpr_cell(ve, va, s2, DEFAULTS)) > rate_key(
            required_fpr_cell(ve, va, s1, DEFAULTS)
        ):
            s_bad += 1

    checked = 0
    attempts = 0
    while checked < 1000 and attempts < 4000:
        attempts += 1
        ego, traj, l0 = random_case(rng)
        params = corpus_params(attempts)
        verdict = oracle_best_latency(ego, traj, l0, params)
        if verdict.best_latency is None:
            continue
        below = [l for l in params.latency_grid if l < verdict.best_latency]
        if not below:
            continue
        pick = below[int(rng.integers(0, len(below)))]
        if not feasible_latency_scan(ego, traj, l0, pick, params):
            grid_bad += 1
        checked += 1

    ok = v_e_bad == v_a_bad == s_bad == grid_bad == 0 and checked >= 1000
    detail = (
        f"ego-speed {v_e_bad}, actor-speed {v_a_bad}, separation {s_bad}, "
        f"latency-grid {grid_bad} violations ({checked} grid cases)"
    )
    _report("criterion 7: monotonicity suite", ok, detail)
    assert v_e_bad == 0
    assert v_a_bad == 0
    assert s_bad == 0
    assert grid_bad == 0
    assert checked >= 1000


def test_criterion_8_scheduler_conservation():
    """1000 randomized requirement/budget pairs: allocation within budget and
    bounds; the safety check passes on the allocator's own output whenever
    the budget covers the requirements."""
    from safefpr import Budget, allocate, safety_check

    rng = np.random.default_rng(2718)
    floor, cap = DEFAULTS.fpr_bounds()
    bad = 0
    for _ in range(1000):
        n = int(rng.integers(1, 8))
        # requirements live in the reportable range a camera can demand
        required = {f"c{i}": float(rng.uniform(0.0, cap)) for i in range(n)}
        budget = float(rng.uniform(0.5, 200.0))
        alloc = allocate(required, Budget(budget), DEFAULTS)
        fps = alloc.per_camera_fps
        if sum(fps.values()) > budget + 1e-6:
            bad += 1
        if any(v > cap + 1e-9 for v in fps.values()):
            bad += 1
        if budget >= n * floor and any(v < floor - 1e-9 for v in fps.values()):
            bad += 1
        clamped = {c: min(cap, max(floor, r)) for c, r in required.items()}
        if sum(clamped.values()) <= budget:
            if alloc.alarm is not None or safety_check(required, fps) is not None:
                bad += 1
    _report("criterion 8: scheduler conservation", bad == 0, f"{bad} violations")
    assert bad == 0


def test_criterion_9_cut_in_estimate_shape():
    """The front camera's peak requirement lands within 1 s of the scripted
    cut-in, and the side cameras stay at the maximum tolerable latency
    because nothing is beside the ego."""
    script = generate_scenario("cut_in")
    result = run_scenario(script, DEFAULTS, adaptive=True)
    series = [
        (t, reports["front_wide"].fpr)
        for (t, _), reports in zip(result.allocations, result.camera_log)
    ]
    peak = max(fpr for _, fpr in series)
    t_peak = min(t for t, fpr in series if fpr == peak)
    in_window = abs(t_peak - script.trigger_time) <= 1.0

    sides_max_latency = all(
        reports[cam].latency == DEFAULTS.latency_max
        for reports in result.camera_log
        for cam in ("left", "right")
    )
    ok = in_window and sides_max_latency
    detail = f"peak {peak:.1f} Hz at t={t_peak:.2f}s (trigger {script.trigger_time}s)"
    _report("criterion 9: cut-in estimate shape", ok, detail)
    assert in_window
    assert sides_max_latency
