"""Acceptance criteria at their pinned tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py`` (several minutes: it
simulates 200 fifteen-agent swarms).
"""
import math
import statistics
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE
from gathersim.analysis import (check_rate_bound, connectivity_audit, default_step_tol,
                                gathering_time_bound, mu_bound, rate_tolerance)
from gathersim.dynamics import CONNECTIVITY_VIOLATION, simulate
from gathersim.polygon_bounds import (STEP_AVERAGE, brute_force_min, descent_run,
                                      random_angle_config, theorem1_bound)
from gathersim.scenario_io import (chord_lengths, gen_cone_near_minimum,
                                   gen_random_connected, gen_regular_polygon)
from gathersim.sensing import PI_BAND, extremal_sweep, extremal_weights

N, V, V0, DT = 15, 200.0, 1.0, 0.05
SEEDS = range(100)
TOL_STEP = default_step_tol(V0, DT, V)


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, f"criterion {n}: {detail}"


def _survey(law):
    out = []
    for seed in SEEDS:
        s = gen_random_connected(N, V, seed=seed, v0=V0, dt=DT, speed_law=law)
        out.append(simulate(s, record_trajectory=False))
    return out


@pytest.fixture(scope="module")
def cg_runs():
    return _survey("constant-gain")


@pytest.fixture(scope="module")
def cs_runs():
    return _survey("constant-speed")


@pytest.fixture(scope="module")
def ten_gon_literal():
    s = gen_regular_polygon(10, 323.61, visibility=V, v0=V0)
    return s, simulate(s, allow_disconnected=True, record_trajectory=False)


@pytest.fixture(scope="module")
def ten_gon_320():
    return simulate(gen_regular_polygon(10, 320.0, visibility=V, v0=V0),
                    record_trajectory=False)


@pytest.fixture(scope="module")
def cone_run():
    return simulate(gen_cone_near_minimum(4, 1e-3), record_trajectory=False)


def test_criterion_01_bound_values():
    checks = [
        theorem1_bound(3) == pytest.approx(1.0, abs=1e-12),
        theorem1_bound(4) == pytest.approx(-0.5, abs=1e-12),
        abs(theorem1_bound(7) + 4.36) <= 0.005,
        abs(theorem1_bound(10) + 8.09) <= 0.005,
        abs(theorem1_bound(30) + 29.34) <= 0.005,
        abs(mu_bound(2, V0) - 8 * V0) <= 1e-12,
        abs(mu_bound(3, V0) - 8 * V0) <= 1e-12,
        abs(mu_bound(4, V0) - 7 * V0) <= 1e-12,
    ]
    record(1, all(checks), f"{sum(checks)}/{len(checks)} values; "
           f"C_7={theorem1_bound(7):.4f} C_10={theorem1_bound(10):.4f} "
           f"C_30={theorem1_bound(30):.4f}")


def test_criterion_02_oracle_equivalence():
    t0 = time.perf_counter()
    gaps = {n: brute_force_min(n, 0.01).value - theorem1_bound(n) for n in range(3, 8)}
    elapsed = time.perf_counter() - t0
    worst = max(abs(g) for g in gaps.values())
    record(2, worst <= 0.05 and elapsed < 300,
           f"max |gap| {worst:.2e} over n=3..7 in {elapsed:.1f}s")


def test_criterion_03_connectivity(cg_runs):
    viol = [len(connectivity_audit(r.ledger, TOL_STEP)) for r in cg_runs]
    worst = max(r.ledger.max_slack for r in cg_runs)
    record(3, sum(viol) == 0,
           f"{sum(viol)} violations over {len(cg_runs)} runs, tol_step={TOL_STEP:.3g}, "
           f"largest one-step increase {worst:.3g}")


def test_criterion_04_gathering(cg_runs):
    ratios = [r.t_gathered / gathering_time_bound(r.L0, N, V0) if r.gathered else math.inf
              for r in cg_runs]
    ok = all(q <= 1.05 for q in ratios)
    record(4, ok, f"{sum(r.gathered for r in cg_runs)}/{len(cg_runs)} gathered, "
           f"max t/T_ub = {max(ratios):.3f}")


def _ten_gon_ok(run):
    mu10 = mu_bound(10, V0)
    ks = [m.K for m in run.metrics]
    first_drop = next((i for i, k in enumerate(ks) if k != 10), len(ks))
    stays = all(k != 10 for k in ks[first_drop:]) and run.gathered
    rates = [m.dLdt_est for m in run.metrics[1:first_drop] if m.rate_checkable]
    within = bool(rates) and all(abs(r + mu10) <= 0.02 * mu10 for r in rates)
    return within and stays, rates


def test_criterion_05_regular_ten_gon(ten_gon_literal):
    s, run = ten_gon_literal
    ok, rates = _ten_gon_ok(run)
    lo = min(rates, default=float("nan"))
    hi = max(rates, default=float("nan"))
    chord = chord_lengths(10, 323.61)[0]
    record(5, ok, f"R=323.61: adjacent chord {chord:.4f} vs V={V:g}, "
           f"initially_connected={s.initially_connected}, "
           f"termination={run.termination}, dL/dt in [{lo:.4f}, {hi:.4f}] "
           f"vs -mu(10)={-mu_bound(10, V0):.4f}")


def test_ten_gon_just_inside_visibility(ten_gon_320):
    # companion to criterion 5 with every adjacent chord strictly inside V
    ok, rates = _ten_gon_ok(ten_gon_320)
    assert ok and len(rates) > 100
    assert max(abs(r + mu_bound(10, V0)) for r in rates) < 1e-9


def test_criterion_06_cone(cone_run):
    first = next(m for m in cone_run.metrics if m.dLdt_est is not None)
    rate = -first.dLdt_est
    mu4 = mu_bound(4, V0)
    ok = mu4 - 0.05 <= rate <= 8 * V0 and rate < 8 * V0
    record(6, ok, f"initial -dL/dt = {rate:.4f} (K={first.K}) in "
           f"[{mu4 - 0.05:.2f}, 8) ; mu(4) = {mu4:.4f}")


def test_criterion_07_rate_inequality(cg_runs, ten_gon_320, cone_run):
    checked = failed = 0
    for run in [*cg_runs, ten_gon_320, cone_run]:
        law, dt = run.law, run.scenario.dt
        for m in run.metrics:
            if m.rate_checkable:
                checked += 1
                failed += not check_rate_bound(m, law.gain_floor,
                                               rate_tolerance(m.K, law.gain_floor, dt))
    record(7, failed == 0 and checked > 0,
           f"{failed} failures over {checked} valid samples "
           f"(criterion 3 runs, R=320 ten-gon, n=4 cone)")


def _random_bearings(rng):
    d = int(rng.integers(0, 13))
    a = rng.uniform(-math.pi, math.pi, d)
    mode = rng.random()
    if d >= 2 and mode < 0.1:
        a[1] = a[0]  # duplicate
    elif d >= 2 and mode < 0.2:
        a[1] = a[0] + math.pi  # antipodal
    elif d >= 1 and mode < 0.3:
        a = np.round(a / (math.pi / 4)) * (math.pi / 4)  # lattice ties
    return np.column_stack([np.cos(a), np.sin(a)]).reshape(-1, 2)


def _generic(b):
    if len(b) < 2:
        return True
    s = np.outer(b[:, 0], b[:, 1]) - np.outer(b[:, 1], b[:, 0])
    off = s[~np.eye(len(b), dtype=bool)]
    if np.any(off == 0.0):
        return False
    ang = np.sort(np.arctan2(b[:, 1], b[:, 0]))
    gaps = np.diff(ang, append=ang[0] + 2 * math.pi)
    return abs(gaps.max() - math.pi) > PI_BAND


def test_criterion_08_formulation_equivalence():
    rng = np.random.default_rng(2024)
    sum_bad = full_bad = generic = 0
    worst_pos = math.inf
    for _ in range(100_000):
        b = _random_bearings(rng)
        sw, wt = extremal_sweep(b), extremal_weights(b)
        if np.abs(sw.sum - wt.sum).max(initial=0) > 1e-9:
            sum_bad += 1
        if _generic(b):
            generic += 1
            if (sw.kind is not wt.kind
                    or np.abs(sw.u_plus - wt.u_plus).max() > 1e-9
                    or np.abs(sw.u_minus - wt.u_minus).max() > 1e-9):
                full_bad += 1
        if len(b):
            worst_pos = min(worst_pos, float((b @ sw.sum).min()), float((b @ wt.sum).min()))
    ok = sum_bad == 0 and full_bad == 0 and worst_pos >= -1e-12
    record(8, ok, f"sum mismatches {sum_bad}/100000, generic mismatches "
           f"{full_bad}/{generic}, min (u+ + u-).b = {worst_pos:.3g}")


def test_criterion_09_constant_speed(cs_runs):
    viol = [len(connectivity_audit(r.ledger, TOL_STEP)) for r in cs_runs]
    half_bound = [gathering_time_bound(r.L0, N, V0 / 2) for r in cs_runs]
    gathered_ok = all(r.gathered and r.t_gathered <= 1.05 * tb
                      for r, tb in zip(cs_runs, half_bound))
    toggles = [r.toggles for r in cs_runs]
    ratio = max(r.t_gathered / tb for r, tb in zip(cs_runs, half_bound) if r.gathered)
    record(9, sum(viol) == 0 and gathered_ok,
           f"audit: {sum(viol)} violations in {sum(v > 0 for v in viol)}/100 runs "
           f"(largest {max(r.ledger.max_slack for r in cs_runs):.3g} > tol {TOL_STEP:.3g}); "
           f"gathering within 2x T_ub: {gathered_ok} (max ratio {ratio:.3f}); "
           f"toggles min/median/max {min(toggles)}/{statistics.median(toggles):g}/"
           f"{max(toggles)}")


def test_constant_speed_gathers_within_doubled_bound(cs_runs):
    for r in cs_runs:
        assert r.gathered
        assert r.t_gathered <= 1.05 * gathering_time_bound(r.L0, N, V0 / 2)


def test_constant_speed_keeps_initial_pairs_and_connectivity(cs_runs):
    # pairs that enter range at d ~ V may flicker out for one step; initial
    # pairs never leave and the graph stays connected
    for r in cs_runs:
        lost = {e.detail for e in r.events_of(CONNECTIVITY_VIOLATION)}
        assert not lost & r.ledger.initial_edges
        assert all(m.connectivity_ok for m in r.metrics)


def test_criterion_10_descent_process():
    rng = np.random.default_rng(10)
    trace_bad = ratio_bad = equal_bad = unconverged = 0
    for n in range(3, 9):
        for _ in range(1000):
            run = descent_run(random_angle_config(n, rng))
            unconverged += not run.converged
            tr = run.cos_trace
            trace_bad += any(b > a + 1e-12 for a, b in zip(tr, tr[1:]))
            ratio_bad += any(e1 > (1 - 1 / (2 * k)) * e0 + 1e-20
                             for k, e0, e1 in run.averaging_ratios())
            vals = [run.final.angles[i] for i in run.final.nonzero()]
            equal_bad += max(vals) - min(vals) > 1e-8
    ok = not (trace_bad or ratio_bad or equal_bad or unconverged)
    record(10, ok, f"6000 configs: trace increases {trace_bad}, contraction "
           f"breaches {ratio_bad}, unequal finals {equal_bad}, unconverged {unconverged}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
