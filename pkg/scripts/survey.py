"""Seed survey of random 15-agent swarms: gathering ratio, audit, rate checks."""
import argparse
import statistics

from gathersim.analysis import (check_rate_bound, connectivity_audit, default_step_tol,
                                gathering_time_bound, rate_tolerance)
from gathersim.dynamics import simulate
from gathersim.scenario_io import gen_random_connected


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--law", default="constant-gain",
                    choices=["constant-gain", "constant-speed"])
    args = ap.parse_args()
    tol = default_step_tol(1.0, 0.05, 200.0)
    ratios, viol, bad, toggles = [], 0, 0, []
    for seed in range(args.seeds):
        run = simulate(gen_random_connected(15, 200.0, seed=seed, speed_law=args.law),
                       record_trajectory=False)
        g = run.law.gain_floor
        ratios.append(run.t_end / gathering_time_bound(run.L0, 15, g))
        viol += len(connectivity_audit(run.ledger, tol))
        bad += sum(not check_rate_bound(m, g, rate_tolerance(m.K, g, 0.05))
                   for m in run.metrics if m.rate_checkable)
        toggles.append(run.toggles)
    print(f"law={args.law} seeds={args.seeds}")
    print(f"t / T_ub (gain floor): max {max(ratios):.3f} median {statistics.median(ratios):.3f}")
    print(f"audit violations (tol {tol:.3g}): {viol}")
    print(f"rate-check failures: {bad}")
    print(f"surrounded toggles: median {statistics.median(toggles):g} max {max(toggles)}")


if __name__ == "__main__":
    main()
