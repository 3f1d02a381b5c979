"""Thin 4-agent cone near the cosine-sum minimum: initial rate vs mu(4)=7."""
import argparse

from gathersim.analysis import mu_bound
from gathersim.dynamics import simulate
from gathersim.geometry import convex_hull
from gathersim.polygon_bounds import theorem1_bound
from gathersim.scenario_io import gen_cone_near_minimum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilon", type=float, nargs="+", default=[0.1, 0.03, 0.01, 1e-3])
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()
    print("epsilon   cos_sum   C_4      -dL/dt(0)  mu(4)")
    for eps in args.epsilon:
        s = gen_cone_near_minimum(4, eps, args.scale)
        run = simulate(s, record_trajectory=False)
        first = next(m for m in run.metrics if m.dLdt_est is not None)
        print(f"{eps:<9g} {convex_hull(s.positions).cos_sum:8.5f} {theorem1_bound(4):8.5f} "
              f"{-first.dLdt_est:9.4f}  {mu_bound(4):.4f}")


if __name__ == "__main__":
    main()
