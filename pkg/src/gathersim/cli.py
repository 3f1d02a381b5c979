"""Command-line front end: ``gathersim gen|run|bounds|verify-lemma|plot``.

Exit codes: 0 success, 1 validation or verification failure, 2 usage error,
3 I/O error.  ``GATHERSIM_OUT`` overrides the default output directory.
"""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import analysis, polygon_bounds, scenario_io
from .dynamics import default_merge_radius, simulate
from .errors import (ConfigurationError, DisconnectedError, GenerationError,
                     InvalidInputError, ScenarioFormatError)
from .plotting import metrics_plot

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def out_root() -> Path:
    return Path(os.environ.get("GATHERSIM_OUT", "gathersim_out"))


def _err(msg: str) -> None:
    print(f"gathersim: {msg}", file=sys.stderr)


def cmd_gen(args) -> int:
    common = dict(v0=args.v0, speed_law=args.law, metrics_every=args.metrics_every)
    if args.dt is not None:
        common["dt"] = args.dt
    if args.kind == "random":
        s = scenario_io.gen_random_connected(args.n, args.visibility, args.extent,
                                             args.seed, **common)
    elif args.kind == "regular":
        s = scenario_io.gen_regular_polygon(args.n, args.circumradius,
                                            visibility=args.visibility, **common)
    else:
        s = scenario_io.gen_cone_near_minimum(args.n, args.epsilon, args.scale, **common)
    path = Path(args.output) if args.output else out_root() / "scenario.json"
    scenario_io.save_scenario(s, path)
    if not s.initially_connected:
        _err("warning: initial visibility graph is not connected")
    print(path)
    return EXIT_OK


def verify_run(run, tol_step: float | None = None) -> list[str]:
    """Human-readable failures of the connectivity audit and rate checks."""
    s = run.scenario
    floor = run.law.gain_floor
    if tol_step is None:
        tol_step = analysis.default_step_tol(s.v0, s.dt, s.visibility)
    problems = [f"pair {v.pair} grew by {v.increase:.3g} at t={v.time:g}"
                for v in analysis.connectivity_audit(run.ledger, tol_step)]
    for m in run.metrics:
        if m.rate_checkable:
            tol = analysis.rate_tolerance(m.K, floor, s.dt)
            if not analysis.check_rate_bound(m, floor, tol):
                problems.append(f"rate bound violated at t={m.time:g}: "
                                f"-dL/dt={-m.dLdt_est:.4g}, K={m.K}")
    return problems


def cmd_run(args) -> int:
    s = scenario_io.load_scenario(args.scenario)
    if args.law:
        s = replace(s, speed_law=args.law)
    if args.dt is not None:
        s = replace(s, dt=args.dt, merge_radius=default_merge_radius(s.v0, args.dt))
    if args.t_max is not None:
        s = replace(s, t_max=args.t_max)
    run = simulate(s, allow_disconnected=args.allow_disconnected)
    out = Path(args.out_dir) if args.out_dir else out_root() / "run"
    manifest = scenario_io.write_run(run, out)
    t_ub = manifest["T_ub"]
    t_g = "" if run.t_gathered is None else f" t_gathered={run.t_gathered:.6g}"
    ub = "" if t_ub is None else f" T_ub={t_ub:.6g}"
    print(f"{run.termination}{t_g}{ub} max_connectivity_slack="
          f"{run.ledger.max_slack:.3g} toggles={run.toggles} out={out}")
    if args.verify:
        problems = verify_run(run)
        for p in problems:
            _err(p)
        if problems:
            return EXIT_FAIL
        print("verify: ok")
    return EXIT_OK


def bounds_rows(k_max: int, v0: float):
    for K in range(2, k_max + 1):
        cv = polygon_bounds.case_values(K)
        yield {
            "K": K,
            "C_K": polygon_bounds.theorem1_bound(K),
            "mu": analysis.mu_bound(K, v0),
            "branch": "one_zero" if K <= 6 else "no_zero",
            "branch_switch": "true" if K == 7 else "false",
            "argmin": cv.argmin,
        }


def cmd_bounds(args) -> int:
    if args.k_max < 2:
        _err("--k-max must be >= 2")
        return EXIT_USAGE
    fh = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=["K", "C_K", "mu", "branch",
                                           "branch_switch", "argmin"])
        w.writeheader()
        for row in bounds_rows(args.k_max, args.v0):
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_verify_lemma(args) -> int:
    if not (3 <= args.n_min <= args.n_max <= 8):
        _err("need 3 <= n-min <= n-max <= 8")
        return EXIT_USAGE
    if args.resolution > 0.02:
        _err(f"warning: resolution {args.resolution} > 0.02, results are non-authoritative")
    ok = True
    for n in range(args.n_min, args.n_max + 1):
        r = polygon_bounds.brute_force_min(n, args.resolution)
        c = polygon_bounds.theorem1_bound(n)
        gap = r.value - c
        good = abs(gap) <= 5 * args.resolution
        ok &= good
        print(f"n={n} oracle={r.value:.10f} closed_form={c:.10f} gap={gap:.3e} "
              f"{'ok' if good else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_plot(args) -> int:
    run_dir = Path(args.run_dir)
    metrics = run_dir / "metrics.csv"
    if not metrics.is_file():
        _err(f"missing {metrics}")
        return EXIT_IO
    cols = scenario_io.read_metrics(metrics)
    svg = metrics_plot(cols, args.series)
    out = Path(args.output) if args.output else run_dir / f"{args.series}.svg"
    out.write_text(svg, encoding="utf-8")
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gathersim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a scenario file")
    g.add_argument("--kind", choices=["random", "regular", "cone"], default="random")
    g.add_argument("--n", type=int, default=15, help="number of agents")
    g.add_argument("--visibility", type=float, default=200.0)
    g.add_argument("--v0", type=float, default=1.0)
    g.add_argument("--dt", type=float, default=None,
                   help="time step (default 0.05*V/(200*v0); 0.05 for cones)")
    g.add_argument("--law", choices=["constant-gain", "constant-speed"],
                   default="constant-gain")
    g.add_argument("--metrics-every", type=int, default=10)
    g.add_argument("--seed", type=int, default=0, help="random kind only")
    g.add_argument("--extent", type=float, default=None,
                   help="square side for random kind (default V*sqrt(n)/2)")
    g.add_argument("--circumradius", type=float, default=320.0, help="regular kind")
    g.add_argument("--epsilon", type=float, default=1e-3, help="cone kind")
    g.add_argument("--scale", type=float, default=1.0, help="cone cap edge length")
    g.add_argument("-o", "--output", default=None,
                   help="output path (default $GATHERSIM_OUT/scenario.json)")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="simulate a scenario and write run files")
    r.add_argument("scenario")
    r.add_argument("--dt", type=float, default=None)
    r.add_argument("--t-max", type=float, default=None)
    r.add_argument("--law", choices=["constant-gain", "constant-speed"], default=None)
    r.add_argument("--out-dir", default=None, help="default $GATHERSIM_OUT/run")
    r.add_argument("--verify", action="store_true",
                   help="exit 1 if the connectivity audit or a rate check fails")
    r.add_argument("--allow-disconnected", action="store_true")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bounds", help="table of C_K and mu(K)")
    b.add_argument("--k-max", type=int, default=30)
    b.add_argument("--v0", type=float, default=1.0)
    b.add_argument("-o", "--output", default=None, help="CSV file (default stdout)")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify-lemma", help="grid oracle vs closed-form C_n")
    v.add_argument("--n-min", type=int, default=3)
    v.add_argument("--n-max", type=int, default=7)
    v.add_argument("--resolution", type=float, default=0.01)
    v.set_defaults(func=cmd_verify_lemma)

    pl = sub.add_parser("plot", help="SVG line plot of a run's metrics")
    pl.add_argument("run_dir")
    pl.add_argument("--series", choices=["perimeter", "k", "rate"], default="perimeter")
    pl.add_argument("-o", "--output", default=None)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DisconnectedError as exc:
        _err(f"{exc} (pass --allow-disconnected to run anyway)")
        return EXIT_FAIL
    except (ScenarioFormatError, ConfigurationError, GenerationError,
            InvalidInputError) as exc:
        _err(str(exc))
        return EXIT_FAIL
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
