"""Scenario generators, scenario files and run output files.

Scenario and manifest files are UTF-8 JSON; series are RFC 4180 CSV.  Floats
are written with ``repr`` so that every value round-trips exactly.
Random scenarios draw from numpy's counter-based Philox generator, which
gives the same stream for a seed on every platform.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .analysis import gathering_time_bound, mu_bound
from .dynamics import RunResult, default_dt, default_merge_radius
from .errors import GenerationError, InvalidInputError, ScenarioFormatError
from .geometry import convex_hull, perimeter, regular_polygon
from .sensing import is_connected, visibility_graph

FORMAT_VERSION = 1
RNG_NAME = "numpy.random.Philox"

TRAJECTORY_HEADER = ["t", "agent_id", "x", "y", "vx", "vy", "multiplicity"]
METRICS_HEADER = ["t", "k_hull", "perimeter", "dLdt_est", "bound_rate", "cos_sum",
                  "surrounded_count", "toggles_cum", "connectivity_ok"]
EVENTS_HEADER = ["t", "kind", "detail"]


@dataclass(frozen=True)
class Scenario:
    version: int
    n: int
    positions: tuple[tuple[float, float], ...]
    v0: float
    visibility: float
    dt: float
    t_max: float
    speed_law: str
    merge_radius: float
    metrics_every: int
    seed: int
    generator: str
    initially_connected: bool

    def __post_init__(self):
        if self.n != len(self.positions):
            raise InvalidInputError("n does not match the number of positions")
        for name in ("v0", "visibility", "dt", "t_max", "merge_radius"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be a positive finite number")
        if self.metrics_every < 1:
            raise InvalidInputError("metrics_every must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        for p in self.positions:
            if not all(math.isfinite(c) for c in p):
                raise InvalidInputError("non-finite position")

    @property
    def L0(self) -> float:
        return convex_hull(self.positions).perimeter

    def with_law(self, speed_law: str) -> "Scenario":
        return replace(self, speed_law=speed_law)


def _build(positions, *, v0, visibility, dt, t_max, speed_law, merge_radius,
           metrics_every, seed, generator) -> Scenario:
    pos = tuple((float(x), float(y)) for x, y in np.asarray(positions, dtype=float))
    n = len(pos)
    if dt is None:
        dt = default_dt(visibility, v0)
    if merge_radius is None:
        merge_radius = default_merge_radius(v0, dt)
    connected = is_connected(visibility_graph(np.asarray(pos), visibility))
    if t_max is None:
        L0 = convex_hull(pos).perimeter if n else 0.0
        # room for the constant-speed law, whose gain floor is v0/2
        t_max = 4.0 * gathering_time_bound(L0, max(n, 2), v0) + 10.0 * dt
    return Scenario(FORMAT_VERSION, n, pos, float(v0), float(visibility), float(dt),
                    float(t_max), speed_law, float(merge_radius), int(metrics_every),
                    int(seed), generator, connected)


def default_extent(n: int, visibility: float) -> float:
    return visibility * math.sqrt(n) / 2.0


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def gen_random_connected(n: int, visibility: float = 200.0, extent: float | None = None,
                         seed: int = 0, *, v0: float = 1.0, dt: float | None = None,
                         t_max: float | None = None, speed_law: str = "constant-gain",
                         merge_radius: float | None = None, metrics_every: int = 10,
                         max_attempts: int = 10_000) -> Scenario:
    """Uniform positions on [0, extent]^2, redrawn until the graph is connected."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if extent is None:
        extent = default_extent(n, visibility)
    if not extent > 0:
        raise InvalidInputError("extent must be positive")
    rng = make_rng(seed)
    for attempt in range(1, max_attempts + 1):
        pos = rng.random((n, 2)) * extent
        if is_connected(visibility_graph(pos, visibility)):
            break
    else:
        raise GenerationError(
            f"no connected configuration after {max_attempts} draws; "
            f"try an extent smaller than {extent}")
    desc = f"random_connected(n={n},extent={extent!r},attempts={attempt},rng={RNG_NAME})"
    return _build(pos, v0=v0, visibility=visibility, dt=dt, t_max=t_max,
                  speed_law=speed_law, merge_radius=merge_radius,
                  metrics_every=metrics_every, seed=seed, generator=desc)


def chord_lengths(n: int, circumradius: float) -> list[float]:
    """Distances from a regular n-gon vertex to its k-th neighbour, k = 1..n//2."""
    return [2.0 * circumradius * math.sin(k * math.pi / n) for k in range(1, n // 2 + 1)]


def adjacent_only_radii(n: int, visibility: float) -> tuple[float, float]:
    """Open interval of circumradii where only polygon neighbours see each other."""
    return (visibility / (2 * math.sin(2 * math.pi / n)),
            visibility / (2 * math.sin(math.pi / n)))


def gen_regular_polygon(n: int, circumradius: float, *, visibility: float = 200.0,
                        v0: float = 1.0, dt: float | None = None,
                        t_max: float | None = None, speed_law: str = "constant-gain",
                        merge_radius: float | None = None,
                        metrics_every: int = 10) -> Scenario:
    if int(n) != n or n < 3:
        raise InvalidInputError("regular polygon needs n >= 3")
    if not circumradius > 0:
        raise InvalidInputError("circumradius must be positive")
    pos = regular_polygon(int(n), float(circumradius))
    desc = f"regular_polygon(n={n},circumradius={circumradius!r})"
    return _build(pos, v0=v0, visibility=visibility, dt=dt, t_max=t_max,
                  speed_law=speed_law, merge_radius=merge_radius,
                  metrics_every=metrics_every, seed=0, generator=desc)


def cone_polygon(n: int, epsilon: float, scale: float = 1.0) -> np.ndarray:
    """Convex n-gon with one angle ``epsilon`` and n - 1 equal angles.

    The apex sits at the origin with its first edge along +x.  The n - 2 cap
    edges joining the equal-angle vertices have length ``scale``; the two
    long sides are solved from the closure condition.
    """
    a = ((n - 2) * math.pi - epsilon) / (n - 1)
    turn = math.pi - a
    dirs = [k * turn for k in range(n)]
    cap = np.zeros(2)
    for k in range(1, n - 1):
        cap += scale * np.array([math.cos(dirs[k]), math.sin(dirs[k])])
    # l0 * e(dir0) + cap + l_last * e(dir_last) = 0
    m = np.array([[math.cos(dirs[0]), math.cos(dirs[-1])],
                  [math.sin(dirs[0]), math.sin(dirs[-1])]])
    l0, l_last = np.linalg.solve(m, -cap)
    if not (l0 > 0 and l_last > 0):
        raise InvalidInputError("cone construction failed; epsilon too large")
    lengths = [l0] + [scale] * (n - 2)
    pts = [np.zeros(2)]
    for k in range(n - 1):
        pts.append(pts[-1] + lengths[k] * np.array([math.cos(dirs[k]), math.sin(dirs[k])]))
    return np.array(pts)


def gen_cone_near_minimum(n: int, epsilon: float, scale: float = 1.0, *,
                          visibility: float | None = None, v0: float = 1.0,
                          dt: float = 0.05, t_max: float | None = None,
                          speed_law: str = "constant-gain",
                          merge_radius: float | None = None,
                          metrics_every: int = 10) -> Scenario:
    """Thin cone whose angle cosine sum is within O(epsilon) of C_n, n <= 6.

    Unless given, ``visibility`` is set just above the polygon diameter so
    every agent sees every other, which makes each hull vertex's extremal
    bearings point along its hull edges.
    """
    if int(n) != n or not 3 <= n <= 6:
        raise InvalidInputError("cone configurations apply to 3 <= n <= 6; "
                                "use a regular polygon for n >= 7")
    if not 0 < epsilon <= 0.1:
        raise InvalidInputError("epsilon must lie in (0, 0.1]")
    pos = cone_polygon(int(n), float(epsilon), float(scale))
    if visibility is None:
        diff = pos[None] - pos[:, None]
        visibility = float(np.hypot(diff[..., 0], diff[..., 1]).max()) * (1 + 1e-6)
    desc = f"cone_near_minimum(n={n},epsilon={epsilon!r},scale={scale!r})"
    return _build(pos, v0=v0, visibility=visibility, dt=dt, t_max=t_max,
                  speed_law=speed_law, merge_radius=merge_radius,
                  metrics_every=metrics_every, seed=0, generator=desc)


# --------------------------------------------------------------------------
# scenario files

_FIELD_TYPES = {
    "version": int, "n": int, "positions": list, "v0": float, "visibility": float,
    "dt": float, "t_max": float, "speed_law": str, "merge_radius": float,
    "metrics_every": int, "seed": int, "generator": str, "initially_connected": bool,
}


def scenario_to_dict(s: Scenario) -> dict:
    d = asdict(s)
    d["positions"] = [list(p) for p in s.positions]
    return d


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_scenario(s: Scenario, path) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(scenario_to_dict(s), indent=2) + "\n")
    return path


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioFormatError("scenario file must hold a JSON object")
    missing = [k for k in _FIELD_TYPES if k not in d]
    if "version" in missing:
        raise ScenarioFormatError("missing required field 'version'")
    if d["version"] != FORMAT_VERSION:
        raise ScenarioFormatError(
            f"unsupported scenario version {d['version']!r} (expected {FORMAT_VERSION})")
    if missing:
        raise ScenarioFormatError(f"missing required field {missing[0]!r}")
    unknown = sorted(set(d) - set(_FIELD_TYPES))
    if unknown:
        raise ScenarioFormatError(f"unknown field {unknown[0]!r}")
    kw = {}
    for name, typ in _FIELD_TYPES.items():
        v = d[name]
        if typ is float and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        if typ is int and isinstance(v, bool) or not isinstance(v, typ):
            raise ScenarioFormatError(f"field {name!r}: expected {typ.__name__}, got {v!r}")
        kw[name] = v
    try:
        kw["positions"] = tuple((float(x), float(y)) for x, y in kw["positions"])
    except (TypeError, ValueError):
        raise ScenarioFormatError("field 'positions': expected a list of [x, y] pairs") from None
    try:
        return Scenario(**kw)
    except InvalidInputError as exc:
        raise ScenarioFormatError(f"invalid scenario: {exc}") from None


def load_scenario(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(d)


# --------------------------------------------------------------------------
# run output


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_text(header, rows) -> tuple[str, int]:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    count = 0
    for r in rows:
        w.writerow([_fmt(x) for x in r])
        count += 1
    return buf.getvalue(), count


def trajectory_rows(run: RunResult):
    for s in run.samples:
        for k, aid in enumerate(s.ids):
            yield (float(s.time), aid, float(s.positions[k, 0]), float(s.positions[k, 1]),
                   float(s.velocities[k, 0]), float(s.velocities[k, 1]), s.multiplicity[k])


def metrics_rows(run: RunResult):
    for m in run.metrics:
        yield (m.time, m.K, float(m.L), m.dLdt_est, float(m.bound_rate), float(m.cos_sum),
               m.surrounded_count, m.toggle_count_cum, m.connectivity_ok)


def event_rows(run: RunResult):
    for e in run.events:
        yield (float(e.time), e.kind, e.detail_str())


def time_bound(run: RunResult) -> float | None:
    n = run.scenario.n
    if n < 2:
        return None
    return gathering_time_bound(run.L0, n, run.law.gain_floor)


def write_run(run: RunResult, out_dir) -> dict:
    """Write the five run files; returns the manifest that was written."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = {}
        for name, header, rows in (
            ("trajectory.csv", TRAJECTORY_HEADER, trajectory_rows(run)),
            ("metrics.csv", METRICS_HEADER, metrics_rows(run)),
            ("events.csv", EVENTS_HEADER, event_rows(run)),
        ):
            text, count = _csv_text(header, rows)
            _atomic_write(out / name, text)
            files[name] = {"path": name, "rows": count}
        save_scenario(run.scenario, out / "scenario.json")
        files["scenario.json"] = {"path": "scenario.json", "rows": 1}
        manifest = {
            "format_version": FORMAT_VERSION,
            "rng": RNG_NAME,
            "speed_law": run.law.name,
            "termination": run.termination,
            "t_end": run.t_end,
            "t_gathered": run.t_gathered,
            "steps": run.steps,
            "L0": run.L0,
            "T_ub": time_bound(run),
            "max_connectivity_slack": run.ledger.max_slack,
            "surrounded_toggles": run.toggles,
            "files": files,
        }
        _atomic_write(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"writing run output under {out}: {exc}") from exc
    return manifest


def read_metrics(path) -> dict[str, list]:
    """Columns of a metrics.csv file; empty cells become None."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols: dict[str, list] = {h: [] for h in reader.fieldnames or []}
        for row in reader:
            for h, v in row.items():
                if v == "":
                    cols[h].append(None)
                elif v in ("true", "false"):
                    cols[h].append(v == "true")
                else:
                    cols[h].append(float(v))
    return cols
