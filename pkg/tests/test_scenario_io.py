import csv
import json
import math
from dataclasses import replace

import numpy as np
import pytest

from gathersim.dynamics import simulate
from gathersim.errors import GenerationError, InvalidInputError, ScenarioFormatError
from gathersim.geometry import convex_hull
from gathersim.polygon_bounds import theorem1_bound
from gathersim.scenario_io import (EVENTS_HEADER, METRICS_HEADER, RNG_NAME,
                                   TRAJECTORY_HEADER, adjacent_only_radii,
                                   chord_lengths, gen_cone_near_minimum,
                                   gen_random_connected, gen_regular_polygon,
                                   load_scenario, read_metrics, save_scenario,
                                   scenario_to_dict, write_run)


def test_random_single_agent():
    s = gen_random_connected(1, 200.0, 10.0, seed=3)
    assert s.n == 1 and s.initially_connected


def test_random_seed_42_reproducible():
    a = gen_random_connected(15, 200.0, 600.0, seed=42)
    b = gen_random_connected(15, 200.0, 600.0, seed=42)
    assert a == b and a.initially_connected
    assert json.dumps(scenario_to_dict(a)) == json.dumps(scenario_to_dict(b))
    assert gen_random_connected(15, 200.0, 600.0, seed=43) != a
    assert RNG_NAME in a.generator and "attempts=" in a.generator


def test_generation_failure_path():
    with pytest.raises(GenerationError, match="smaller"):
        gen_random_connected(2, 1.0, 1000.0, seed=0)


def test_regular_polygon_examples():
    sq = gen_regular_polygon(4, math.sqrt(2) / 2)
    assert convex_hull(sq.positions).perimeter == pytest.approx(4.0)
    tri = gen_regular_polygon(3, 1.0)
    assert tri.L0 == pytest.approx(3 * math.sqrt(3))
    c1, c2 = chord_lengths(10, 323.61)[:2]
    assert c1 == pytest.approx(200.0, abs=0.01) and c2 == pytest.approx(380.4, abs=0.05)
    lo, hi = adjacent_only_radii(10, 200.0)
    assert lo < 320.0 < hi
    with pytest.raises(InvalidInputError):
        gen_regular_polygon(2, 1.0)


def test_cone_examples():
    s4 = gen_cone_near_minimum(4, 1e-3)
    h = convex_hull(s4.positions)
    assert h.K == 4 and h.cos_sum == pytest.approx(-0.5, abs=5e-3)
    assert min(h.interior_angles) == pytest.approx(1e-3, rel=1e-6)
    s3 = gen_cone_near_minimum(3, 1e-3)
    assert convex_hull(s3.positions).cos_sum == pytest.approx(theorem1_bound(3), abs=5e-3)
    assert s4.initially_connected
    for bad in [dict(n=4, epsilon=0.0), dict(n=7, epsilon=1e-3), dict(n=4, epsilon=0.2)]:
        with pytest.raises(InvalidInputError):
            gen_cone_near_minimum(**bad)


def test_round_trip(tmp_path):
    s = gen_regular_polygon(10, 323.61)
    p = save_scenario(s, tmp_path / "s.json")
    assert load_scenario(p) == s
    r = gen_random_connected(15, seed=9)
    assert load_scenario(save_scenario(r, tmp_path / "r.json")) == r


def _write(tmp_path, d):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    return p


def test_format_errors(tmp_path):
    d = scenario_to_dict(gen_regular_polygon(5, 10.0))
    missing = dict(d)
    del missing["dt"]
    with pytest.raises(ScenarioFormatError, match="'dt'"):
        load_scenario(_write(tmp_path, missing))
    with pytest.raises(ScenarioFormatError, match="version"):
        load_scenario(_write(tmp_path, {**d, "version": 99}))
    with pytest.raises(ScenarioFormatError, match="unknown field 'colour'"):
        load_scenario(_write(tmp_path, {**d, "colour": "red"}))
    with pytest.raises(ScenarioFormatError, match="'n'"):
        load_scenario(_write(tmp_path, {**d, "n": "five"}))
    with pytest.raises(ScenarioFormatError, match="invalid scenario"):
        load_scenario(_write(tmp_path, {**d, "v0": -1.0}))
    p = tmp_path / "trunc.json"
    p.write_text('{\n  "version": 1,\n  "n": ')
    with pytest.raises(ScenarioFormatError, match="line 3"):
        load_scenario(p)


def _csv(path):
    raw = path.read_bytes()
    with open(path, newline="") as fh:
        return raw, list(csv.reader(fh))


def test_write_run_two_agents(tmp_path):
    s = gen_random_connected(2, 200.0, 100.0, seed=1)
    run = simulate(s)
    man = write_run(run, tmp_path)
    raw, traj = _csv(tmp_path / "trajectory.csv")
    assert traj[0] == TRAJECTORY_HEADER and b"\r\n" in raw
    rows_by_t = {}
    for r in traj[1:]:
        rows_by_t.setdefault(r[0], []).append(r)
    assert all(len(v) == 2 for t, v in rows_by_t.items() if float(t) < run.t_end)
    _, met = _csv(tmp_path / "metrics.csv")
    assert met[0] == METRICS_HEADER
    assert met[-1][1] == "1" and float(met[-1][2]) == 0.0
    _, ev = _csv(tmp_path / "events.csv")
    assert ev[0] == EVENTS_HEADER and ["merge", "0;1"] == ev[1][1:]
    assert man["termination"] == "gathered" and man["rng"] == RNG_NAME
    assert man["files"]["metrics.csv"]["rows"] == len(met) - 1
    assert json.loads((tmp_path / "manifest.json").read_text()) == man
    assert load_scenario(tmp_path / "scenario.json") == s
    cols = read_metrics(tmp_path / "metrics.csv")
    assert cols["dLdt_est"][0] is None and cols["k_hull"][-1] == 1.0


def test_write_run_timed_out(tmp_path):
    s = replace(gen_random_connected(5, 200.0, seed=2), t_max=1.0)
    man = write_run(simulate(s), tmp_path)
    assert man["termination"] == "timed_out" and man["t_gathered"] is None


def test_write_run_error_has_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    run = simulate(gen_random_connected(2, 200.0, 50.0, seed=0))
    with pytest.raises(OSError, match="file"):
        write_run(run, blocker / "sub")


def test_byte_identical_outputs(tmp_path):
    s = gen_random_connected(8, 200.0, seed=5)
    write_run(simulate(s), tmp_path / "a")
    write_run(simulate(s), tmp_path / "b")
    for name in ("trajectory.csv", "metrics.csv", "events.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
