import math

import numpy as np
import pytest
from hypothesis import given

from conftest import bearing_sets
from gathersim.sensing import (Kind, bearing_set, extremal_sums, extremal_sweep,
                               extremal_vector_sum, extremal_weights, is_connected,
                               visibility_graph)


def deg(*angles):
    return np.array([[math.cos(math.radians(a)), math.sin(math.radians(a))] for a in angles])


@pytest.mark.parametrize("dist,edges", [(100, 1), (200, 1), (200.01, 0)])
def test_visibility_boundary(dist, edges):
    g = visibility_graph([(0, 0), (dist, 0)], 200)
    assert len(g.edges) == edges


def test_connectivity_examples():
    assert is_connected(visibility_graph([(0, 0)], 1))
    assert is_connected(visibility_graph([(0, 0), (1, 0), (2, 0)], 1))
    assert not is_connected(visibility_graph([(0, 0), (5, 0)], 1))


def test_bearing_set_excludes_self_and_coincident():
    bs = bearing_set([(0, 0), (0, 0), (3, 4), (500, 0)], 0, 200)
    assert bs.neighbors == (2,)
    assert np.allclose(bs.vectors, [[0.6, 0.8]])


def test_sweep_examples():
    r = extremal_sweep(deg(0))
    assert r.movable and np.allclose(r.u_plus, [1, 0]) and np.allclose(r.u_minus, [1, 0])
    assert extremal_sweep(deg(0, 120, 240)).kind is Kind.SURROUNDED
    r = extremal_sweep([(1, 0), (0, 1)])
    assert r.movable and np.allclose(r.sum, [1, 1])
    assert not extremal_sweep([(1, 0), (-1, 0)]).movable
    assert not extremal_sweep(np.zeros((0, 2))).movable


def test_sweep_labels():
    # a clockwise sweep leaves u_plus when it enters the wide gap
    r = extremal_sweep([(1, 0), (0, 1)])
    assert np.allclose(r.u_plus, [1, 0]) and np.allclose(r.u_minus, [0, 1])


def test_weights_examples():
    r = extremal_weights(deg(0))
    assert np.allclose(r.u_plus, [1, 0]) and np.allclose(r.u_minus, [1, 0])
    r = extremal_weights(deg(0, 120, 240))
    assert not r.movable and not r.u_plus.any() and not r.u_minus.any()
    r = extremal_weights([(1, 0), (-1, 0)])
    assert not r.movable and np.allclose(r.sum, 0)


def test_vector_sum_examples():
    for form in ("sweep", "weights"):
        assert np.allclose(extremal_vector_sum(deg(0, 120, 240), form), 0, atol=1e-15)
        assert np.allclose(extremal_vector_sum([(1, 0)], form), [2, 0])
        assert np.allclose(extremal_vector_sum([(1, 0), (0, 1)], form), [1, 1])


def test_gap_just_above_pi():
    eps = 1e-11
    b = [(1, 0), (math.cos(math.pi - eps), math.sin(math.pi - eps))]
    assert extremal_sweep(b).movable
    assert extremal_weights(b).movable


@given(bearing_sets())
def test_positivity(b):
    for form in (extremal_sweep, extremal_weights):
        s = form(b).sum
        assert np.all(b @ s >= -1e-12)
        assert np.linalg.norm(s) <= 2 + 1e-12


@given(bearing_sets())
def test_sums_agree(b):
    assert np.allclose(extremal_sweep(b).sum, extremal_weights(b).sum, rtol=0, atol=1e-9)


@given(bearing_sets(min_size=1))
def test_surrounded_is_zero(b):
    r = extremal_sweep(b)
    if not r.movable:
        assert not r.u_plus.any() and not r.u_minus.any()


def test_generic_full_equivalence():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(3000):
        d = int(rng.integers(1, 9))
        a = rng.uniform(-math.pi, math.pi, d)
        b = np.column_stack([np.cos(a), np.sin(a)])
        s, w = extremal_sweep(b), extremal_weights(b)
        assert s.kind is w.kind
        assert np.allclose(s.u_plus, w.u_plus, atol=1e-9)
        assert np.allclose(s.u_minus, w.u_minus, atol=1e-9)
        checked += 1
    assert checked == 3000


def test_batch_matches_scalar():
    rng = np.random.default_rng(5)
    for _ in range(30):
        pos = rng.uniform(0, 400, (20, 2))
        pos[3] = pos[7]  # coincident pair
        sums, movable, _, _ = extremal_sums(pos, 150.0)
        for i in range(len(pos)):
            r = extremal_sweep(bearing_set(pos, i, 150.0))
            assert movable[i] == r.movable
            assert np.allclose(sums[i], r.sum, atol=1e-12)
