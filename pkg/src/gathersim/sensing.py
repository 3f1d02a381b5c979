"""Visible-neighbour bearings and the extremal pair (u+, u-) of each agent.

Two independent constructions of the extremal pair are provided:

* ``extremal_sweep`` sorts bearing angles and looks for an angular gap
  strictly wider than pi; the bearings bounding it are the extremes.
* ``extremal_weights`` uses products of Heaviside-like factors of pairwise
  cross products, which needs no sorting and acts as a cross-check.

Labelling: sweeping clockwise, ``u_plus`` is the last bearing met before
entering the wide gap and ``u_minus`` the first one met on leaving it.
Equivalently ``u_plus`` is the clockwise-most bearing of the occupied sector.
Only ``u_plus + u_minus`` enters the dynamics.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

# below this distance from pi a gap is classified by the sign of the cross
# product of its bounding bearings, which is exact for antipodal pairs
PI_BAND = 1e-9

TWO_PI = 2.0 * math.pi


class Kind(str, Enum):
    SURROUNDED = "surrounded"
    MOVABLE = "movable"


@dataclass(frozen=True)
class BearingSet:
    owner: int
    neighbors: tuple[int, ...]
    vectors: np.ndarray  # (d, 2), unit rows

    def __len__(self) -> int:
        return len(self.neighbors)


@dataclass(frozen=True)
class ExtremalResult:
    kind: Kind
    u_plus: np.ndarray
    u_minus: np.ndarray

    @property
    def movable(self) -> bool:
        return self.kind is Kind.MOVABLE

    @property
    def sum(self) -> np.ndarray:
        return self.u_plus + self.u_minus


@dataclass(frozen=True)
class VisibilityGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in sorted(self.edges):
            adj[i].append(j)
            adj[j].append(i)
        return adj


_SURROUNDED = ExtremalResult(Kind.SURROUNDED, np.zeros(2), np.zeros(2))


def _positions(state_or_positions) -> np.ndarray:
    p = getattr(state_or_positions, "positions", state_or_positions)
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(p)):
        from .errors import InvalidInputError

        raise InvalidInputError("non-finite agent position")
    return p


def _vectors(bearings) -> np.ndarray:
    if isinstance(bearings, BearingSet):
        return bearings.vectors
    return np.asarray(bearings, dtype=float).reshape(-1, 2)


def pairwise(positions: np.ndarray, visibility: float):
    """Displacements, distances and the visibility mask ``0 < d <= V``."""
    diff = positions[None, :, :] - positions[:, None, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    vis = (dist > 0.0) & (dist <= visibility)
    return diff, dist, vis


def visibility_graph(state, visibility: float) -> VisibilityGraph:
    p = _positions(state)
    _, _, vis = pairwise(p, visibility)
    ii, jj = np.nonzero(np.triu(vis, 1))
    return VisibilityGraph(len(p), frozenset(zip(ii.tolist(), jj.tolist())))


def is_connected(graph: VisibilityGraph) -> bool:
    if graph.n <= 1:
        return True
    adj = graph.adjacency()
    seen = {0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in adj[i]:
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return len(seen) == graph.n


def bearing_set(state, i: int, visibility: float) -> BearingSet:
    """Nonzero bearings from agent ``i`` to every agent it can see."""
    p = _positions(state)
    d = p - p[i]
    dist = np.hypot(d[:, 0], d[:, 1])
    mask = (dist > 0.0) & (dist <= visibility)
    idx = np.nonzero(mask)[0]
    vecs = d[idx] / dist[idx, None]
    return BearingSet(i, tuple(idx.tolist()), vecs)


def _cross2(a, b) -> float:
    return a[0] * b[1] - a[1] * b[0]


def _gap_exceeds_pi(gap: float, lo, hi) -> bool:
    if abs(gap - math.pi) < PI_BAND:
        # ccw angle lo -> hi is just above pi iff sin(angle) < 0
        return _cross2(lo, hi) < 0.0
    return gap > math.pi


def extremal_sweep(bearings) -> ExtremalResult:
    """Extremal pair via the largest cyclic gap between sorted bearings.

    No gap strictly wider than pi (including the empty set) means the
    agent is surrounded.  A single bearing bounds a gap of 2*pi on both
    sides, so both extremes equal it.
    """
    b = _vectors(bearings)
    d = len(b)
    if d == 0:
        return _SURROUNDED
    if d == 1:
        return ExtremalResult(Kind.MOVABLE, b[0].copy(), b[0].copy())
    ang = np.arctan2(b[:, 1], b[:, 0])
    order = np.argsort(ang, kind="stable")
    a = ang[order]
    gaps = np.diff(a, append=a[0] + TWO_PI)
    k = int(np.argmax(gaps))
    lo, hi = b[order[k]], b[order[(k + 1) % d]]
    if not _gap_exceeds_pi(float(gaps[k]), lo, hi):
        return _SURROUNDED
    return ExtremalResult(Kind.MOVABLE, hi.copy(), lo.copy())


def _h_plus(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, 1.0, np.where(x == 0.0, 0.5, 0.0))


def extremal_weights(bearings) -> ExtremalResult:
    """Extremal pair from cross-product sign weights.

    ``s[j, k] = u_j x u_k`` is positive when bearing ``k`` lies within pi
    counter-clockwise of bearing ``j``.  A bearing gets weight towards
    ``u_plus`` when every other bearing is on its counter-clockwise side;
    ties (zero cross products) contribute a factor 1/2.
    """
    b = _vectors(bearings)
    d = len(b)
    if d == 0:
        return _SURROUNDED
    s = np.outer(b[:, 0], b[:, 1]) - np.outer(b[:, 1], b[:, 0])
    hp = _h_plus(s)
    hm = _h_plus(-s)
    np.fill_diagonal(hp, 1.0)
    np.fill_diagonal(hm, 1.0)
    p_plus = hp.prod(axis=1)
    p_minus = hm.prod(axis=1)
    tot_p, tot_m = p_plus.sum(), p_minus.sum()
    if tot_p == 0.0 or tot_m == 0.0:
        return _SURROUNDED
    u_plus = (p_plus / tot_p) @ b
    u_minus = (p_minus / tot_m) @ b
    if not np.any(u_plus + u_minus):
        return _SURROUNDED
    return ExtremalResult(Kind.MOVABLE, u_plus, u_minus)


FORMULATIONS = {"sweep": extremal_sweep, "weights": extremal_weights}


def extremal_vector_sum(bearings, formulation: str = "sweep") -> np.ndarray:
    """``u_plus + u_minus`` under the chosen formulation (zero if surrounded)."""
    return FORMULATIONS[formulation](bearings).sum


def extremal_sums(positions, visibility: float):
    """Sweep construction for every agent at once.

    Returns ``(sums, movable, unit, vis)`` where ``sums[i]`` is
    ``u_plus + u_minus`` of agent ``i``, ``unit[i, j]`` the bearing from
    ``i`` to ``j`` (zero when not visible) and ``vis`` the visibility mask.
    Agrees with :func:`extremal_sweep` applied row by row.
    """
    p = _positions(positions)
    n = len(p)
    diff, dist, vis = pairwise(p, visibility)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(vis[..., None], diff / dist[..., None], 0.0)
    ang = np.where(vis, np.arctan2(diff[..., 1], diff[..., 0]), np.inf)
    order = np.argsort(ang, axis=1, kind="stable")
    a = np.take_along_axis(ang, order, axis=1)
    cnt = vis.sum(axis=1)
    rows = np.arange(n)

    gaps = np.full((n, n), -1.0)
    if n > 1:
        inner = np.arange(n - 1)[None, :] < (cnt[:, None] - 1)
        with np.errstate(invalid="ignore"):
            gaps[:, :-1] = np.where(inner, a[:, 1:] - a[:, :-1], -1.0)
    has = cnt > 0
    last = np.maximum(cnt - 1, 0)
    gaps[rows[has], last[has]] = a[has, 0] + TWO_PI - a[rows[has], last[has]]

    k = np.argmax(gaps, axis=1)
    g = gaps[rows, k]
    nxt = np.where(cnt > 0, (k + 1) % np.maximum(cnt, 1), 0)
    lo = unit[rows, order[rows, k]]
    hi = unit[rows, order[rows, nxt]]
    cross = lo[:, 0] * hi[:, 1] - lo[:, 1] * hi[:, 0]
    near = np.abs(g - math.pi) < PI_BAND
    movable = has & np.where(near, cross < 0.0, g > math.pi)
    sums = np.where(movable[:, None], lo + hi, 0.0)
    return sums, movable, unit, vis
