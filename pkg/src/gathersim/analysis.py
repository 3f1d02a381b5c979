"""Lyapunov quantities along a run and the closed-form rate bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .geometry import convex_hull


def mu_bound(K: int, v0: float = 1.0) -> float:
    """Lower bound on the perimeter decrease rate for a K-vertex hull."""
    if int(K) != K or K < 2:
        raise InvalidInputError(f"mu_bound needs integer K >= 2, got {K!r}")
    K = int(K)
    inner = max(math.cos(2 * math.pi / K),
                (K - 1) / K * math.cos(math.pi / (K - 1)) - 1.0 / K)
    return 2.0 * v0 * K * (1.0 - inner)


def gathering_time_bound(L0: float, N: int, v0: float = 1.0) -> float:
    """Upper bound L(0) / mu(N) on the time to gather N agents."""
    if not L0 >= 0 or N < 2 or not v0 > 0:
        raise InvalidInputError("need L0 >= 0, N >= 2, v0 > 0")
    return L0 / mu_bound(N, v0)


def rate_tolerance(K: int, v0: float, dt: float) -> float:
    """Default slack for rate checks: 2% of mu(K) plus 10 v0 dt."""
    return 0.02 * mu_bound(max(K, 2), v0) + 10.0 * v0 * dt


@dataclass(frozen=True)
class MetricsRecord:
    time: float
    K: int
    L: float
    dLdt_est: Optional[float]
    bound_rate: float
    cos_sum: float
    connectivity_ok: bool = True
    surrounded_count: int = 0
    toggle_count_cum: int = 0
    interior_angles: tuple[float, ...] = ()
    K_prev: Optional[int] = None
    # hull vertex set unchanged at every step since the previous sample
    k_steady: bool = False

    @property
    def rate_checkable(self) -> bool:
        """Finite-difference rate exists and the hull held over the interval."""
        return self.dLdt_est is not None and self.K >= 3 and self.k_steady


def hull_metrics(state, prev: Optional[MetricsRecord] = None,
                 sample_dt: Optional[float] = None, *, gain_floor: float = 1.0,
                 surrounded_count: int = 0, toggle_count_cum: int = 0,
                 connectivity_ok: bool = True,
                 k_history=None) -> MetricsRecord:
    """Hull size, perimeter and rate estimate for one sample.

    ``state`` needs ``time`` and ``positions``; merged agents already share a
    single position so K counts distinct points.  ``sample_dt`` defaults to
    the time elapsed since ``prev``.  ``bound_rate`` is ``-mu(K)`` evaluated
    with the speed law's gain floor.  ``k_history`` holds one hull signature
    per step of the interval (a count, or a frozenset of vertex ids); the
    interval is steady when they all agree.  Without it only the endpoint
    sizes are compared.
    """
    hull = convex_hull([tuple(p) for p in np.asarray(state.positions)])
    dL = None
    if prev is not None:
        if sample_dt is None:
            sample_dt = state.time - prev.time
        if not sample_dt > 0:
            raise InvalidInputError("sample_dt must be positive")
        dL = (hull.perimeter - prev.L) / sample_dt
    bound = -mu_bound(hull.K, gain_floor) if hull.K >= 2 else 0.0
    steady = prev is not None and prev.K == hull.K
    if steady and k_history is not None:
        steady = len(set(k_history)) <= 1
    return MetricsRecord(
        time=float(state.time), K=hull.K, L=hull.perimeter, dLdt_est=dL,
        bound_rate=bound, cos_sum=hull.cos_sum, connectivity_ok=connectivity_ok,
        surrounded_count=surrounded_count, toggle_count_cum=toggle_count_cum,
        interior_angles=hull.interior_angles,
        K_prev=None if prev is None else prev.K, k_steady=steady,
    )


def angle_rate_bound(record: MetricsRecord, v0: float) -> float:
    """2 v0 sum(1 + cos theta_k) over the hull angles of ``record``."""
    return 2.0 * v0 * math.fsum(1.0 + math.cos(a) for a in record.interior_angles)


def check_rate_bound(record: MetricsRecord, v0: float, tol: float) -> bool:
    """Both rate inequalities at one sample.

    Only meaningful when :attr:`MetricsRecord.rate_checkable`; callers skip
    other samples.
    """
    if record.dLdt_est is None or record.K < 3:
        raise InvalidInputError("rate check needs a finite-difference sample with K >= 3")
    rate = -record.dLdt_est
    return (rate >= angle_rate_bound(record, v0) - tol
            and rate >= mu_bound(record.K, v0) - tol)


@dataclass(frozen=True)
class Violation:
    pair: tuple[int, int]
    time: float
    increase: float


@dataclass
class ConnectivityLedger:
    """Initially visible pairs and their largest one-step distance increase.

    Pairs are keyed by the original agent ids; ``owner`` maps each original
    id to the live agent that currently carries it, so a pair whose ends
    merged is finished.  Increases are measured across the motion update
    only, before the merge pass re-centres clusters.
    """

    initial_edges: frozenset[tuple[int, int]]
    owner: dict[int, int]
    steps: int = 0

    def __post_init__(self):
        self._edges = np.array(sorted(self.initial_edges), dtype=np.int64).reshape(-1, 2)
        self._inc = np.full(len(self._edges), -np.inf)
        self._when = np.full(len(self._edges), np.nan)

    @classmethod
    def from_state(cls, ids, positions, visibility: float) -> "ConnectivityLedger":
        ids = [int(i) for i in ids]
        p = np.asarray(positions, dtype=float).reshape(-1, 2)
        diff = p[None, :, :] - p[:, None, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        a, b = np.nonzero(np.triu((dist > 0) & (dist <= visibility), 1))
        edges = {(min(ids[i], ids[j]), max(ids[i], ids[j]))
                 for i, j in zip(a.tolist(), b.tolist())}
        return cls(frozenset(edges), {i: i for i in ids})

    @property
    def max_increase(self) -> dict[tuple[int, int], float]:
        return {tuple(e): float(v) for e, v in zip(self._edges.tolist(), self._inc)}

    @property
    def worst_time(self) -> dict[tuple[int, int], float]:
        return {tuple(e): float(v) for e, v in zip(self._edges.tolist(), self._when)}

    def observe(self, time: float, ids, before, after) -> None:
        """Record one step; ``before`` and ``after`` rows align with ``ids``."""
        self.steps += 1
        if not len(self._edges):
            return
        row = {int(i): k for k, i in enumerate(ids)}
        ra = np.array([row[self.owner[e]] for e in self._edges[:, 0].tolist()])
        rb = np.array([row[self.owner[e]] for e in self._edges[:, 1].tolist()])
        live = ra != rb
        if not live.any():
            return
        ra, rb = ra[live], rb[live]
        before = np.asarray(before, dtype=float)
        after = np.asarray(after, dtype=float)
        d0 = np.hypot(*(before[ra] - before[rb]).T)
        d1 = np.hypot(*(after[ra] - after[rb]).T)
        inc = np.full(len(self._edges), -np.inf)
        inc[live] = d1 - d0
        worse = inc > self._inc
        self._inc[worse] = inc[worse]
        self._when[worse] = time

    def merged(self, absorbed: dict[int, int]) -> None:
        """Re-point original ids after live agents were absorbed."""
        for orig, cur in self.owner.items():
            while cur in absorbed:
                cur = absorbed[cur]
            self.owner[orig] = cur

    @property
    def max_slack(self) -> float:
        vals = self._inc[np.isfinite(self._inc)]
        return float(vals.max()) if len(vals) else 0.0


def connectivity_audit(ledger: ConnectivityLedger, tol_step: float) -> list[Violation]:
    """Initially visible pairs whose distance grew by more than tol in a step."""
    when = ledger.worst_time
    out = [Violation(e, when[e], inc)
           for e, inc in ledger.max_increase.items() if inc > tol_step]
    return sorted(out, key=lambda v: (v.time, v.pair))


def default_step_tol(v0: float, dt: float, visibility: float) -> float:
    return 10.0 * (v0 * dt) ** 2 / visibility
