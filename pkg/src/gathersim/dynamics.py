"""Time evolution of the swarm under the extremal-bearing motion rule.

Every agent moves with velocity ``gain * (u_plus + u_minus)``; surrounded
agents stay put.  Time is advanced by synchronous forward Euler steps and
agents closer than the merge radius are fused after each step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .analysis import ConnectivityLedger, MetricsRecord, hull_metrics
from .errors import ConfigurationError, DisconnectedError
from .geometry import hull_vertices
from .sensing import extremal_sums, extremal_sweep, pairwise

# --------------------------------------------------------------------------
# speed laws


@dataclass(frozen=True)
class ConstantGain:
    """Velocity ``v0 (u_plus + u_minus)``; speed ranges over [0, 2 v0]."""

    v0: float = 1.0
    name = "constant-gain"
    needs_bearings = False

    def __post_init__(self):
        if not self.v0 > 0:
            raise ConfigurationError("v0 must be positive")

    def gains(self, sums: np.ndarray, bearings=None) -> np.ndarray:
        return np.full(len(sums), self.v0)

    @property
    def gain_floor(self) -> float:
        return self.v0

    @property
    def speed_scale(self) -> float:
        return 2.0 * self.v0


@dataclass(frozen=True)
class ConstantSpeed:
    """Speed ``v0`` along the bisector whenever the agent is movable."""

    v0: float = 1.0
    name = "constant-speed"
    needs_bearings = False

    def __post_init__(self):
        if not self.v0 > 0:
            raise ConfigurationError("v0 must be positive")

    def gains(self, sums: np.ndarray, bearings=None) -> np.ndarray:
        norm = np.hypot(sums[:, 0], sums[:, 1])
        out = np.zeros(len(sums))
        nz = norm > 0.0
        out[nz] = self.v0 / norm[nz]
        return out

    @property
    def gain_floor(self) -> float:
        # |u_plus + u_minus| <= 2
        return 0.5 * self.v0

    @property
    def speed_scale(self) -> float:
        return 2.0 * self.v0


@dataclass(frozen=True)
class GeneralGain:
    """Gain chosen per agent from its bearing set, bounded in [floor, ceiling].

    ``gain_fn`` receives the ``(d, 2)`` array of visible bearings.
    """

    gain_fn: Callable[[np.ndarray], float]
    floor: float
    ceiling: float
    name = "general-gain"
    needs_bearings = True

    def __post_init__(self):
        if not (0 < self.floor <= self.ceiling):
            raise ConfigurationError("need 0 < floor <= ceiling")

    def gains(self, sums: np.ndarray, bearings) -> np.ndarray:
        out = np.empty(len(sums))
        for i, b in enumerate(bearings):
            g = float(self.gain_fn(b))
            if not (self.floor <= g <= self.ceiling):
                raise ConfigurationError(
                    f"gain {g} outside [{self.floor}, {self.ceiling}]")
            out[i] = g
        return out

    @property
    def gain_floor(self) -> float:
        return self.floor

    @property
    def speed_scale(self) -> float:
        return 2.0 * self.ceiling


LAWS = {"constant-gain": ConstantGain, "constant-speed": ConstantSpeed}


def make_law(tag: str, v0: float):
    try:
        return LAWS[tag](v0)
    except KeyError:
        raise ConfigurationError(f"unknown speed law {tag!r}") from None


# --------------------------------------------------------------------------
# state and events


@dataclass(frozen=True, eq=False)
class SwarmState:
    time: float
    ids: tuple[int, ...]
    positions: np.ndarray
    multiplicity: tuple[int, ...]

    @classmethod
    def initial(cls, positions) -> "SwarmState":
        p = np.array(positions, dtype=float).reshape(-1, 2)
        n = len(p)
        return cls(0.0, tuple(range(n)), p, (1,) * n)

    def __post_init__(self):
        if not np.all(np.isfinite(self.positions)):
            raise ConfigurationError("non-finite agent position")

    @property
    def n_live(self) -> int:
        return len(self.ids)

    @property
    def n_total(self) -> int:
        return sum(self.multiplicity)


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    detail: tuple

    def detail_str(self) -> str:
        return ";".join(str(x) for x in self.detail)


MERGE = "merge"
EDGE_ADDED = "edge_added"
CONNECTIVITY_VIOLATION = "connectivity_violation"
SURROUNDED_TOGGLE = "surrounded_toggle"


# --------------------------------------------------------------------------
# single-agent and single-step operations


def agent_velocity(bearings, law) -> np.ndarray:
    """Velocity of one agent given its visible bearings."""
    res = extremal_sweep(bearings)
    if not res.movable:
        return np.zeros(2)
    s = res.sum[None, :]
    b = getattr(bearings, "vectors", np.asarray(bearings, dtype=float).reshape(-1, 2))
    return law.gains(s, [b])[0] * res.sum


def velocities(positions: np.ndarray, visibility: float, law):
    """Velocities of all agents plus the movable and visibility masks."""
    sums, movable, unit, vis = extremal_sums(positions, visibility)
    bearings = None
    if law.needs_bearings:
        bearings = [unit[i, vis[i]] for i in range(len(positions))]
    g = law.gains(sums, bearings)
    vel = np.where(movable[:, None], g[:, None] * sums, 0.0)
    return vel, movable, vis


def check_step_params(visibility: float, law, dt: float) -> None:
    if not visibility > 0:
        raise ConfigurationError("visibility must be positive")
    if not dt > 0:
        raise ConfigurationError("dt must be positive")
    if dt * law.speed_scale > visibility / 10.0:
        raise ConfigurationError(
            f"step too large: dt * 2 v0 = {dt * law.speed_scale} exceeds V/10")


def default_dt(visibility: float, v0: float) -> float:
    return 0.05 * visibility / (200.0 * v0)


def default_merge_radius(v0: float, dt: float) -> float:
    return 2.0 * v0 * dt


def _clusters(positions: np.ndarray, radius: float) -> list[list[int]]:
    n = len(positions)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if n > 1:
        diff = positions[None, :, :] - positions[:, None, :]
        close = np.hypot(diff[..., 0], diff[..., 1]) <= radius
        for a, b in zip(*np.nonzero(np.triu(close, 1))):
            ra, rb = find(int(a)), find(int(b))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def merge_coincident(state: SwarmState, merge_radius: float):
    """Fuse transitive clusters of agents within ``merge_radius``.

    A cluster becomes one agent at its multiplicity-weighted centroid,
    carrying the summed multiplicity and the smallest member id.
    Returns ``(state, events, absorbed)`` where ``absorbed`` maps each
    vanished id to the id that replaced it.
    """
    if not merge_radius > 0:
        raise ConfigurationError("merge_radius must be positive")
    groups = _clusters(state.positions, merge_radius)
    if len(groups) == state.n_live:
        return state, [], {}
    ids, pos, mult, events, absorbed = [], [], [], [], {}
    for g in groups:
        members = [state.ids[k] for k in g]
        w = np.array([state.multiplicity[k] for k in g], dtype=float)
        keep = min(members)
        if len(g) == 1:
            pos.append(state.positions[g[0]])
        else:
            pos.append((w[:, None] * state.positions[g]).sum(axis=0) / w.sum())
            events.append(SimEvent(state.time, MERGE, tuple(sorted(members))))
            for m in members:
                if m != keep:
                    absorbed[m] = keep
        ids.append(keep)
        mult.append(int(w.sum()))
    order = np.argsort(ids, kind="stable")
    new = SwarmState(state.time, tuple(ids[k] for k in order),
                     np.array([pos[k] for k in order]),
                     tuple(mult[k] for k in order))
    return new, events, absorbed


def _edge_ids(vis: np.ndarray, ids: Sequence[int]) -> set[tuple[int, int]]:
    a, b = np.nonzero(np.triu(vis, 1))
    return {(ids[i], ids[j]) for i, j in zip(a.tolist(), b.tolist())}


def _remap(edges, absorbed):
    if not absorbed:
        return edges
    out = set()
    for a, b in edges:
        a, b = absorbed.get(a, a), absorbed.get(b, b)
        if a != b:
            out.add((min(a, b), max(a, b)))
    return out


def step(state: SwarmState, visibility: float, law, dt: float,
         merge_radius: Optional[float] = None):
    """One synchronous Euler step followed by the merge pass.

    All velocities come from the pre-step positions.  Returns the new state
    and the merge / visibility-change events it produced.
    """
    check_step_params(visibility, law, dt)
    if merge_radius is None:
        merge_radius = default_merge_radius(law.speed_scale / 2, dt)
    vel, _, vis = velocities(state.positions, visibility, law)
    before = _edge_ids(vis, state.ids)
    moved = SwarmState(state.time + dt, state.ids,
                       state.positions + dt * vel, state.multiplicity)
    new, events, absorbed = merge_coincident(moved, merge_radius)
    vis2 = pairwise(new.positions, visibility)[2]
    after = _edge_ids(vis2, new.ids)
    prior = _remap(before, absorbed)
    events += [SimEvent(new.time, EDGE_ADDED, e) for e in sorted(after - prior)]
    events += [SimEvent(new.time, CONNECTIVITY_VIOLATION, e)
               for e in sorted(prior - after)]
    return new, events


# --------------------------------------------------------------------------
# full runs


@dataclass(frozen=True, eq=False)
class TrajectorySample:
    time: float
    ids: tuple[int, ...]
    positions: np.ndarray
    velocities: np.ndarray
    multiplicity: tuple[int, ...]


@dataclass(eq=False)
class RunResult:
    scenario: object
    law: object
    samples: list[TrajectorySample]
    metrics: list[MetricsRecord]
    events: list[SimEvent]
    termination: str
    t_end: float
    steps: int
    ledger: ConnectivityLedger
    L0: float
    toggles: int = 0
    max_step_displacement: float = 0.0
    final_state: Optional[SwarmState] = field(default=None, repr=False)

    @property
    def gathered(self) -> bool:
        return self.termination == "gathered"

    @property
    def t_gathered(self) -> Optional[float]:
        return self.t_end if self.gathered else None

    def events_of(self, kind: str) -> list[SimEvent]:
        return [e for e in self.events if e.kind == kind]


def _hull_ids(state: SwarmState) -> frozenset:
    pos = state.positions.tolist()
    where = {tuple(p): int(i) for p, i in zip(pos, state.ids)}
    return frozenset(where[v] for v in hull_vertices(pos))


def _connected(vis: np.ndarray) -> bool:
    n = len(vis)
    if n <= 1:
        return True
    reach = np.zeros(n, dtype=bool)
    reach[0] = True
    frontier = reach.copy()
    while frontier.any():
        nxt = vis[frontier].any(axis=0) & ~reach
        reach |= nxt
        frontier = nxt
    return bool(reach.all())


def simulate(scenario, law=None, allow_disconnected: bool = False,
             record_trajectory: bool = True) -> RunResult:
    """Run a scenario until one agent remains or ``t_max`` is reached.

    Metrics and trajectory rows are sampled every ``metrics_every`` steps
    and once more at termination.  ``law`` overrides the scenario's speed
    law tag (needed for :class:`GeneralGain`).
    """
    if law is None:
        law = make_law(scenario.speed_law, scenario.v0)
    V, dt = float(scenario.visibility), float(scenario.dt)
    check_step_params(V, law, dt)
    every = int(scenario.metrics_every)
    if every < 1:
        raise ConfigurationError("metrics_every must be >= 1")
    radius = float(scenario.merge_radius)

    state = SwarmState.initial(scenario.positions)
    if state.n_live == 0:
        raise ConfigurationError("scenario has no agents")
    state, events, _ = merge_coincident(state, radius)
    ledger = ConnectivityLedger.from_state(state.ids, state.positions, V)

    samples: list[TrajectorySample] = []
    metrics: list[MetricsRecord] = []
    prev_edges: Optional[set] = None
    prev_movable: dict[int, bool] = {}
    absorbed: dict[int, int] = {}
    k_history: list[int] = []
    toggles = 0
    max_disp = 0.0
    k = 0
    termination = "timed_out"
    while True:
        t = k * dt
        vel, movable, vis = velocities(state.positions, V, law)
        if k == 0 and not _connected(vis) and not allow_disconnected:
            raise DisconnectedError("initial visibility graph is not connected")

        edges = _edge_ids(vis, state.ids)
        if prev_edges is not None:
            prior = _remap(prev_edges, absorbed)
            events += [SimEvent(t, EDGE_ADDED, e) for e in sorted(edges - prior)]
            events += [SimEvent(t, CONNECTIVITY_VIOLATION, e)
                       for e in sorted(prior - edges)]
        mov = dict(zip(state.ids, movable.tolist()))
        for i, m in mov.items():
            if i in prev_movable and prev_movable[i] != m:
                toggles += 1
                events.append(SimEvent(t, SURROUNDED_TOGGLE, (i, "movable" if m else "surrounded")))
        prev_edges, prev_movable = edges, mov

        done = state.n_live == 1
        timed_out = not done and t >= scenario.t_max
        if k % every == 0 or done or timed_out:
            rec = hull_metrics(
                state, metrics[-1] if metrics else None,
                gain_floor=law.gain_floor,
                surrounded_count=int((~movable).sum()),
                toggle_count_cum=toggles, connectivity_ok=_connected(vis),
                k_history=k_history)
            metrics.append(rec)
            k_history = [_hull_ids(state)]
            if record_trajectory:
                samples.append(TrajectorySample(
                    t, state.ids, state.positions.copy(), vel, state.multiplicity))
        if done:
            termination = "gathered"
            break
        if timed_out:
            break

        new_pos = state.positions + dt * vel
        # dt*|v| rather than a position difference, which carries coordinate roundoff
        disp = dt * np.hypot(vel[:, 0], vel[:, 1])
        max_disp = max(max_disp, float(disp.max()))
        ledger.observe(t + dt, state.ids, state.positions, new_pos)
        k += 1
        moved = SwarmState(k * dt, state.ids, new_pos, state.multiplicity)
        state, mev, absorbed = merge_coincident(moved, radius)
        events += mev
        if absorbed:
            ledger.merged(absorbed)
        k_history.append(_hull_ids(state))

    return RunResult(
        scenario=scenario, law=law, samples=samples, metrics=metrics,
        events=events, termination=termination, t_end=k * dt, steps=k,
        ledger=ledger, L0=metrics[0].L, toggles=toggles,
        max_step_displacement=max_disp, final_state=state,
    )
