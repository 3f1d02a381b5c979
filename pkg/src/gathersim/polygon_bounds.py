"""Lower bounds on the cosine sum of convex-polygon interior angles.

For n angles in [0, pi] summing to (n - 2) pi the minimum of sum(cos x_i) is
attained with all nonzero angles equal and at most two zeros.  The 1-zero
case wins for n <= 6 and the no-zero (regular polygon) case for n >= 7.

This module evaluates that closed form, the pairwise descent process that
reduces any configuration to equal nonzero values, and a grid oracle that
minimises over the constraint set without using the closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

NONZERO = 1e-12
SUM_TOL = 1e-9


def _check_n(n: int, lo: int = 2) -> int:
    if int(n) != n or n < lo:
        raise InvalidInputError(f"n must be an integer >= {lo}, got {n!r}")
    return int(n)


def one_zero_value(n: int) -> float:
    return 1.0 + (n - 1) * math.cos((n - 2) * math.pi / (n - 1))


def no_zero_value(n: int) -> float:
    return n * math.cos((n - 2) * math.pi / n)


def two_zero_value(n: int) -> float:
    return float(4 - n)


def theorem1_bound(n: int) -> float:
    """C_n: minimum cosine sum of a convex n-gon's interior angles."""
    n = _check_n(n)
    return one_zero_value(n) if n <= 6 else no_zero_value(n)


def cos_sum_bounds(a: float, b: float) -> tuple[float, float]:
    """Bounds on ``cos a + cos b`` in terms of ``a + b`` only.

    ``lower`` is the pairwise bound used by the descent process (it is
    attained by zeroing one angle when ``a + b <= pi`` and by averaging
    otherwise); ``upper`` is the mirrored bound.
    """
    for x in (a, b):
        if not (0.0 <= x <= math.pi) or math.isnan(x):
            raise InvalidInputError(f"angle {x!r} outside [0, pi]")
    s = a + b
    one = 1.0 + math.cos(s)
    half = 2.0 * math.cos(s / 2.0)
    if s <= math.pi:
        return one, half
    return half, one


@dataclass(frozen=True)
class AngleConfig:
    angles: tuple[float, ...]

    def __post_init__(self):
        n = len(self.angles)
        if n < 2:
            raise InvalidInputError("an angle configuration needs n >= 2")
        for x in self.angles:
            if not (0.0 <= x <= math.pi):
                raise InvalidInputError(f"angle {x!r} outside [0, pi]")
        if abs(math.fsum(self.angles) - (n - 2) * math.pi) > SUM_TOL:
            raise InvalidInputError("angles must sum to (n - 2) pi")

    @property
    def n(self) -> int:
        return len(self.angles)

    @property
    def cos_sum(self) -> float:
        return math.fsum(math.cos(x) for x in self.angles)

    def nonzero(self) -> list[int]:
        return [i for i, x in enumerate(self.angles) if x > NONZERO]


def random_angle_config(n: int, rng: np.random.Generator) -> AngleConfig:
    """Uniform sample of the constraint polytope.

    The supplements ``pi - x_i`` are nonnegative and sum to 2 pi, so sample
    them uniformly on that simplex and reject any supplement above pi.
    """
    n = _check_n(n, 3)
    while True:
        y = rng.dirichlet(np.ones(n)) * 2.0 * math.pi
        if np.all(y <= math.pi):
            x = np.clip(math.pi - y, 0.0, math.pi)
            # push the rounding residue into the largest slack entry
            resid = (n - 2) * math.pi - math.fsum(x)
            j = int(np.argmin(np.abs(x - math.pi / 2)))
            x[j] = min(max(x[j] + resid, 0.0), math.pi)
            return AngleConfig(tuple(float(v) for v in x))


STEP_ZERO = "zero"
STEP_AVERAGE = "average"
STEP_CONVERGED = "converged"


def descent_step(config: AngleConfig) -> tuple[AngleConfig, str]:
    """One move of the pairwise descent process.

    Pairs are scanned lexicographically by index.  The first nonzero pair
    with ``x_i + x_j <= pi`` becomes ``(0, x_i + x_j)``; failing that, the
    smallest and largest nonzero values are replaced by their mean.  A
    configuration whose nonzero values are all equal is a fixed point.
    """
    x = list(config.angles)
    nz = config.nonzero()
    for a in range(len(nz)):
        i = nz[a]
        for j in nz[a + 1:]:
            if x[i] + x[j] <= math.pi:
                x[j] = x[i] + x[j]
                x[i] = 0.0
                return AngleConfig(tuple(x)), STEP_ZERO
    if not nz:
        return config, STEP_CONVERGED
    i = min(nz, key=lambda t: x[t])
    j = max(nz, key=lambda t: x[t])
    if x[i] == x[j]:
        return config, STEP_CONVERGED
    m = 0.5 * (x[i] + x[j])
    x[i] = x[j] = m
    return AngleConfig(tuple(x)), STEP_AVERAGE


def spread_energy(config: AngleConfig) -> float:
    """Sum of squared deviations of the nonzero angles from their mean."""
    vals = [config.angles[i] for i in config.nonzero()]
    if not vals:
        return 0.0
    m = math.fsum(vals) / len(vals)
    return math.fsum((v - m) ** 2 for v in vals)


@dataclass
class DescentRun:
    final: AngleConfig
    iterations: int
    cos_trace: list[float]
    kinds: list[str]
    energy_trace: list[float]
    nonzero_trace: list[int] = field(default_factory=list)
    converged: bool = False

    def averaging_ratios(self) -> list[tuple[int, float, float]]:
        """``(k, E_before, E_after)`` for each averaging move."""
        out = []
        for t, kind in enumerate(self.kinds):
            if kind == STEP_AVERAGE:
                out.append((self.nonzero_trace[t],
                            self.energy_trace[t], self.energy_trace[t + 1]))
        return out


def descent_run(config: AngleConfig, max_iters: int = 100_000,
                eps: float = 1e-10) -> DescentRun:
    """Iterate :func:`descent_step` until the nonzero angles agree within eps.

    Traces hold one entry per configuration visited (initial included).
    """
    cur = config
    cos_trace = [cur.cos_sum]
    energy = [spread_energy(cur)]
    nonzero = [len(cur.nonzero())]
    kinds: list[str] = []
    converged = False
    it = 0
    while it < max_iters:
        nz = cur.nonzero()
        vals = [cur.angles[i] for i in nz]
        pair_left = any(
            vals[a] + vals[b] <= math.pi
            for a in range(len(vals)) for b in range(a + 1, len(vals))
        )
        if not pair_left and (not vals or max(vals) - min(vals) <= eps):
            converged = True
            break
        cur, kind = descent_step(cur)
        if kind == STEP_CONVERGED:
            converged = True
            break
        it += 1
        kinds.append(kind)
        cos_trace.append(cur.cos_sum)
        energy.append(spread_energy(cur))
        nonzero.append(len(cur.nonzero()))
    return DescentRun(cur, it, cos_trace, kinds, energy, nonzero, converged)


def e_func(x: float) -> float:
    return math.cos(x) + x * math.sin(x)


def f_func(n: int) -> float:
    """one_zero minus two_zero; nonpositive for every n >= 2."""
    return n - 3 - (n - 1) * math.cos(math.pi / (n - 1))


def h_func(n: int) -> float:
    """one_zero minus no_zero; changes sign between n = 6 and n = 7."""
    return n * math.cos(2 * math.pi / n) - (n - 1) * math.cos(math.pi / (n - 1)) + 1


CASES = ("one_zero", "no_zero", "two_zero")


@dataclass(frozen=True)
class CaseValues:
    n: int
    two_zero: float
    one_zero: float
    no_zero: float

    def as_dict(self) -> dict[str, float]:
        return {c: getattr(self, c) for c in CASES}

    @property
    def minimum(self) -> float:
        return min(self.one_zero, self.no_zero, self.two_zero)

    def ties(self, tol: float = 1e-12) -> tuple[str, ...]:
        m = self.minimum
        return tuple(c for c, v in self.as_dict().items() if v - m <= tol)

    @property
    def argmin(self) -> str:
        # on ties prefer the order of CASES
        return self.ties()[0]


def case_values(n: int) -> CaseValues:
    n = _check_n(n)
    return CaseValues(n, two_zero_value(n), one_zero_value(n), no_zero_value(n))


def breakpoint_scan(n_max: int) -> list[dict]:
    """Per-n winning case, tie set and the comparator functions f and h."""
    if n_max < 7:
        raise InvalidInputError("n_max must be >= 7 to include the breakpoint")
    rows = []
    for n in range(2, n_max + 1):
        cv = case_values(n)
        rows.append({
            "n": n,
            "argmin": cv.argmin,
            "ties": cv.ties(),
            "f": f_func(n),
            "h": h_func(n),
            "bound": theorem1_bound(n),
        })
    return rows


@dataclass
class OracleResult:
    value: float
    config: AngleConfig
    grid_value: float
    resolution: float
    coarse: bool


def _grid_min(n: int, h: float):
    """Exact minimum of sum(cos) over the h-grid with the last angle free.

    The first n - 1 angles range over {0, h, 2h, ...} plus pi; the last is
    fixed by the sum constraint and must land in [0, pi].  Enumeration of
    all combinations is done stage by stage as a min-plus recursion over
    the partial sum, which visits every grid combination implicitly.
    Partial sums are kept exact as ``a*h + b*pi`` with integer (a, b).
    """
    total = (n - 2) * math.pi
    m = int(math.floor(math.pi / h))
    extra_pi = math.pi - m * h > 1e-15
    a_max = int(math.floor(total / h)) + 1
    b_max = n - 1
    inf = math.inf
    best = np.full((a_max + 1, b_max + 1), inf)
    best[0, 0] = 0.0
    choices = []
    for _ in range(n - 1):
        new = np.full_like(best, inf)
        pick = np.full(best.shape, -1, dtype=np.int64)
        for idx in range(m + 1):
            c = math.cos(idx * h)
            cand = best[: a_max + 1 - idx, :] + c
            tgt = new[idx:, :]
            better = cand < tgt
            tgt[better] = cand[better]
            pick[idx:, :][better] = idx
        if extra_pi:
            cand = best[:, :-1] - 1.0
            tgt = new[:, 1:]
            better = cand < tgt
            tgt[better] = cand[better]
            pick[:, 1:][better] = m + 1
        best = new
        choices.append(pick)
    a_idx, b_idx = np.meshgrid(np.arange(a_max + 1), np.arange(b_max + 1),
                               indexing="ij")
    last = total - (a_idx * h + b_idx * math.pi)
    ok = np.isfinite(best) & (last >= -1e-12) & (last <= math.pi + 1e-12)
    last = np.clip(last, 0.0, math.pi)
    val = np.where(ok, best + np.cos(last), inf)
    a, b = np.unravel_index(int(np.argmin(val)), val.shape)
    out_val = float(val[a, b])
    cfg = [float(last[a, b])]
    for pick in reversed(choices):
        idx = int(pick[a, b])
        if idx == m + 1:
            cfg.append(math.pi)
            b -= 1
        else:
            cfg.append(idx * h)
            a -= idx
    return out_val, cfg[::-1]


def _refine(x: list[float], start: float, rounds: int) -> list[float]:
    """Pairwise exchange moves x_i += d, x_j -= d.

    Each round sweeps all ordered pairs at the current step until no move
    helps, then halves the step.
    """
    n = len(x)
    delta = start
    for _ in range(rounds):
        for _sweep in range(1000):
            improved = False
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    d = min(delta, math.pi - x[i], x[j])
                    if d <= 0.0:
                        continue
                    gain = (math.cos(x[i] + d) + math.cos(x[j] - d)
                            - math.cos(x[i]) - math.cos(x[j]))
                    if gain < 0.0:
                        x[i] += d
                        x[j] -= d
                        improved = True
            if not improved:
                break
        delta *= 0.5
        if delta < 1e-15:
            break
    return x


def brute_force_min(n: int, resolution: float = 0.01,
                    refine_rounds: int = 200) -> OracleResult:
    """Grid oracle for the minimum cosine sum over the constraint set.

    Independent of the closed form: exhaustive over an angular grid of
    spacing ``resolution`` followed by pairwise exchange refinement.
    ``coarse`` flags resolutions above 0.02, for which the result is not
    authoritative.
    """
    n = _check_n(n, 3)
    if n > 8:
        raise InvalidInputError("brute force oracle supports 3 <= n <= 8")
    if not resolution > 0:
        raise InvalidInputError("resolution must be positive")
    grid_val, cfg = _grid_min(n, resolution)
    x = _refine(list(cfg), resolution, refine_rounds)
    # rebalance the rounding residue of the exchange moves
    resid = (n - 2) * math.pi - math.fsum(x)
    j = max(range(n), key=lambda t: min(x[t], math.pi - x[t]))
    x[j] = min(max(x[j] + resid, 0.0), math.pi)
    config = AngleConfig(tuple(x))
    value = config.cos_sum
    return OracleResult(value, config, grid_val, resolution, resolution > 0.02)
