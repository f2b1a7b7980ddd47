"""Synchronous and asynchronous fellow traveling, and synchronization.

All checks run on integer times. A path frozen at its endpoint after its
length is what makes paths of different lengths comparable. Continuous
constants are reported as the integer bound plus one.
"""
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from cayley import DistanceOracle
from presentation import ConstantViolation, PremiseViolation, Word
from solvers import ElementKey, WordSolver

logger = logging.getLogger(__name__)


def positions(solver: WordSolver, w: Word, start: Optional[ElementKey] = None) -> list[ElementKey]:
    """Vertices w(0), ..., w(|w|) of a path starting at `start`."""
    key = solver.identity if start is None else start
    out = [key]
    for letter in w:
        key = solver.step(key, letter)
        out.append(key)
    return out


def _at(path: Sequence[ElementKey], t: int) -> ElementKey:
    return path[min(t, len(path) - 1)]


@dataclass(frozen=True)
class SyncReport:
    verdict: bool
    k: int
    max_distance: Optional[int]
    first_violation: Optional[int]

    @property
    def constant(self) -> int:
        """Continuous constant: integer bound plus one."""
        return self.k + 1

    def __bool__(self) -> bool:
        return self.verdict


def sync_ft(oracle: DistanceOracle, w: Word, u: Word, k: int,
            start_w: Optional[ElementKey] = None, start_u: Optional[ElementKey] = None) -> SyncReport:
    """Check d(w(t), u(t)) <= k at every integer t up to max(|w|, |u|)."""
    pw = positions(oracle.solver, w, start_w)
    pu = positions(oracle.solver, u, start_u)
    worst = 0
    for t in range(max(len(w), len(u)) + 1):
        d = oracle.distance(_at(pw, t), _at(pu, t), cutoff=k)
        if d is None:
            logger.debug(f"sync_ft({w}, {u}, {k}) fails at t={t}")
            return SyncReport(False, k, worst, t)
        worst = max(worst, d)
    return SyncReport(True, k, worst, None)


def sync_ft_independent(solver: WordSolver, w: Word, u: Word, k: int,
                        start_w: Optional[ElementKey] = None,
                        start_u: Optional[ElementKey] = None) -> bool:
    """Uncached recheck of sync_ft using bidirectional BFS for every pair."""
    from cayley import bounded_distance

    pw = positions(solver, w, start_w)
    pu = positions(solver, u, start_u)
    return all(
        bounded_distance(solver, _at(pw, t), _at(pu, t), cutoff=k) is not None
        for t in range(max(len(w), len(u)) + 1)
    )


@dataclass(frozen=True)
class Reparameterization:
    """Monotone map φ: {0..n} -> {0..m} with φ(0) = 0 and φ(n) = m."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = self.values
        if not vals:
            raise ValueError("empty reparameterization")
        if vals[0] != 0:
            raise ValueError("φ(0) must be 0")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("φ must be nondecreasing")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def m(self) -> int:
        return self.values[-1]

    def __call__(self, t: int) -> int:
        return self.values[min(max(t, 0), self.n)]

    @classmethod
    def identity(cls, n: int, m: int) -> "Reparameterization":
        return cls(tuple(min(t, m) for t in range(n)) + (m,))

    @classmethod
    def from_coupling(cls, coupling: Sequence[tuple[int, int]], n: int, m: int) -> "Reparameterization":
        """Least j per row i of a monotone grid path, endpoints clamped."""
        least = [None] * (n + 1)
        for i, j in coupling:
            if least[i] is None or j < least[i]:
                least[i] = j
        values = [0 if v is None else v for v in least]
        values[0] = 0
        values[n] = m
        for t in range(1, n + 1):
            values[t] = max(values[t], values[t - 1])
        return cls(tuple(values))


def _distance_grid(oracle: DistanceOracle, pw, pu, k: int) -> np.ndarray:
    ok = np.zeros((len(pw), len(pu)), dtype=bool)
    for i, x in enumerate(pw):
        for j, y in enumerate(pu):
            ok[i, j] = oracle.distance(x, y, cutoff=k) is not None
    return ok


def async_ft(oracle: DistanceOracle, w: Word, u: Word, k: int,
             start_w: Optional[ElementKey] = None,
             start_u: Optional[ElementKey] = None) -> Optional[Reparameterization]:
    """Monotone grid path from (0,0) to (|w|,|u|) through cells within k.

    Moves are (i+1,j), (i,j+1) and (i+1,j+1), as in discrete Fréchet
    distance. Returns the induced reparameterization, or None.
    """
    pw = positions(oracle.solver, w, start_w)
    pu = positions(oracle.solver, u, start_u)
    n, m = len(w), len(u)
    ok = _distance_grid(oracle, pw, pu, k)

    reach = np.zeros((n + 1, m + 1), dtype=bool)
    prev = np.full((n + 1, m + 1, 2), -1, dtype=np.int64)
    reach[0, 0] = ok[0, 0]
    for i in range(n + 1):
        for j in range(m + 1):
            if (i == 0 and j == 0) or not ok[i, j]:
                continue
            for pi, pj in ((i - 1, j - 1), (i - 1, j), (i, j - 1)):
                if pi >= 0 and pj >= 0 and reach[pi, pj]:
                    reach[i, j] = True
                    prev[i, j] = (pi, pj)
                    break
    if not reach[n, m]:
        return None

    coupling = []
    i, j = n, m
    while i >= 0 and j >= 0:
        coupling.append((i, j))
        if i == 0 and j == 0:
            break
        i, j = (int(x) for x in prev[i, j])
    coupling.reverse()
    return Reparameterization.from_coupling(coupling, n, m)


def frechet_constant(oracle: DistanceOracle, w: Word, u: Word, k_max: int,
                     start_w: Optional[ElementKey] = None,
                     start_u: Optional[ElementKey] = None) -> Optional[int]:
    """Least k <= k_max at which async_ft succeeds (monotone in k)."""
    for k in range(k_max + 1):
        if async_ft(oracle, w, u, k, start_w, start_u) is not None:
            return k
    return None


class SyncCase(IntEnum):
    CLOSE = 1
    LAGGING = 2
    LEADING = 3


@dataclass(frozen=True)
class SyncResult:
    """Output of synchronize: a synchronous fellow traveler of w."""

    word: Word
    start: ElementKey
    case: SyncCase
    constant: int
    j: Optional[int] = None
    l: Optional[int] = None
    p1: Optional[Word] = None
    p2: Optional[Word] = None

    def trace(self) -> dict:
        return {
            "case": int(self.case),
            "word": str(self.word),
            "constant": self.constant,
            "j": self.j,
            "l": self.l,
            "p1": None if self.p1 is None else str(self.p1),
            "p2": None if self.p2 is None else str(self.p2),
        }


def synchronize(oracle: DistanceOracle, w: Word, u: Word, phi: Reparameterization, k: int,
                start_w: Optional[ElementKey] = None,
                start_u: Optional[ElementKey] = None) -> SyncResult:
    """Turn an asynchronous fellow traveler u of the loop w into a synchronous one.

    Case 1 (|t - φ(t)| <= 2k everywhere) returns u at constant 3k+1.
    Case 2 (u lags by more than 2k) splices u between two connectors and
    returns a loop shorter than w at constant 6k+1. Case 3 (u leads by more
    than 2k) does the same at constant 5k+2.

    Raises:
        PremiseViolation: If |u| >= |w|, k < 1, φ has the wrong shape, or
            the asynchronous premise fails.
        ConstantViolation: If the result fails its own synchronous check.
    """
    solver = oracle.solver
    n, m = len(w), len(u)
    if k < 1:
        raise PremiseViolation("synchronize needs k >= 1")
    if m >= n:
        raise PremiseViolation(f"u must be shorter than w ({m} >= {n})")
    if phi.n != n or phi.m != m:
        raise PremiseViolation(f"φ maps {{0..{phi.n}}} to {{0..{phi.m}}}, expected {n} -> {m}")

    pw = positions(solver, w, start_w)
    pu = positions(solver, u, start_u)
    for t in range(n + 1):
        if oracle.distance(pw[t], pu[phi(t)], cutoff=k) is None:
            raise PremiseViolation(f"d(w({t}), u(φ({t}))) > {k}")

    lag = [t - phi(t) for t in range(n + 1)]
    lagging = [t for t in range(n + 1) if lag[t] > 2 * k]
    leading = [t for t in range(n + 1) if -lag[t] > 2 * k]

    if lagging:
        j = lagging[0]
        l = max(i for i in range(j) if j - i > phi(j) - phi(i) + 2 * k)
        p1 = oracle.geodesic(pw[l], pu[phi(l)])
        p2 = oracle.geodesic(pu[phi(j)], pw[j])
        v = w[:l] + p1 + u[phi(l):phi(j)] + p2 + w[j:]
        result = SyncResult(v, pw[0], SyncCase.LAGGING, 6 * k + 1, j=j, l=l, p1=p1, p2=p2)
        bound = 6 * k
    elif leading:
        j = leading[-1]
        p1 = oracle.geodesic(pw[j], pu[phi(j)])
        p2 = oracle.geodesic(pu[m], pw[n])
        v = w[:j] + p1 + u[phi(j):] + p2
        result = SyncResult(v, pw[0], SyncCase.LEADING, 5 * k + 2, j=j, p1=p1, p2=p2)
        bound = 5 * k + 1
    else:
        result = SyncResult(u, pu[0], SyncCase.CLOSE, 3 * k + 1)
        bound = 3 * k

    if result.case != SyncCase.CLOSE and len(result.word) >= n:
        raise ConstantViolation(f"case {int(result.case)} output has length {len(result.word)} >= {n}")
    report = sync_ft(oracle, w, result.word, bound, start_w=pw[0], start_u=result.start)
    if not report:
        raise ConstantViolation(
            f"case {int(result.case)} output fails sync_ft at {bound} (t={report.first_violation})"
        )
    logger.debug(f"synchronize: case {int(result.case)}, |v|={len(result.word)}, constant {result.constant}")
    return result
