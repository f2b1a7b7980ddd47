"""Metric structure of Cayley graphs: balls, distances and geodesics.

Balls are built breadth first with letters tried in alphabet order, so the
parent pointers spell the shortlex-least geodesic of every element.
"""
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterator, Optional, Sequence, Union

import numpy as np
from scipy import sparse

from chunker import chunk_items
from config import MEMORY_BUDGET
from presentation import BudgetExceeded, RadiusShortfall, Word
from solvers import ElementKey, WordSolver

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_EMPTY = object()


def stable_hash(key: ElementKey) -> int:
    """64-bit hash of a key that is identical across runs and platforms."""
    digest = hashlib.blake2b(repr(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class KeyTable:
    """Open-addressing table from element keys to small integer ids.

    Slots are addressed by a stable 64-bit hash with linear probing; a slot
    only matches when the stored key compares equal, never on hash alone.
    """

    def __init__(self, hash_fn: Callable[[ElementKey], int] = stable_hash):
        self._hash_fn = hash_fn
        self._slots: dict[int, ElementKey] = {}
        self._ids: dict[int, int] = {}
        self._keys: list[ElementKey] = []
        self.probes = 0

    def _locate(self, key: ElementKey) -> tuple[int, bool]:
        slot = self._hash_fn(key) & _MASK64
        while True:
            existing = self._slots.get(slot, _EMPTY)
            if existing is _EMPTY:
                return slot, False
            if existing == key:
                return slot, True
            self.probes += 1
            slot = (slot + 1) & _MASK64

    def get(self, key: ElementKey) -> Optional[int]:
        slot, found = self._locate(key)
        return self._ids[slot] if found else None

    def insert(self, key: ElementKey) -> tuple[int, bool]:
        """Return (id, inserted); existing keys keep their id."""
        slot, found = self._locate(key)
        if found:
            return self._ids[slot], False
        ident = len(self._keys)
        self._slots[slot] = key
        self._ids[slot] = ident
        self._keys.append(key)
        return ident, True

    def __contains__(self, key: ElementKey) -> bool:
        return self._locate(key)[1]

    def __len__(self) -> int:
        return len(self._keys)

    def key(self, ident: int) -> ElementKey:
        return self._keys[ident]

    def keys(self) -> list[ElementKey]:
        return list(self._keys)


class BallIndex:
    """Elements within distance `radius` of the identity.

    Ids follow BFS discovery order, so sphere d is a contiguous id range.
    """

    def __init__(self, solver: WordSolver, radius: int, table: KeyTable,
                 distances: list[int], parents: list[int], parent_letters: list[Optional[str]],
                 sphere_starts: list[int], neighbors: np.ndarray):
        self.solver = solver
        self.alphabet = solver.alphabet
        self.radius = radius
        self.table = table
        self._dist = distances
        self._parent = parents
        self._parent_letter = parent_letters
        self._sphere_starts = sphere_starts
        self._neighbors = neighbors
        self._adjacency = None

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, key: ElementKey) -> bool:
        return key in self.table

    @property
    def identity(self) -> ElementKey:
        return self.table.key(0)

    def index_of(self, key: ElementKey) -> Optional[int]:
        return self.table.get(key)

    def distance(self, key: ElementKey) -> Optional[int]:
        ident = self.table.get(key)
        return None if ident is None else self._dist[ident]

    def parent_letter(self, key: ElementKey) -> Optional[str]:
        ident = self.table.get(key)
        return None if ident is None else self._parent_letter[ident]

    def sphere(self, d: int) -> list[ElementKey]:
        if d < 0 or d > self.radius:
            return []
        start, end = self._sphere_starts[d], self._sphere_starts[d + 1]
        return [self.table.key(i) for i in range(start, end)]

    def sphere_sizes(self) -> list[int]:
        return [self._sphere_starts[d + 1] - self._sphere_starts[d] for d in range(self.radius + 1)]

    def keys(self, max_distance: Optional[int] = None) -> list[ElementKey]:
        end = len(self.table) if max_distance is None else self._sphere_starts[min(max_distance, self.radius) + 1]
        return [self.table.key(i) for i in range(end)]

    def path_to(self, key: ElementKey) -> Word:
        """Shortlex-least geodesic word from the identity to key."""
        ident = self.table.get(key)
        if ident is None:
            raise RadiusShortfall(f"Element is outside B({self.radius})", available=self.radius)
        letters = []
        while ident != 0:
            letters.append(self._parent_letter[ident])
            ident = self._parent[ident]
        return Word(tuple(reversed(letters)), self.alphabet)

    def neighbor_id(self, ident: int, letter_index: int) -> Optional[int]:
        nbr = int(self._neighbors[ident, letter_index])
        if nbr >= 0:
            return nbr
        # Outer sphere rows are filled lazily.
        key = self.solver.step(self.table.key(ident), self.alphabet.letters[letter_index])
        found = self.table.get(key)
        return found

    def trace(self, word: Word) -> Optional[ElementKey]:
        """Follow a word along ball edges; None if it leaves the ball.

        Edges are solver.step results, cached at build time or looked up
        lazily on the outer sphere.
        """
        ident = 0
        for letter in word:
            ident = self.neighbor_id(ident, self.alphabet.index(letter))
            if ident is None:
                return None
        return self.table.key(ident)

    def adjacency(self) -> sparse.csr_matrix:
        """Unweighted adjacency of the induced subgraph on the ball."""
        if self._adjacency is None:
            n = len(self.table)
            rows, cols = [], []
            for ident in range(n):
                for li in range(len(self.alphabet)):
                    nbr = self.neighbor_id(ident, li)
                    if nbr is not None and nbr != ident:
                        rows.append(ident)
                        cols.append(nbr)
            data = np.ones(len(rows), dtype=np.int8)
            self._adjacency = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        return self._adjacency


def _expand_chunk(solver: WordSolver, keys: Sequence[ElementKey], letters: Sequence[str]):
    return [[solver.step(key, letter) for letter in letters] for key in keys]


def build_ball(solver: WordSolver, radius: int, budget: Optional[int] = None,
               workers: int = 1, hash_fn: Callable[[ElementKey], int] = stable_hash) -> BallIndex:
    """Breadth-first ball of the given radius around the identity.

    Args:
        solver: Word-problem backend supplying keys and edges
        radius: Ball radius N >= 0
        budget: Maximum number of entries (defaults to the configured cap)
        workers: Threads used to expand each frontier
        hash_fn: Slot hash for the key table

    Returns:
        BallIndex with exact distances

    Raises:
        BudgetExceeded: If the ball outgrows the budget; carries the
            largest radius that was completed.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    budget = MEMORY_BUDGET if budget is None else budget
    letters = solver.alphabet.letters

    table = KeyTable(hash_fn)
    table.insert(solver.identity)
    distances = [0]
    parents = [-1]
    parent_letters: list[Optional[str]] = [None]
    sphere_starts = [0, 1]
    neighbor_rows: list[list[int]] = []

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for d in range(radius):
            start, end = sphere_starts[d], sphere_starts[d + 1]
            frontier = [table.key(i) for i in range(start, end)]
            if executor is not None:
                chunks = chunk_items(frontier, workers)
                expanded = []
                for part in executor.map(lambda c: _expand_chunk(solver, c, letters), chunks):
                    expanded.extend(part)
            else:
                expanded = _expand_chunk(solver, frontier, letters)

            # Merge in frontier order so ids and parents do not depend on threads.
            for offset, neighbors in enumerate(expanded):
                ident = start + offset
                row = []
                for letter, nbr in zip(letters, neighbors):
                    nid, inserted = table.insert(nbr)
                    if inserted:
                        distances.append(d + 1)
                        parents.append(ident)
                        parent_letters.append(letter)
                        if len(table) > budget:
                            raise BudgetExceeded(
                                f"Ball exceeded {budget} entries while building radius {d + 1}",
                                largest_radius=d,
                                explored=len(table),
                            )
                    row.append(nid)
                neighbor_rows.append(row)
            sphere_starts.append(len(table))
            logger.info(f"Ball layer {d + 1}: {sphere_starts[-1] - sphere_starts[-2]} elements ({len(table)} total)")
    finally:
        if executor is not None:
            executor.shutdown()

    neighbors = np.full((len(table), len(letters)), -1, dtype=np.int64)
    if neighbor_rows:
        neighbors[:len(neighbor_rows)] = np.array(neighbor_rows, dtype=np.int64)
    return BallIndex(solver, radius, table, distances, parents, parent_letters, sphere_starts, neighbors)


def distance(ball: BallIndex, x: ElementKey) -> Optional[int]:
    """Exact distance from the identity if x is in the ball, else None."""
    return ball.distance(x)


def bounded_distance(solver: WordSolver, x: ElementKey, y: ElementKey,
                     cutoff: Optional[int] = None) -> Optional[int]:
    """d(x, y) if at most cutoff, by bidirectional BFS on generated neighbors."""
    if x == y:
        return 0
    if cutoff is not None and cutoff <= 0:
        return None
    letters = solver.alphabet.letters
    seen = [{x: 0}, {y: 0}]
    frontiers = [[x], [y]]
    depths = [0, 0]
    while cutoff is None or depths[0] + depths[1] < cutoff:
        side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
        if not frontiers[side]:
            return None
        mine, other = seen[side], seen[1 - side]
        nxt = []
        best = None
        for key in frontiers[side]:
            for letter in letters:
                nk = solver.step(key, letter)
                if nk in mine:
                    continue
                mine[nk] = depths[side] + 1
                nxt.append(nk)
                if nk in other:
                    total = depths[side] + 1 + other[nk]
                    best = total if best is None else min(best, total)
        if best is not None:
            return best if cutoff is None or best <= cutoff else None
        frontiers[side] = nxt
        depths[side] += 1
    return None


class DistanceOracle:
    """Cached distances d(x, y) = d(1, x⁻¹y) over a ball around the identity.

    Beyond the ball radius r, norms up to 2r are found by meeting in the
    middle against the ball; larger cutoffs fall back to bidirectional BFS.
    """

    def __init__(self, solver: WordSolver, radius: int, ball: Optional[BallIndex] = None,
                 budget: Optional[int] = None, workers: int = 1):
        if ball is None or ball.radius < radius:
            ball = build_ball(solver, radius, budget=budget, workers=workers)
        self.solver = solver
        self.ball = ball
        self.radius = ball.radius
        self._cache: dict[tuple[ElementKey, Optional[int]], Optional[int]] = {}

    def norm(self, key: ElementKey, cutoff: Optional[int] = None) -> Optional[int]:
        d = self.ball.distance(key)
        if d is not None:
            return d if cutoff is None or d <= cutoff else None
        r = self.radius
        if cutoff is not None and cutoff <= r:
            return None
        cache_key = (key, cutoff)
        if cache_key in self._cache:
            return self._cache[cache_key]
        result = self._meet_in_middle(key, cutoff)
        self._cache[cache_key] = result
        return result

    def _meet_in_middle(self, key: ElementKey, cutoff: Optional[int]) -> Optional[int]:
        r = self.radius
        limit = 2 * r if cutoff is None else min(cutoff, 2 * r)
        for e in range(1, limit - r + 1):
            best = None
            for g in self.ball.sphere(e):
                dh = self.ball.distance(self.solver.multiply(key, g))
                if dh is not None and (best is None or e + dh < best):
                    best = e + dh
            if best is not None:
                return best
        if cutoff is not None and cutoff <= 2 * r:
            return None
        return bounded_distance(self.solver, self.solver.identity, key, cutoff)

    def distance(self, x: ElementKey, y: ElementKey, cutoff: Optional[int] = None) -> Optional[int]:
        if x == y:
            return 0
        return self.norm(self.solver.multiply(self.solver.inverse(x), y), cutoff)

    def within(self, x: ElementKey, y: ElementKey, k: int) -> bool:
        return self.distance(x, y, cutoff=k) is not None

    def geodesic(self, x: ElementKey, y: ElementKey) -> Word:
        """A geodesic word from x to y; shortlex-least when it fits in the ball.

        Raises:
            RadiusShortfall: If d(x, y) exceeds twice the ball radius.
        """
        diff = self.solver.multiply(self.solver.inverse(x), y)
        if diff in self.ball:
            return self.ball.path_to(diff)
        d = self.norm(diff, cutoff=2 * self.radius)
        if d is None:
            raise RadiusShortfall(
                f"Connector longer than {2 * self.radius} needs a larger ball",
                available=self.radius,
            )
        e = d - self.radius
        for g in self.ball.sphere(e):
            h = self.solver.multiply(diff, g)
            if self.ball.distance(h) == self.radius:
                return self.ball.path_to(h) + self.ball.path_to(self.solver.inverse(g))
        raise RadiusShortfall("Meet-in-the-middle split not found", available=self.radius)


Metric = Union[BallIndex, DistanceOracle, WordSolver]


def is_geodesic(metric: Metric, w: Word) -> bool:
    """True iff the word's length equals the distance to its endpoint.

    Raises:
        RadiusShortfall: If a ball is too small to decide.
    """
    if len(w) == 0:
        return True
    if isinstance(metric, DistanceOracle):
        key = metric.solver.eval(w)
        return metric.norm(key, cutoff=len(w)) == len(w)
    if isinstance(metric, BallIndex):
        key = metric.solver.eval(w)
        d = metric.distance(key)
        if d is not None:
            return d == len(w)
        if len(w) <= metric.radius + 1:
            return True
        raise RadiusShortfall(
            f"Word of length {len(w)} leaves B({metric.radius})",
            needed=len(w), available=metric.radius,
        )
    key = metric.eval(w)
    return bounded_distance(metric, metric.identity, key, cutoff=len(w) - 1) is None


def geodesics_to(ball: BallIndex, x: ElementKey) -> Iterator[Word]:
    """All geodesic words to x in shortlex order."""
    d = ball.distance(x)
    if d is None:
        raise RadiusShortfall("Element is outside the ball", available=ball.radius)
    solver = ball.solver
    inv = ball.alphabet.inv
    letters = ball.alphabet.letters

    # layers[i]: elements at distance i lying on some geodesic to x.
    layers: list[set] = [set() for _ in range(d + 1)]
    layers[d].add(x)
    for i in range(d, 0, -1):
        for key in layers[i]:
            for letter in letters:
                prev = solver.step(key, inv(letter))
                if ball.distance(prev) == i - 1:
                    layers[i - 1].add(prev)

    def extend(key, depth, prefix):
        if depth == d:
            yield Word(tuple(prefix), ball.alphabet)
            return
        for letter in letters:
            nk = solver.step(key, letter)
            if nk in layers[depth + 1]:
                prefix.append(letter)
                yield from extend(nk, depth + 1, prefix)
                prefix.pop()

    yield from extend(ball.identity, 0, [])


def neighborhood(solver: WordSolver, x: ElementKey, k: int) -> dict[ElementKey, int]:
    """Elements within distance k of x, with distances, in BFS order."""
    found = {x: 0}
    frontier = [x]
    for d in range(1, k + 1):
        nxt = []
        for key in frontier:
            for letter in solver.alphabet.letters:
                nk = solver.step(key, letter)
                if nk not in found:
                    found[nk] = d
                    nxt.append(nk)
        frontier = nxt
    return found


def growth_ratios(ball: BallIndex) -> np.ndarray:
    """Quotients |S(n+1)| / |S(n)|, a sanity check on growth only."""
    sizes = np.asarray(ball.sphere_sizes(), dtype=float)
    if sizes.size < 2:
        return np.array([])
    return sizes[1:] / sizes[:-1]


def ball_payload(ball: BallIndex, include_elements: bool = False) -> dict[str, Any]:
    payload: dict[str, Any] = {
        "radius": ball.radius,
        "sphere_sizes": ball.sphere_sizes(),
        "size": len(ball),
    }
    if include_elements:
        payload["elements"] = [
            {"word": str(ball.path_to(key)), "distance": ball.distance(key)}
            for key in ball.keys()
        ]
    return payload


def export_ball_json(ball: BallIndex, path, include_elements: bool = False):
    """Write ball.json: radius, sphere sizes and optionally every element."""
    from reports import write_payload

    write_payload(ball_payload(ball, include_elements), path)
