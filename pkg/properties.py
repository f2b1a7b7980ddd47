"""Finite-radius checkers for FFTP, LSP, BLSP and almost convexity.

Every verdict is parameterized by its constants and bounds and never
claims more than the finite search establishes. Also here: quadratic
filling certificates by iterated shortening, and the construction of
short in-ball connectors from basepoint loop shortenings.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from scipy.sparse.csgraph import dijkstra

from cayley import BallIndex, DistanceOracle, is_geodesic, neighborhood
from chunker import chunk_prefixes
from fellow import positions, sync_ft
from presentation import (
    BudgetExceeded,
    ConstantViolation,
    PremiseViolation,
    RadiusShortfall,
    ShorteningUnavailable,
    StuckLoop,
    Word,
    free_reduce,
    invert,
)
from reports import ordered_merge
from solvers import ElementKey, WordSolver

logger = logging.getLogger(__name__)

DEFAULT_STATE_BUDGET = 5_000_000


class Outcome(str, Enum):
    HOLDS = "holds-up-to-bound"
    COUNTEREXAMPLE = "counterexample"


@dataclass
class Verdict:
    """Finite-scale result of a property check."""

    property: str
    outcome: Outcome
    k: Optional[int] = None
    bound: dict[str, int] = field(default_factory=dict)
    quantifier: str = ""
    witness: Optional[dict[str, Any]] = None
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.outcome == Outcome.HOLDS

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["outcome"] = self.outcome.value
        return data


@dataclass(frozen=True)
class Shortening:
    """A shorter path u with the given start that fellow travels the input."""

    word: Word
    start: ElementKey
    k: int


# =============================================================================
# SHORTENING SEARCH
# =============================================================================

def _lockstep(oracle: DistanceOracle, pw: Sequence[ElementKey], start: ElementKey,
              end: ElementKey, k: int, prefer: str = "shortest",
              state_budget: int = DEFAULT_STATE_BUDGET) -> Optional[Word]:
    """Shorter path start -> end synchronously k-fellow traveling pw.

    Layer t holds every vertex u(t) reachable by a path whose positions so
    far all stay within k of w. A length m < |w| is valid when `end` is in
    layer m and `end` stays within k of w(t) for every t >= m. The search
    over layers is complete for synchronous fellow travelers.
    """
    solver = oracle.solver
    n = len(pw) - 1
    if n == 0 or not oracle.within(pw[0], start, k):
        return None

    tail_ok = [False] * (n + 1)
    ok = True
    for t in range(n, -1, -1):
        ok = ok and oracle.within(pw[t], end, k)
        tail_ok[t] = ok

    layers: list[dict] = [{start: None}]
    lengths = []
    states = 1
    for m in range(n):
        layer = layers[m]
        if end in layer and tail_ok[m]:
            lengths.append(m)
            if prefer == "shortest":
                break
        if m == n - 1:
            break
        nxt: dict = {}
        for key in layer:
            for letter in solver.alphabet.letters:
                nk = solver.step(key, letter)
                if nk not in nxt and oracle.within(pw[m + 1], nk, k):
                    nxt[nk] = (key, letter)
        states += len(nxt)
        if states > state_budget:
            raise BudgetExceeded(f"Shortening search exceeded {state_budget} states", explored=states)
        if not nxt:
            break
        layers.append(nxt)

    if not lengths:
        return None
    m = lengths[0] if prefer == "shortest" else lengths[-1]
    letters = []
    key = end
    for t in range(m, 0, -1):
        parent, letter = layers[t][key]
        letters.append(letter)
        key = parent
    return Word(tuple(reversed(letters)), solver.alphabet)


def find_shortening(oracle: DistanceOracle, w: Word, k: int, basepoint: bool,
                    start: Optional[ElementKey] = None, prefer: str = "shortest",
                    state_budget: int = DEFAULT_STATE_BUDGET) -> Optional[Shortening]:
    """Shorter loop synchronously k-fellow traveling the loop w.

    With basepoint the shorter loop starts at w(0); otherwise every start
    in the k-neighborhood of w(0) is tried, in BFS order.
    """
    solver = oracle.solver
    pw = positions(solver, w, start)
    if pw[-1] != pw[0]:
        raise PremiseViolation(f"{w} is not a loop")
    bases = [pw[0]] if basepoint else list(neighborhood(solver, pw[0], k))

    best: Optional[Shortening] = None
    for b in bases:
        u = _lockstep(oracle, pw, b, b, k, prefer, state_budget)
        if u is None:
            continue
        if best is None or (len(u) < len(best.word) if prefer == "shortest" else len(u) > len(best.word)):
            best = Shortening(u, b, k)
            if prefer == "shortest" and len(u) == 0:
                break
    return best


def shorten_loop(oracle: DistanceOracle, w: Word, k: int, basepoint: bool,
                 start: Optional[ElementKey] = None) -> Optional[Word]:
    """Shorter k-fellow traveling loop, or None after exhaustive failure.

    Raises:
        BudgetExceeded: If the layered search outgrows its state budget.
    """
    found = find_shortening(oracle, w, k, basepoint, start)
    return None if found is None else found.word


def fftp_shortening(oracle: DistanceOracle, w: Word, k: int,
                    start: Optional[ElementKey] = None, prefer: str = "shortest") -> Optional[Word]:
    """Shorter path with the same endpoints synchronously k-fellow traveling w."""
    pw = positions(oracle.solver, w, start)
    return _lockstep(oracle, pw, pw[0], pw[-1], k, prefer)


# =============================================================================
# ENUMERATION
# =============================================================================

def _words(solver: WordSolver, length: int, first_letters: Sequence[str],
           keep: Callable[[int, ElementKey], bool]) -> Iterator[tuple[Word, ElementKey]]:
    """Words of exactly `length` in lexicographic order, pruned by keep(depth, key)."""
    letters = solver.alphabet.letters
    prefix: list[str] = []

    def extend(key, depth):
        if depth == length:
            yield Word(tuple(prefix), solver.alphabet), key
            return
        for letter in (first_letters if depth == 0 else letters):
            nk = solver.step(key, letter)
            if not keep(depth + 1, nk):
                continue
            prefix.append(letter)
            yield from extend(nk, depth + 1)
            prefix.pop()

    yield from extend(solver.identity, 0)


def enumerate_loops(oracle: DistanceOracle, max_length: int,
                    first_letters: Optional[Sequence[str]] = None) -> Iterator[Word]:
    """Nonempty loops at the identity of length <= max_length, shortlex order."""
    solver = oracle.solver
    first = solver.alphabet.letters if first_letters is None else first_letters
    for length in range(1, max_length + 1):
        def keep(depth, key, length=length):
            return oracle.norm(key, cutoff=length - depth) is not None
        for word, key in _words(solver, length, first, keep):
            if solver.is_identity(key):
                yield word


def _run_chunks(fn: Callable[[list[str]], Any], chunks: list[list[str]], workers: int) -> list:
    if workers <= 1 or len(chunks) <= 1:
        return [fn(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def _merge_stats(parts: Iterable[dict]) -> dict:
    total: dict[str, int] = {}
    for part in parts:
        for key, value in part.items():
            total[key] = total.get(key, 0) + value
    return total


# =============================================================================
# LOOP SHORTENING
# =============================================================================

def check_lsp(oracle: DistanceOracle, k: int, max_length: int, basepoint: bool = False,
              loops: Optional[Iterable[Word]] = None, family: Optional[str] = None,
              workers: int = 1, state_budget: int = DEFAULT_STATE_BUDGET) -> Verdict:
    """Run shorten_loop on every loop up to max_length (or a given family).

    The counterexample is the shortlex-least loop without a shortening.
    """
    if max_length < 1:
        raise ValueError("max_length must be >= 1")
    prop = "blsp" if basepoint else "lsp"
    solver = oracle.solver

    def scan(candidates) -> tuple[Optional[Word], dict]:
        examined = 0
        for loop in candidates:
            examined += 1
            if find_shortening(oracle, loop, k, basepoint, state_budget=state_budget) is None:
                return loop, {"loops": examined}
        return None, {"loops": examined}

    if loops is not None:
        witness, stats = scan(w for w in loops if len(w) <= max_length)
        quantifier = f"family {family or 'given'}: loops of length <= {max_length}"
    else:
        chunks = chunk_prefixes(solver.alphabet.letters, workers)
        results = _run_chunks(lambda chunk: scan(enumerate_loops(oracle, max_length, chunk)), chunks, workers)
        witness = ordered_merge((r[0] for r in results), key=lambda w: w.shortlex_key())
        stats = _merge_stats(r[1] for r in results)
        quantifier = f"all loops of length <= {max_length}" + (" at the basepoint" if basepoint else "")

    bound = {"L": max_length}
    if witness is None:
        logger.info(f"{prop} holds up to length {max_length} at k={k}")
        return Verdict(prop, Outcome.HOLDS, k, bound, quantifier, None, stats)
    logger.info(f"{prop} counterexample at k={k}: {witness}")
    return Verdict(prop, Outcome.COUNTEREXAMPLE, k, bound, quantifier,
                   {"loop": str(witness), "length": len(witness)}, stats)


def check_blsp(oracle: DistanceOracle, k: int, max_length: int, **kwargs) -> Verdict:
    return check_lsp(oracle, k, max_length, basepoint=True, **kwargs)


def minimal_lsp_constant(oracle: DistanceOracle, w: Word, k_max: int,
                         basepoint: bool = False) -> Optional[int]:
    """Least k in 1..k_max at which w has a shortening."""
    for k in range(1, k_max + 1):
        if find_shortening(oracle, w, k, basepoint) is not None:
            return k
    return None


# =============================================================================
# FFTP
# =============================================================================

class FftpMode(str, Enum):
    ALL_WORDS = "all-words"
    GEODESIC_PREFIX = "geodesic-prefix"


def check_fftp(oracle: DistanceOracle, k: int, max_length: int,
               mode: FftpMode = FftpMode.ALL_WORDS, workers: int = 1) -> Verdict:
    """Search for non-geodesics up to max_length not falsified at constant k.

    In geodesic-prefix mode only words v·x with v geodesic are examined.
    """
    mode = FftpMode(mode)
    solver = oracle.solver

    def is_short(key, length) -> bool:
        return oracle.norm(key, cutoff=length - 1) is not None

    def scan(chunk: list[str]) -> tuple[Optional[Word], dict]:
        stats = {"words": 0, "non_geodesic": 0}
        for length in range(1, max_length + 1):
            if mode == FftpMode.GEODESIC_PREFIX:
                # Every proper prefix geodesic; the last letter is free.
                def keep(depth, key, length=length):
                    return depth == length or not is_short(key, depth)
            else:
                def keep(depth, key):
                    return True
            for word, key in _words(solver, length, chunk, keep):
                stats["words"] += 1
                if not is_short(key, length):
                    continue
                stats["non_geodesic"] += 1
                if fftp_shortening(oracle, word, k) is None:
                    return word, stats
        return None, stats

    chunks = chunk_prefixes(solver.alphabet.letters, workers)
    results = _run_chunks(scan, chunks, workers)
    witness = ordered_merge((r[0] for r in results), key=lambda w: w.shortlex_key())
    stats = _merge_stats(r[1] for r in results)
    quantifier = (
        f"all non-geodesic words of length <= {max_length}"
        if mode == FftpMode.ALL_WORDS
        else f"non-geodesic words v·x of length <= {max_length} with v geodesic"
    )
    bound = {"R": max_length}
    if witness is None:
        return Verdict("fftp", Outcome.HOLDS, k, bound, quantifier, None, stats)
    return Verdict("fftp", Outcome.COUNTEREXAMPLE, k, bound, quantifier,
                   {"word": str(witness), "length": len(witness)}, stats)


# =============================================================================
# ALMOST CONVEXITY
# =============================================================================

Metric = Union[BallIndex, DistanceOracle]


def restricted_distance(metric: Metric, x: ElementKey, y: ElementKey, N: int,
                        cutoff: Optional[int] = None) -> Optional[int]:
    """Distance from x to y along paths that stay inside B(N).

    Args:
        metric: A ball of radius >= N, or a distance oracle used as a
            membership test when B(N) is too big to build
        cutoff: Give up beyond this length

    Returns:
        The restricted distance, or None if none exists within cutoff
    """
    if isinstance(metric, BallIndex):
        if metric.radius < N:
            raise RadiusShortfall(f"restricted_distance needs B({N})", needed=N, available=metric.radius)
        solver = metric.solver

        def member(key):
            d = metric.distance(key)
            return d is not None and d <= N
    else:
        solver = metric.solver

        def member(key):
            return metric.norm(key, cutoff=N) is not None

    if x == y:
        return 0
    seen = {x}
    frontier = [x]
    depth = 0
    while frontier and (cutoff is None or depth < cutoff):
        depth += 1
        nxt = []
        for key in frontier:
            for letter in solver.alphabet.letters:
                nk = solver.step(key, letter)
                if nk in seen or not member(nk):
                    continue
                if nk == y:
                    return depth
                seen.add(nk)
                nxt.append(nk)
        frontier = nxt
    return None


def check_ac(ball: BallIndex, N: int, C: int, sphere_only: bool = False,
             batch_size: int = 256) -> Verdict:
    """Pairs at distance <= 2 in B(N) (or S(N)) joined inside B(N) within C."""
    if ball.radius < N:
        raise RadiusShortfall(f"check_ac needs B({N})", needed=N, available=ball.radius)
    solver = ball.solver
    size = sum(ball.sphere_sizes()[:N + 1])
    graph = ball.adjacency()[:size, :size]

    if ball.radius >= 2:
        offsets = [g for g in ball.keys(2) if not solver.is_identity(g)]
    else:
        offsets = [g for g in neighborhood(solver, solver.identity, 2) if not solver.is_identity(g)]

    sources = ball.sphere(N) if sphere_only else ball.keys(N)
    source_ids = [ball.index_of(x) for x in sources]
    pairs = 0
    for start in range(0, len(source_ids), batch_size):
        batch = source_ids[start:start + batch_size]
        dist = dijkstra(graph, directed=False, unweighted=True, limit=C + 0.5, indices=batch)
        for row, xid in enumerate(batch):
            x = ball.table.key(xid)
            for g in offsets:
                yid = ball.index_of(solver.multiply(x, g))
                if yid is None or yid >= size or yid <= xid:
                    continue
                if sphere_only and ball.distance(ball.table.key(yid)) != N:
                    continue
                pairs += 1
                if not np.isfinite(dist[row, yid]):
                    y = ball.table.key(yid)
                    witness = {
                        "x": str(ball.path_to(x)),
                        "y": str(ball.path_to(y)),
                        "distance": ball.distance(solver.multiply(solver.inverse(x), y)),
                        "restricted_distance": restricted_distance(ball, x, y, N, cutoff=C + 8),
                    }
                    logger.info(f"AC fails at N={N}, C={C}: {witness['x']} / {witness['y']}")
                    return Verdict("ac", Outcome.COUNTEREXAMPLE, None, {"N": N, "C": C},
                                   _ac_quantifier(N, sphere_only), witness, {"pairs": pairs})
    return Verdict("ac", Outcome.HOLDS, None, {"N": N, "C": C},
                   _ac_quantifier(N, sphere_only), None, {"pairs": pairs})


def _ac_quantifier(N: int, sphere_only: bool) -> str:
    where = f"S({N})" if sphere_only else f"B({N})"
    return f"all pairs in {where} at distance <= 2"


def check_ac_pair(metric: Metric, x: ElementKey, y: ElementKey, N: int, C: int) -> Verdict:
    """AC test restricted to one given pair, for balls too large to build."""
    d = restricted_distance(metric, x, y, N, cutoff=C)
    witness = None
    outcome = Outcome.HOLDS
    if d is None:
        outcome = Outcome.COUNTEREXAMPLE
        witness = {"restricted_distance_exceeds": C}
    return Verdict("ac", outcome, None, {"N": N, "C": C}, "single given pair", witness, {"pairs": 1})


# =============================================================================
# FILLING
# =============================================================================

@dataclass
class FillingCertificate:
    """Chain of ever shorter loops down to the empty loop, with relators."""

    k: int
    loops: list[Word]
    starts: list[ElementKey]
    relators_per_step: list[int]
    relators: list[Word]

    @property
    def area(self) -> int:
        return sum(self.relators_per_step)

    @property
    def max_relator_length(self) -> int:
        return max((len(r) for r in self.relators), default=0)

    def check_bounds(self, solver: WordSolver) -> bool:
        """Recount every bound the certificate claims."""
        w = self.loops[0]
        if any(len(b) >= len(a) for a, b in zip(self.loops, self.loops[1:])):
            return False
        if any(count > len(loop) for count, loop in zip(self.relators_per_step, self.loops)):
            return False
        if self.max_relator_length > 2 * self.k + 2:
            return False
        if self.area > len(w) ** 2:
            return False
        return all(solver.is_identity(solver.eval(r)) for r in self.relators)


def _annulus(oracle: DistanceOracle, w: Word, w_start, u: Word, u_start) -> list[Word]:
    """Rectangles between consecutive positions of w and its shortening u."""
    solver = oracle.solver
    pw = positions(solver, w, w_start)
    pu = positions(solver, u, u_start)
    sides = [oracle.geodesic(pw[t], pu[min(t, len(u))]) for t in range(len(w) + 1)]
    rectangles = []
    for t in range(len(w)):
        bottom = u[t:t + 1]
        rel = sides[t] + bottom + invert(sides[t + 1]) + invert(w[t:t + 1])
        if len(free_reduce(rel)) == 0:
            continue
        rectangles.append(rel)
    return rectangles


def fill(oracle: DistanceOracle, w: Word, k: int, start: Optional[ElementKey] = None,
         state_budget: int = DEFAULT_STATE_BUDGET) -> FillingCertificate:
    """Fill an identity word by shortening it until it is empty.

    Raises:
        PremiseViolation: If w is not the identity.
        StuckLoop: If some loop in the chain has no shortening at k; that
            loop is an LSP counterexample.
    """
    solver = oracle.solver
    start = solver.identity if start is None else start
    if not solver.is_identity(solver.eval(w)):
        raise PremiseViolation(f"{w} is not the identity")

    cert = FillingCertificate(k, [w], [start], [], [])
    current, current_start = w, start
    while len(current):
        found = find_shortening(oracle, current, k, basepoint=False, start=current_start,
                                state_budget=state_budget)
        if found is None:
            raise StuckLoop(f"No shortening of {current} at k={k}", loop=current, k=k)
        rectangles = _annulus(oracle, current, current_start, found.word, found.start)
        cert.relators.extend(rectangles)
        cert.relators_per_step.append(len(rectangles))
        cert.loops.append(found.word)
        cert.starts.append(found.start)
        current, current_start = found.word, found.start
    logger.debug(f"fill({w}): {len(cert.loops) - 1} steps, area {cert.area}")
    return cert


def dehn_upper_bound(oracle: DistanceOracle, n: int, k: int, sample: Optional[int] = None,
                     seed: Optional[int] = None,
                     state_budget: int = DEFAULT_STATE_BUDGET) -> tuple[int, Optional[Word]]:
    """Largest certificate area over identity words of length <= n.

    An upper-bound sampler for the Dehn function, not its exact value.
    With sample, only that many loops drawn with the seeded generator are
    filled, in shortlex order.
    """
    loops = list(enumerate_loops(oracle, n))
    if sample is not None and sample < len(loops):
        rng = np.random.default_rng(seed)
        picked = np.sort(rng.choice(len(loops), size=sample, replace=False))
        loops = [loops[int(i)] for i in picked]
        logger.info(f"Filling {sample} sampled loops of length <= {n} (seed {seed})")
    best, witness = 0, None
    for loop in loops:
        area = fill(oracle, loop, k, state_budget=state_budget).area
        if area > best:
            best, witness = area, loop
    return best, witness


# =============================================================================
# CONNECTORS FROM BASEPOINT SHORTENING
# =============================================================================

def _basepoint_shortening(oracle: DistanceOracle, loop: Word, k: int) -> Word:
    found = find_shortening(oracle, loop, k, basepoint=True)
    if found is None:
        raise ShorteningUnavailable(f"No basepoint shortening of {loop} at k={k}")
    return found.word


def blsp_to_ac_path(oracle: DistanceOracle, w: Word, u: Word, gamma: Word, k: int) -> Word:
    """Path from w's endpoint to u's endpoint inside B(|w|) of length <= 6k+2.

    The loop w·γ·u⁻¹ is shortened at the basepoint until it has length at
    most 2N; the connector retraces w by k/2, crosses over to the shortened
    loops, follows them past the far side and crosses back onto u.

    Raises:
        PremiseViolation: If w, u are not geodesics of equal length joined by γ.
        ShorteningUnavailable: If a needed basepoint shortening does not exist.
        ConstantViolation: If the connector leaves B(N) or is too long.
    """
    solver = oracle.solver
    k = k + (k % 2)
    N = len(w)
    if len(u) != N:
        raise PremiseViolation(f"|w|={N} and |u|={len(u)} differ")
    end_w, end_u = solver.eval(w), solver.eval(u)
    if end_w == end_u:
        return Word((), solver.alphabet)
    if solver.multiply(end_w, solver.eval(gamma)) != end_u:
        raise PremiseViolation(f"γ={gamma} does not join the endpoints")
    if not (is_geodesic(oracle, w) and is_geodesic(oracle, u)):
        raise PremiseViolation("w and u must be geodesic")

    loop = w + gamma + invert(u)
    y = loop if len(loop) <= 2 * N else _basepoint_shortening(oracle, loop, k)
    v = y if len(y) <= 2 * N else _basepoint_shortening(oracle, y, k)

    def at(path, t):
        return path[min(max(t, 0), len(path) - 1)]

    p_loop, p_y, p_v = positions(solver, loop), positions(solver, y), positions(solver, v)
    half = k // 2
    a = max(N - half, 0)
    t2 = N + len(gamma) + half
    b = max(N - half, 0)

    path = invert(w[a:N])
    path = path + oracle.geodesic(at(p_loop, a), at(p_y, a))
    path = path + oracle.geodesic(at(p_y, a), at(p_v, a))
    path = path + v[a:t2]
    path = path + oracle.geodesic(at(p_v, t2), at(p_y, t2))
    path = path + oracle.geodesic(at(p_y, t2), at(p_loop, t2))
    path = path + u[b:N]

    walk = positions(solver, path, end_w)
    if walk[-1] != end_u:
        raise ConstantViolation("connector does not end at u's endpoint")
    if len(path) > 6 * k + 2:
        raise ConstantViolation(f"connector length {len(path)} exceeds {6 * k + 2}")
    for key in walk:
        if oracle.norm(key, cutoff=N) is None:
            raise ConstantViolation(f"connector leaves B({N})")
    logger.debug(f"blsp_to_ac_path: N={N}, k={k}, length {len(path)}")
    return path
