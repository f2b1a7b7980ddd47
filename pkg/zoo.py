"""Built-in groups and witness words.

Presets:
- f2 - the free group on a, b
- z2-wise-base / z2-gersten-base - Z² on a, b, c, d (two choices of d)
- f2c-bridson-base - F(a, b) with the commutator c = abAB as a generator
- wise / gersten / bridson - HNN extensions of the bases above
- stallings - 12 octahedron edge generators mapped into F2 × F2 × F2

Every preset is also shipped as a presentation file under groups/.
"""
import heapq
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Optional

from presentation import (
    BudgetExceeded,
    LemmaBoundViolation,
    PresentationError,
    Structure,
    UnknownPreset,
    Word,
    parse_presentation,
    serialize_presentation,
)
from budgets import get_profile
from router import build_solver
from solvers import DirectProductFreeSolver, WordSolver

logger = logging.getLogger(__name__)


# =============================================================================
# PRESENTATION TEXTS
# =============================================================================

_F2 = """\
name f2
generators a A b B
inverses a=A b=B
backend free
"""

_Z2_WISE_BASE = """\
name z2-wise-base
generators a A b B c C d D
inverses a=A b=B c=C d=D
relator cBA
relator cAB
relator dCC
backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(2,2)
"""

_Z2_GERSTEN_BASE = """\
name z2-gersten-base
generators a A b B c C d D
inverses a=A b=B c=C d=D
relator cBA
relator cAB
relator dbA
backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(1,-1)
"""

_F2C_BRIDSON_BASE = """\
name f2c-bridson-base
generators a A b B c C
inverses a=A b=B c=C
relator cbaBA
backend free map c=abAB
"""

_WISE = """\
name wise
generators a A b B c C d D s S t T
inverses a=A b=B c=C d=D s=S t=T
relator cBA
relator cAB
relator dCC
backend hnn
base-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(2,2)
stable s pair a -> d
stable t pair b -> d
"""

_GERSTEN = """\
name gersten
generators a A b B c C d D s S t T
inverses a=A b=B c=C d=D s=S t=T
relator cBA
relator cAB
relator dbA
backend hnn
base-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(1,-1)
stable s pair a -> c
stable t pair a -> d
"""

_BRIDSON = """\
name bridson
generators a A b B c C g G s S t T
inverses a=A b=B c=C g=G s=S t=T
relator cbaBA
backend hnn
base-backend free map c=abAB
stable g pair a -> A pair b -> B oracle full
stable s pair c -> a
stable t pair c -> b
"""

# Opposite vertex pairs of the octahedron, one free factor each. Edges run
# from each level to the next, cyclically, and letter xY reads "x to y".
OCTAHEDRON_LEVELS = ("ab", "cd", "ef")


def octahedron_edges() -> list[str]:
    edges = []
    for i, level in enumerate(OCTAHEDRON_LEVELS):
        nxt = OCTAHEDRON_LEVELS[(i + 1) % len(OCTAHEDRON_LEVELS)]
        for x in level:
            for y in nxt:
                edges.append(x + y.upper())
    return edges


def octahedron_relators() -> list[str]:
    """Two relators per triangular face: xY·yZ·zX and xY·zX·yZ."""
    ab, cd, ef = OCTAHEDRON_LEVELS
    relators = []
    for x in ab:
        for y in cd:
            for z in ef:
                xy, yz, zx = x + y.upper(), y + z.upper(), z + x.upper()
                relators.append(xy + yz + zx)
                relators.append(xy + zx + yz)
    return relators


def stallings_text() -> str:
    edges = octahedron_edges()
    generators = []
    for edge in edges:
        generators.extend([edge, edge[::-1].swapcase()])
    lines = [
        "name stallings",
        "generators " + " ".join(generators),
        "inverses " + " ".join(f"{e}={e[::-1].swapcase()}" for e in edges),
    ]
    lines.extend(f"relator {r}" for r in octahedron_relators())
    lines.append("backend direct-product-free factors " + " ".join(OCTAHEDRON_LEVELS))
    return "\n".join(lines) + "\n"


PRESET_TEXTS: dict[str, str] = {
    "f2": _F2,
    "z2-wise-base": _Z2_WISE_BASE,
    "z2-gersten-base": _Z2_GERSTEN_BASE,
    "f2c-bridson-base": _F2C_BRIDSON_BASE,
    "wise": _WISE,
    "bridson": _BRIDSON,
    "gersten": _GERSTEN,
    "stallings": stallings_text(),
}

PRESET_NAMES = tuple(PRESET_TEXTS)

PRESET_NOTES = {
    "f2": "free group of rank 2",
    "z2-wise-base": "Z² with a=(1,0), b=(0,1), c=ab=ba, d=c²",
    "z2-gersten-base": "Z² with a=(1,0), b=(0,1), c=ab=ba, d=ab⁻¹ (king-move metric)",
    "f2c-bridson-base": "F(a,b) with c=[a,b] included as a generator",
    "wise": "Z² over s⁻¹as=d, t⁻¹bt=d",
    "gersten": "Z² over s⁻¹as=c, t⁻¹at=d",
    "bridson": "F(a,b) over gag⁻¹=a⁻¹, gbg⁻¹=b⁻¹, sas⁻¹=c, tbt⁻¹=c",
    "stallings": "octahedron presentation, solved through its map into F2×F2×F2",
}

# Generators that the witness words below rely on.
STALLINGS_WITNESS_LETTERS = ("fA", "dE", "aC", "fB", "bC", "cB")


# =============================================================================
# PRESETS
# =============================================================================

@dataclass(frozen=True)
class Preset:
    name: str
    structure: Structure
    solver: WordSolver
    notes: str = ""

    @property
    def alphabet(self):
        return self.structure.alphabet

    def word(self, text: str) -> Word:
        return self.structure.alphabet.word(text)


def _verify(structure: Structure, solver: WordSolver):
    for rel in structure.relators:
        if not solver.is_identity(solver.eval(rel)):
            raise PresentationError(f"Relator {rel} of {structure.name} is not the identity")
    if isinstance(solver, DirectProductFreeSolver):
        for letter in solver.alphabet:
            if solver.exponent_sum(letter) != 0:
                raise PresentationError(f"Generator {letter} has nonzero exponent sum")
        missing = [x for x in STALLINGS_WITNESS_LETTERS if x not in solver.alphabet]
        if missing:
            raise PresentationError(f"Octahedron alphabet lacks {' '.join(missing)}")


def load_preset_text(text: str, notes: str = "") -> Preset:
    structure = parse_presentation(text)
    solver = build_solver(structure)
    _verify(structure, solver)
    return Preset(structure.name, structure, solver, notes)


@lru_cache(maxsize=None)
def preset(name: str) -> Preset:
    """Fully wired preset by name.

    Raises:
        UnknownPreset: If no preset has that name.
    """
    text = PRESET_TEXTS.get(name)
    if text is None:
        raise UnknownPreset(f"Unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    loaded = load_preset_text(text, PRESET_NOTES.get(name, ""))
    logger.debug(f"Loaded preset {name} ({loaded.solver.name} solver, {len(loaded.alphabet)} letters)")
    return loaded


def export_presets(directory) -> list:
    """Write every preset as <name>.pres in canonical form."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in PRESET_NAMES:
        path = directory / f"{name}.pres"
        path.write_text(serialize_presentation(preset(name).structure), encoding="utf-8")
        written.append(path)
    logger.info(f"Exported {len(written)} presets to {directory}")
    return written


# =============================================================================
# WITNESS WORDS
# =============================================================================

def gersten_loop(n: int) -> Word:
    """dⁿ s t⁻¹ cⁿdⁿ t s⁻¹ c⁻ⁿd⁻ⁿ s t⁻¹ c⁻ⁿd⁻ⁿ t s⁻¹ cⁿ, a loop of length 8n+8.

    Each t⁻¹…t or s⁻¹…s pair brackets cⁿdⁿ = a²ⁿ or its inverse.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    text = ("d" * n + "sT" + "c" * n + "d" * n + "tS" + "C" * n + "D" * n
            + "sT" + "C" * n + "D" * n + "tS" + "c" * n)
    return preset("gersten").word(text)


def gersten_word_literal(n: int) -> Word:
    """The same pattern with every crossing written s t⁻¹; it admits no pinch."""
    if n < 1:
        raise ValueError("n must be >= 1")
    text = ("d" * n + "sT" + "c" * n + "d" * n + "sT" + "C" * n + "D" * n
            + "sT" + "C" * n + "D" * n + "sT" + "c" * n)
    return preset("gersten").word(text)


def stallings_alpha(n: int) -> Word:
    """(fA)ⁿ(dE)ⁿ(aC)ⁿ⁻¹, length 3n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return preset("stallings").word("fA" * n + "dE" * n + "aC" * (n - 1))


def stallings_beta(n: int) -> Word:
    """(fB)ⁿ(dE)ⁿ(bC)ⁿ⁻¹, length 3n-1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return preset("stallings").word("fB" * n + "dE" * n + "bC" * (n - 1))


def stallings_gamma() -> Word:
    return preset("stallings").word("aCcB")


def _gersten_family(k: int, max_length: int) -> Iterator[Word]:
    n = k + 1
    while 8 * n + 8 <= max_length:
        yield gersten_loop(n)
        n += 1


# Parameterized loop families for restricted LSP runs: (group, k, L) -> loops.
FAMILIES: dict[str, tuple[str, Callable[[int, int], Iterator[Word]]]] = {
    "gersten-loop": ("gersten", _gersten_family),
}


def family_loops(name: str, group: str, k: int, max_length: int) -> list[Word]:
    try:
        family_group, make = FAMILIES[name]
    except KeyError:
        raise ValueError(f"Unknown loop family {name!r}; available: {', '.join(FAMILIES)}") from None
    if family_group != group:
        raise ValueError(f"Family {name!r} lives in {family_group}, not {group}")
    return list(make(k, max_length))


# =============================================================================
# LOWER BOUND SEARCH IN THE OCTAHEDRON GROUP
# =============================================================================

def lemma_bb_target(solver: DirectProductFreeSolver, n: int, z: str, v: str = "") -> tuple:
    """Image of fⁿdⁿEⁿCⁿ⁻¹·v·Z in the product of free groups."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(z) != 1 or not z.islower():
        raise ValueError(f"z must be a single vertex letter, got {z!r}")
    return solver.factor_key("f" * n + "d" * n + "E" * n + "C" * (n - 1) + v + z.upper())


def _admissible(solver: DirectProductFreeSolver, key: tuple, target: tuple) -> int:
    # Every generator moves exactly two factors by one letter each.
    rest = solver.multiply(solver.inverse(key), target)
    return (sum(len(part) for part in rest) + 1) // 2


def lemma_bb_search(solver: DirectProductFreeSolver, target: tuple,
                    max_expansions: Optional[int] = None) -> Word:
    """Shortest word (shortlex-first among ties reached first) with the given image.

    A* over element keys; the heuristic is consistent, so the first time
    the target is popped its distance is exact.

    Raises:
        BudgetExceeded: With the best proven lower bound on the length.
    """
    if max_expansions is None:
        max_expansions = get_profile("stallings")["astar_expansions"]
    letters = solver.alphabet.letters
    start = solver.identity
    counter = itertools.count()
    heap = [(_admissible(solver, start, target), 0, next(counter), start)]
    best = {start: 0}
    parent: dict[tuple, tuple[Optional[tuple], Optional[str]]] = {start: (None, None)}
    expansions = 0

    while heap:
        f, d, _, key = heapq.heappop(heap)
        if d > best[key]:
            continue
        if key == target:
            path = []
            while parent[key][0] is not None:
                key, letter = parent[key]
                path.append(letter)
            logger.debug(f"A* reached target at length {d} after {expansions} expansions")
            return solver.alphabet.word(reversed(path))
        expansions += 1
        if expansions > max_expansions:
            raise BudgetExceeded(
                f"A* search exceeded {max_expansions} expansions; length >= {f}",
                explored=expansions, lower_bound=f,
            )
        for letter in letters:
            nk = solver.step(key, letter)
            nd = d + 1
            if nd < best.get(nk, nd + 1):
                best[nk] = nd
                parent[nk] = (key, letter)
                heapq.heappush(heap, (nd + _admissible(solver, nk, target), nd, next(counter), nk))
    raise PresentationError("Target is not in the image of the generators")


def lemma_bb_min_length(n: int, z: str, v: str = "", max_expansions: Optional[int] = None) -> int:
    """Exact minimal length of a word reaching the fⁿdⁿEⁿCⁿ⁻¹·v·Z target.

    max_expansions defaults to the stallings budget profile.

    Raises:
        LemmaBoundViolation: If the minimum is below 3n.
        BudgetExceeded: If the search runs out of expansions.
    """
    solver = preset("stallings").solver
    target = lemma_bb_target(solver, n, z, v)
    word = lemma_bb_search(solver, target, max_expansions)
    if len(word) < 3 * n:
        raise LemmaBoundViolation(
            f"{word} (length {len(word)}) reaches the n={n}, z={z} target below {3 * n}",
            length=len(word), word=word,
        )
    return len(word)


# =============================================================================
# DESK-SCALE PROPERTY GRID
# =============================================================================

# One row per (group, property) entry that runs at desk scale. `expected`
# is None where the answer is unknown.
TABLE1_SLICE: tuple[dict, ...] = (
    {"group": "z2-gersten-base", "command": "check-fftp",
     "params": {"k": 4, "L": 6}, "expected": "holds-up-to-bound"},
    {"group": "f2", "command": "check-blsp",
     "params": {"k": 2, "L": 6}, "expected": "holds-up-to-bound"},
    {"group": "wise", "command": "hnn-verify",
     "params": {"R": 6, "Y": "a"}, "expected": "holds-up-to-bound"},
    {"group": "wise", "command": "check-blsp",
     "params": {"k": 6, "L": 4}, "expected": "holds-up-to-bound"},
    {"group": "gersten", "command": "hnn-verify",
     "params": {"R": 3, "Y": "a"}, "expected": "counterexample"},
    {"group": "gersten", "command": "check-lsp",
     "params": {"k": 1, "L": 24, "family": "gersten-loop"}, "expected": "counterexample"},
    {"group": "stallings", "command": "witness",
     "params": {"n": 2, "N": 5, "C": 2}, "expected": "counterexample"},
    {"group": "bridson", "command": "check-fftp",
     "params": {"k": 2, "L": 4}, "expected": None},
)


def table1_slice(groups: Optional[set] = None) -> list[dict]:
    """Rows of the desk-scale grid, optionally restricted to some groups."""
    return [dict(row) for row in TABLE1_SLICE if groups is None or row["group"] in groups]
