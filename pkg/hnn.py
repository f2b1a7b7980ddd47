"""HNN-specific machinery: pinches, strip equidistance, totally geodesic
subgroups, the pinch-driven shortening strategy, and strips.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from cayley import BallIndex, DistanceOracle, geodesics_to
from fellow import sync_ft
from presentation import ConstantViolation, OracleError, RadiusShortfall, Word, WorkbenchError
from properties import Outcome, Verdict, fftp_shortening
from solvers import BrittonSolver, CyclicAssociation, ElementKey, Pinch

logger = logging.getLogger(__name__)


def find_pinch(solver: BrittonSolver, w: Word) -> Optional[Pinch]:
    """Innermost pinch of w, leftmost on ties; None iff w is stable letter reduced."""
    solver.check_word(w)
    return solver.find_pinch(w)


def britton_reduce(solver: BrittonSolver, w: Word) -> Word:
    solver.check_word(w)
    return solver.britton_reduce(w)


def stable_letter_count(solver: BrittonSolver, w: Word) -> int:
    return solver.stable_letter_count(w)


def apply_phi(solver: BrittonSolver, stable: str, word: Word, inverse: bool = False) -> Word:
    """Image of a base word under the associated isomorphism of `stable` (or its inverse)."""
    assoc = solver.associations[stable]
    base_word = solver.base.alphabet.word(word.letters)
    letters = assoc.backward_word(base_word) if inverse else assoc.forward_word(base_word)
    return solver.alphabet.word(letters)


# =============================================================================
# STRIP EQUIDISTANCE
# =============================================================================

def check_strip_equidistant(solver: BrittonSolver, base_oracle: DistanceOracle, R: int) -> Verdict:
    """Check |u| = |φ(u)| in the base for associated-subgroup elements with |u| <= R.

    Cyclic subgroups are enumerated as powers of their generators; full
    subgroups as every base element in B(R). For cyclic subgroups the
    observed slopes |u^m|/m are reported alongside the per-R verdict.
    """
    base = solver.base
    checked = 0
    slopes: dict[str, list[float]] = {}
    for s in solver.hnn.stable_letters:
        assoc = solver.associations[s]
        if isinstance(assoc, CyclicAssociation):
            if base.is_identity(assoc.u_key):
                continue
            for direction, (g, h) in (("forward", (assoc.u_key, assoc.v_key)),
                                      ("backward", (assoc.v_key, assoc.u_key))):
                observed = []
                m = 1
                while True:
                    gm = base.power(g, m)
                    dg = base_oracle.norm(gm, cutoff=R)
                    if dg is None:
                        break
                    dh = base_oracle.norm(base.power(h, m), cutoff=dg)
                    checked += 1
                    if dh != dg:
                        witness = {"stable": s, "direction": direction, "power": m,
                                   "length": dg, "image_length": base_oracle.norm(base.power(h, m))}
                        return Verdict("strip-equidistant", Outcome.COUNTEREXAMPLE, None, {"R": R},
                                       _se_quantifier(R), witness, {"elements": checked})
                    observed.append(dg / m)
                    m += 1
                if observed:
                    slopes[f"{s}:{direction}"] = [float(np.min(observed)), float(np.max(observed))]
        else:
            if base_oracle.radius < R:
                raise RadiusShortfall(f"Full subgroup check needs base B({R})",
                                      needed=R, available=base_oracle.radius)
            for g in base_oracle.ball.keys(R):
                dg = base_oracle.ball.distance(g)
                dh = base_oracle.norm(assoc.forward(g), cutoff=dg)
                checked += 1
                if dh != dg:
                    witness = {"stable": s, "element": str(base_oracle.ball.path_to(g)),
                               "length": dg, "image_length": base_oracle.norm(assoc.forward(g))}
                    return Verdict("strip-equidistant", Outcome.COUNTEREXAMPLE, None, {"R": R},
                                   _se_quantifier(R), witness, {"elements": checked})
    return Verdict("strip-equidistant", Outcome.HOLDS, None, {"R": R}, _se_quantifier(R),
                   None, {"elements": checked, "slopes": slopes})


def _se_quantifier(R: int) -> str:
    return f"associated-subgroup elements of base length <= {R}"


# =============================================================================
# TOTALLY GEODESIC SUBGROUPS
# =============================================================================

def _in_free_monoid(word: Word, pieces: Sequence[tuple[str, ...]]) -> bool:
    """Whether the word splits into a concatenation of the given pieces."""
    n = len(word)
    reachable = [False] * (n + 1)
    reachable[0] = True
    letters = word.letters
    for i in range(n):
        if not reachable[i]:
            continue
        for piece in pieces:
            if letters[i:i + len(piece)] == piece:
                reachable[i + len(piece)] = True
    return reachable[n]


def check_totally_geodesic(ball: BallIndex, generators: Sequence[Word], R: int,
                           word_length: Optional[int] = None) -> Verdict:
    """Every geodesic to a subgroup element of length <= R is spelled in Y ∪ Y⁻¹.

    Subgroup elements are found by breadth first search over Y-words of
    length <= word_length (default 2R) that end inside B(R).
    """
    if ball.radius < R:
        raise RadiusShortfall(f"check_totally_geodesic needs B({R})", needed=R, available=ball.radius)
    solver = ball.solver
    pieces = []
    for g in generators:
        pieces.append(tuple(g.letters))
        pieces.append(tuple(g.inverse().letters))
    pieces = [p for p in dict.fromkeys(pieces) if p]
    steps = [solver.eval(Word(p, ball.alphabet)) for p in pieces]
    word_length = 2 * R if word_length is None else word_length

    elements = {solver.identity}
    frontier = [solver.identity]
    for _ in range(word_length):
        nxt = []
        for key in frontier:
            for step in steps:
                nk = solver.multiply(key, step)
                if nk not in elements:
                    elements.add(nk)
                    nxt.append(nk)
        frontier = nxt
    members = sorted(
        (g for g in elements if (ball.distance(g) is not None and ball.distance(g) <= R)),
        key=ball.index_of,
    )

    checked = 0
    for g in members:
        for geodesic in geodesics_to(ball, g):
            checked += 1
            if not _in_free_monoid(geodesic, pieces):
                witness = {"element": str(ball.path_to(g)), "geodesic": str(geodesic),
                           "length": len(geodesic)}
                logger.info(f"Not totally geodesic: {geodesic} reaches {witness['element']}")
                return Verdict("totally-geodesic", Outcome.COUNTEREXAMPLE, None, {"R": R},
                               f"subgroup elements in B({R})", witness,
                               {"elements": len(members), "geodesics": checked})
    return Verdict("totally-geodesic", Outcome.HOLDS, None, {"R": R},
                   f"subgroup elements in B({R})", None,
                   {"elements": len(members), "geodesics": checked})


# =============================================================================
# SHORTENING BY PINCHES
# =============================================================================

def hnn_shorten(solver: BrittonSolver, oracle: DistanceOracle, base_oracle: DistanceOracle,
                w: Word, k_base: int) -> Optional[Word]:
    """One shortening step of a loop by the pinch strategy.

    Without stable letters the base FFTP search shortens w. Otherwise the
    innermost pinch s⁻¹w₂s is used: a non-geodesic w₂ is shortened in the
    base, a geodesic one is replaced by a geodesic for φ(w₂).

    Raises:
        WorkbenchError: If no step applies (the hypotheses fail here).
        ConstantViolation: If the result fails its fellow traveler check.
    """
    if len(w) == 0:
        return None
    k = max(k_base, 2)
    if not solver.is_identity(solver.eval(w)):
        raise WorkbenchError(f"{w} is not a loop")

    if solver.stable_letter_count(w) == 0:
        base_word = solver.base.alphabet.word(w.letters)
        shorter = fftp_shortening(base_oracle, base_word, k_base)
        if shorter is None:
            raise WorkbenchError(f"Base loop {w} has no FFTP shortening at k={k_base}")
        result = solver.alphabet.word(shorter.letters)
    else:
        pinch = solver.find_pinch(w)
        if pinch is None:
            raise WorkbenchError(f"Loop {w} with stable letters has no pinch")
        inner = solver.base.alphabet.word(pinch.inner.letters)
        shorter_inner = fftp_shortening(base_oracle, inner, k_base) if len(inner) else None
        if shorter_inner is not None:
            replacement = w[pinch.start:pinch.start + 1] + solver.alphabet.word(shorter_inner.letters) \
                + w[pinch.end:pinch.end + 1]
        else:
            image = solver.pinch_replacement(pinch)
            image_key = solver.base.eval(solver.base.alphabet.word(image.letters))
            if image_key in base_oracle.ball:
                image = solver.alphabet.word(base_oracle.ball.path_to(image_key).letters)
            replacement = image
        result = w[:pinch.start] + replacement + w[pinch.end + 1:]

    if len(result) >= len(w) or not solver.is_identity(solver.eval(result)):
        raise ConstantViolation(f"hnn_shorten({w}) produced {result}")
    if not sync_ft(oracle, w, result, k):
        raise ConstantViolation(f"hnn_shorten({w}) = {result} does not {k}-fellow travel")
    return result


# =============================================================================
# STRIPS
# =============================================================================

class Side(str, Enum):
    MINUS = "minus"
    PLUS = "plus"
    ON_STRIP = "on-strip"


@dataclass(frozen=True)
class Strip:
    """Edges (w·xⁱ, w·xⁱ·r) for all i: a ladder of r-edges along a coset of ⟨x⟩."""

    anchor: ElementKey
    direction: str
    stable: str


def _check_strip(solver: BrittonSolver, strip: Strip):
    if not solver.is_stable(strip.stable):
        raise OracleError(f"{strip.stable!r} is not a stable letter")
    s = strip.stable if strip.stable in solver.hnn.stable_letters else solver.alphabet.inv(strip.stable)
    assoc = solver.associations[s]
    oracle = assoc.u_oracle if strip.stable == s else assoc.v_oracle
    if not oracle.contains(solver.base.letter_key(strip.direction)):
        raise OracleError(f"{strip.direction} does not generate the subgroup {strip.stable} pushes through")


def on_coset(solver: BrittonSolver, strip: Strip, key: ElementKey) -> bool:
    """Whether key lies in anchor·⟨x⟩."""
    rel = solver.multiply(solver.inverse(strip.anchor), key)
    return solver.base_cyclic_exponent(rel, strip.direction) is not None


def on_strip(solver: BrittonSolver, strip: Strip, key: ElementKey) -> bool:
    """Whether key is an endpoint of a strip edge."""
    if on_coset(solver, strip, key):
        return True
    return on_coset(solver, strip, solver.step(key, solver.alphabet.inv(strip.stable)))


def crossing_parity(solver: BrittonSolver, strip: Strip, start: ElementKey, word: Word) -> int:
    """Number of strip edges a path traverses, mod 2."""
    r = strip.stable
    r_inv = solver.alphabet.inv(r)
    crossings = 0
    p = start
    for letter in word:
        q = solver.step(p, letter)
        if (letter == r and on_coset(solver, strip, p)) or (letter == r_inv and on_coset(solver, strip, q)):
            crossings += 1
        p = q
    return crossings % 2


def strip_side(solver: BrittonSolver, ball: BallIndex, v: ElementKey, strip: Strip,
               mark_on_strip: bool = False) -> Side:
    """Side of the strip containing v; the anchor's side is MINUS.

    Parity of strip crossings along the shortlex geodesic from the anchor.
    Strip edges are open, so their endpoints belong to a side; with
    mark_on_strip they are reported as ON_STRIP instead. The ball (around
    the identity) bounds the search radius.

    Raises:
        RadiusShortfall: If v is farther from the anchor than the ball radius.
    """
    _check_strip(solver, strip)
    rel = solver.multiply(solver.inverse(strip.anchor), v)
    if rel not in ball:
        raise RadiusShortfall(f"Vertex is beyond search radius {ball.radius} of the anchor",
                              available=ball.radius)
    if mark_on_strip and on_strip(solver, strip, v):
        return Side.ON_STRIP
    path = ball.path_to(rel)
    return Side.PLUS if crossing_parity(solver, strip, strip.anchor, path) else Side.MINUS


def stable_reduced_geodesics(solver: BrittonSolver, ball: BallIndex) -> Optional[Word]:
    """First shortlex geodesic in the ball that still has a pinch, if any."""
    for key in ball.keys():
        word = ball.path_to(key)
        if solver.find_pinch(word) is not None:
            return word
    return None
