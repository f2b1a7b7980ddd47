"""Direct products of free groups, evaluated through a letter homomorphism.

Each factor is a free group on a set of single-character vertex names
(lowercase) with inverses by case swap. An alphabet token such as "aC"
sends each of its characters into the factor containing it, so
ρ(aC) = (a, C, 1) when the factors are ab, cd and ef.
"""
import logging
from typing import Sequence

from presentation import Alphabet, PresentationError, Word

from .base import WordSolver

logger = logging.getLogger(__name__)


def _push(component: str, ch: str) -> str:
    if component and component[-1] == ch.swapcase():
        return component[:-1]
    return component + ch


def _concat(x: str, y: str) -> str:
    out = x
    for ch in y:
        out = _push(out, ch)
    return out


def _invert(x: str) -> str:
    return x[::-1].swapcase()


class DirectProductFreeSolver(WordSolver):
    """Keys are tuples of freely reduced strings, one per factor."""

    def __init__(self, alphabet: Alphabet, factors: Sequence[str]):
        super().__init__(alphabet)
        self.factors = tuple(factors)
        self._factor_of: dict[str, int] = {}
        for i, factor in enumerate(self.factors):
            for vertex in factor:
                if not vertex.islower() or vertex in self._factor_of:
                    raise PresentationError(f"Bad or repeated factor letter {vertex!r}")
                self._factor_of[vertex] = i

        # Image of every token as a sequence of (factor, character) pushes.
        self._images: dict[str, tuple[tuple[int, str], ...]] = {}
        for token in alphabet.letters:
            pushes = []
            for ch in token:
                factor = self._factor_of.get(ch.lower())
                if factor is None:
                    raise PresentationError(f"Letter {token!r} uses {ch!r}, which is in no factor")
                pushes.append((factor, ch))
            self._images[token] = tuple(pushes)
        self._identity = ("",) * len(self.factors)

    @property
    def name(self) -> str:
        return "direct-product-free"

    @property
    def identity(self) -> tuple:
        return self._identity

    def step(self, key: tuple, letter: str) -> tuple:
        parts = list(key)
        for factor, ch in self._images[letter]:
            parts[factor] = _push(parts[factor], ch)
        return tuple(parts)

    def multiply(self, x: tuple, y: tuple) -> tuple:
        return tuple(_concat(a, b) for a, b in zip(x, y))

    def inverse(self, x: tuple) -> tuple:
        return tuple(_invert(a) for a in x)

    def factor_key(self, text: str) -> tuple:
        """Key of a word written in vertex names, e.g. "ffddEEC"."""
        parts = list(self._identity)
        for ch in text:
            factor = self._factor_of.get(ch.lower())
            if factor is None:
                raise PresentationError(f"{ch!r} is in no factor")
            parts[factor] = _push(parts[factor], ch)
        return tuple(parts)

    def exponent_sum(self, letter: str) -> int:
        """Image of a letter under the map sending every factor generator to 1."""
        return sum(1 if ch.islower() else -1 for _, ch in self._images[letter])


def eval_stallings(solver: DirectProductFreeSolver, w: Word) -> tuple[str, ...]:
    """Componentwise freely reduced image of a word in the product of free groups."""
    return solver.eval(w)
