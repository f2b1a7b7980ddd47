"""Free abelian groups Z^n with each letter sent to an integer vector.

Keys are tuples of ints. Relators listed in the presentation are not used
for solving; the map defines the group and relators are checked against it.
"""
import logging
import re
from typing import Mapping, Optional, Sequence

import numpy as np

from presentation import Alphabet, PresentationError, Word

from .base import CyclicSubgroup, WordSolver

logger = logging.getLogger(__name__)

_VECTOR_RE = re.compile(r"^\((-?\d+(?:,-?\d+)*)\)$")


def parse_vector(text: str) -> tuple[int, ...]:
    match = _VECTOR_RE.match(text.replace(" ", ""))
    if match is None:
        raise PresentationError(f"Bad lattice vector {text!r}")
    return tuple(int(x) for x in match.group(1).split(","))


class FreeAbelianSolver(WordSolver):
    """Z^dim with letter images given by a map; inverses are negated."""

    def __init__(self, alphabet: Alphabet, dim: int, images: Mapping[str, str]):
        super().__init__(alphabet)
        self.dim = dim
        vectors: dict[str, tuple[int, ...]] = {}
        for letter, text in images.items():
            vec = parse_vector(text) if isinstance(text, str) else tuple(text)
            if len(vec) != dim:
                raise PresentationError(f"map {letter}: expected {dim} coordinates, got {len(vec)}")
            vectors[letter] = vec
            vectors[alphabet.inv(letter)] = tuple(-x for x in vec)
        missing = [x for x in alphabet.letters if x not in vectors]
        if missing:
            raise PresentationError(f"free-abelian map misses letters: {' '.join(missing)}")

        self._vectors = vectors
        # Rows follow alphabet order so a word evaluates as counts @ matrix.
        self._matrix = np.array([vectors[x] for x in alphabet.letters], dtype=np.int64)
        self._identity = (0,) * dim

    @property
    def name(self) -> str:
        return "free-abelian"

    @property
    def identity(self) -> tuple:
        return self._identity

    def vector(self, letter: str) -> tuple[int, ...]:
        return self._vectors[letter]

    def step(self, key: tuple, letter: str) -> tuple:
        return tuple(a + b for a, b in zip(key, self._vectors[letter]))

    def multiply(self, x: tuple, y: tuple) -> tuple:
        return tuple(a + b for a, b in zip(x, y))

    def inverse(self, x: tuple) -> tuple:
        return tuple(-a for a in x)

    def power(self, key: tuple, exponent: int) -> tuple:
        return tuple(exponent * a for a in key)

    def eval(self, word: Word) -> tuple:
        self.check_word(word)
        if not len(word):
            return self._identity
        indices = np.fromiter((self.alphabet.index(x) for x in word), dtype=np.int64)
        counts = np.bincount(indices, minlength=len(self.alphabet))
        return tuple(int(x) for x in counts @ self._matrix)

    def represent(self, key: tuple) -> Word:
        # Spell coordinates with letters mapped to unit vectors.
        letters = []
        for axis, amount in enumerate(key):
            if amount == 0:
                continue
            unit = tuple(1 if i == axis else 0 for i in range(self.dim))
            sign = unit if amount > 0 else tuple(-x for x in unit)
            letter = next((x for x in self.alphabet.letters if self._vectors[x] == sign), None)
            if letter is None:
                raise NotImplementedError(f"No unit letter along axis {axis}")
            letters.extend([letter] * abs(amount))
        return self.alphabet.word(letters)


def cyclic_membership_lattice(v: Sequence[int], g: Sequence[int]) -> Optional[int]:
    """Integer m with v = m·g, if there is one."""
    v = np.asarray(v, dtype=np.int64)
    g = np.asarray(g, dtype=np.int64)
    nonzero = np.flatnonzero(g)
    if nonzero.size == 0:
        raise ValueError("cyclic_membership_lattice needs a nonzero generator")
    i = int(nonzero[0])
    if v[i] % g[i]:
        return None
    m = int(v[i] // g[i])
    if np.array_equal(v, m * g):
        return m
    return None


class LatticeCyclicSubgroup(CyclicSubgroup):
    """⟨g⟩ in Z^n for a nonzero lattice vector g."""

    def __init__(self, solver: FreeAbelianSolver, generator: tuple):
        super().__init__(solver, generator, f"<{generator}>")
        self._axis = next(i for i, x in enumerate(generator) if x)

    def exponent(self, key: tuple) -> Optional[int]:
        return cyclic_membership_lattice(key, self.generator)

    def split(self, key: tuple) -> tuple[tuple, tuple]:
        m = key[self._axis] // self.generator[self._axis]
        member = tuple(m * x for x in self.generator)
        rep = tuple(a - b for a, b in zip(key, member))
        return rep, member
