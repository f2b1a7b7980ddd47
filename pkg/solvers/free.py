"""Free groups, optionally with letters that abbreviate words.

Keys are tuples of freely reduced basis letters. A `map c=abAB` entry makes
c an abbreviation: every occurrence of c is replaced by its image.
"""
import logging
from typing import Mapping, Optional

from presentation import Alphabet, AlphabetError, OracleError, PresentationError, Word

from .base import CyclicSubgroup, WordSolver

logger = logging.getLogger(__name__)


def _reduce_into(stack: list[str], letters, inv: Mapping[str, str]):
    for letter in letters:
        if stack and stack[-1] == inv[letter]:
            stack.pop()
        else:
            stack.append(letter)


class FreeSolver(WordSolver):
    """Free group on the letters without a map entry."""

    def __init__(self, alphabet: Alphabet, images: Optional[Mapping[str, str]] = None):
        super().__init__(alphabet)
        images = dict(images or {})
        defined = set(images)
        for letter in list(defined):
            defined.add(alphabet.inv(letter))
        basis_letters = [x for x in alphabet.letters if x not in defined]
        self.basis = alphabet.restrict(basis_letters) if basis_letters else Alphabet([])
        self._inv = {x: self.basis.inv(x) for x in self.basis}

        # Expansion of every alphabet letter into basis letters.
        self._expansion: dict[str, tuple[str, ...]] = {x: (x,) for x in self.basis}
        for letter, text in images.items():
            try:
                expanded = self.basis.tokenize(text)
            except AlphabetError as e:
                raise PresentationError(f"map {letter}={text}: {e}") from None
            stack: list[str] = []
            _reduce_into(stack, expanded, self._inv)
            self._expansion[letter] = tuple(stack)
            self._expansion[alphabet.inv(letter)] = tuple(
                self._inv[x] for x in reversed(stack)
            )
        if images:
            logger.debug(f"Free solver with abbreviations: {sorted(images)}")

    @property
    def name(self) -> str:
        return "free"

    @property
    def identity(self) -> tuple:
        return ()

    def step(self, key: tuple, letter: str) -> tuple:
        stack = list(key)
        _reduce_into(stack, self._expansion[letter], self._inv)
        return tuple(stack)

    def multiply(self, x: tuple, y: tuple) -> tuple:
        stack = list(x)
        _reduce_into(stack, y, self._inv)
        return tuple(stack)

    def inverse(self, x: tuple) -> tuple:
        return tuple(self._inv[a] for a in reversed(x))

    def eval(self, word: Word) -> tuple:
        self.check_word(word)
        stack: list[str] = []
        for letter in word:
            _reduce_into(stack, self._expansion[letter], self._inv)
        return tuple(stack)

    def represent(self, key: tuple) -> Word:
        return self.alphabet.word(key)

    def is_cyclically_reduced(self, key: tuple) -> bool:
        return len(key) < 2 or key[0] != self._inv[key[-1]]


def _is_proper_power(letters: tuple) -> bool:
    n = len(letters)
    for d in range(1, n // 2 + 1):
        if n % d == 0 and letters[:d] * (n // d) == letters:
            return True
    return False


class FreeCyclicSubgroup(CyclicSubgroup):
    """⟨g⟩ in a free group, g cyclically reduced and not a proper power.

    Under those conditions powers of g concatenate without cancellation,
    so membership is a literal power test on the reduced word.
    """

    def __init__(self, solver: FreeSolver, generator: tuple):
        if not solver.is_cyclically_reduced(generator):
            raise OracleError(f"Generator {''.join(generator)} is not cyclically reduced")
        if _is_proper_power(generator):
            raise OracleError(f"Generator {''.join(generator)} is a proper power")
        super().__init__(solver, generator, f"<{''.join(generator)}>")
        self._inverse = solver.inverse(generator)

    def exponent(self, key: tuple) -> Optional[int]:
        if not key:
            return 0
        g = self.generator
        n = len(g)
        if len(key) % n:
            return None
        times = len(key) // n
        if key == g * times:
            return times
        if key == self._inverse * times:
            return -times
        return None

    def split(self, key: tuple) -> tuple[tuple, tuple]:
        # Shortest element of the coset key·⟨g⟩; every candidate no longer
        # than key lies within this exponent window.
        window = 2 * len(key) // len(self.generator) + 1
        best = None
        best_m = 0
        for m in range(-window, window + 1):
            candidate = self.solver.multiply(key, self.solver.power(self.generator, m))
            rank = (len(candidate), "".join(candidate))
            if best is None or rank < best:
                best = rank
                best_m = m
        rep = self.solver.multiply(key, self.solver.power(self.generator, best_m))
        member = self.solver.power(self.generator, -best_m)
        return rep, member


def cyclic_membership_free(w: Word, g: Word) -> Optional[int]:
    """Exponent m with free_reduce(w) = g^m literally, if there is one.

    Raises:
        OracleError: If g is not cyclically reduced or is a proper power.
    """
    alphabet = g.alphabet
    solver = FreeSolver(alphabet)
    oracle = FreeCyclicSubgroup(solver, solver.eval(g))
    return oracle.exponent(solver.eval(alphabet.word(w.letters)))
