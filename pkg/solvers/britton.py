"""Multiple HNN extensions solved with Britton's lemma.

Keys are tuples (b0, x1, b1, ..., xn, bn): base keys alternating with
stable letters, no pinch remaining, and every b_i before a stable letter
replaced by the canonical representative of its coset of the associated
subgroup that letter pushes through. That makes keys a normal form.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from presentation import HnnStructure, OracleError, Word, invert

from .abelian import FreeAbelianSolver, LatticeCyclicSubgroup
from .base import ElementKey, FullSubgroup, SubgroupOracle, TrivialSubgroup, WordSolver
from .free import FreeCyclicSubgroup, FreeSolver

logger = logging.getLogger(__name__)


def make_cyclic_oracle(base: WordSolver, generator: ElementKey) -> SubgroupOracle:
    """Pick the membership oracle for ⟨generator⟩ matching the base backend."""
    if base.is_identity(generator):
        return TrivialSubgroup(base)
    if isinstance(base, FreeAbelianSolver):
        return LatticeCyclicSubgroup(base, generator)
    if isinstance(base, FreeSolver):
        return FreeCyclicSubgroup(base, generator)
    raise OracleError(f"No cyclic subgroup oracle for a {base.name} base")


class Association:
    """The isomorphism φ: U -> V attached to one stable letter s (s⁻¹us = φ(u))."""

    def __init__(self, base: WordSolver, stable: str, u_oracle: SubgroupOracle,
                 v_oracle: SubgroupOracle):
        self.base = base
        self.stable = stable
        self.u_oracle = u_oracle
        self.v_oracle = v_oracle

    def forward(self, key: ElementKey) -> ElementKey:
        raise NotImplementedError

    def backward(self, key: ElementKey) -> ElementKey:
        raise NotImplementedError

    def forward_word(self, word: Word) -> tuple[str, ...]:
        raise NotImplementedError

    def backward_word(self, word: Word) -> tuple[str, ...]:
        raise NotImplementedError


class CyclicAssociation(Association):
    """u^m ↦ v^m for a single pair u -> v."""

    def __init__(self, base: WordSolver, stable: str, u: Word, v: Word):
        u_key = base.eval(u)
        v_key = base.eval(v)
        if base.is_identity(u_key) != base.is_identity(v_key):
            raise OracleError(f"Pair {u} -> {v} for {stable} relates a trivial and a nontrivial element")
        super().__init__(base, stable, make_cyclic_oracle(base, u_key), make_cyclic_oracle(base, v_key))
        self.u_word, self.v_word = u, v
        self.u_key, self.v_key = u_key, v_key

    def _exponent(self, oracle: SubgroupOracle, key: ElementKey) -> int:
        m = oracle.exponent(key)
        if m is None:
            raise OracleError(f"{key} is not in {oracle.description}")
        return m

    def forward(self, key):
        return self.base.power(self.v_key, self._exponent(self.u_oracle, key))

    def backward(self, key):
        return self.base.power(self.u_key, self._exponent(self.v_oracle, key))

    @staticmethod
    def _spell(word: Word, m: int) -> tuple[str, ...]:
        unit = word if m >= 0 else invert(word)
        return unit.letters * abs(m)

    def forward_word(self, word: Word) -> tuple[str, ...]:
        return self._spell(self.v_word, self._exponent(self.u_oracle, self.base.eval(word)))

    def backward_word(self, word: Word) -> tuple[str, ...]:
        return self._spell(self.u_word, self._exponent(self.v_oracle, self.base.eval(word)))


class FullAssociation(Association):
    """An automorphism of the base given on generators by letter pairs."""

    def __init__(self, base: WordSolver, stable: str, pairs):
        full = FullSubgroup(base)
        super().__init__(base, stable, full, full)
        alphabet = base.alphabet
        self._forward: dict[str, tuple[str, ...]] = {}
        self._backward: dict[str, tuple[str, ...]] = {}
        for u, v in pairs:
            if len(u) != 1 or len(v) != 1:
                raise OracleError(f"Full-subgroup pairs must relate single letters, got {u} -> {v}")
            x, y = u[0], v[0]
            self._forward[x] = (y,)
            self._forward[alphabet.inv(x)] = (alphabet.inv(y),)
            self._backward[y] = (x,)
            self._backward[alphabet.inv(y)] = (alphabet.inv(x),)

    def _apply(self, table: Mapping[str, tuple[str, ...]], word) -> tuple[str, ...]:
        out: list[str] = []
        for letter in word:
            if letter in table:
                out.extend(table[letter])
                continue
            # Abbreviated letters: spell them in generators first.
            spelled = self.base.represent(self.base.letter_key(letter))
            for inner in spelled:
                if inner not in table:
                    raise OracleError(f"{self.stable}: no image for letter {inner!r}")
                out.extend(table[inner])
        return tuple(out)

    def forward(self, key):
        return self.base.eval(self.base.alphabet.word(self._apply(self._forward, self.base.represent(key))))

    def backward(self, key):
        return self.base.eval(self.base.alphabet.word(self._apply(self._backward, self.base.represent(key))))

    def forward_word(self, word: Word) -> tuple[str, ...]:
        return self._apply(self._forward, word)

    def backward_word(self, word: Word) -> tuple[str, ...]:
        return self._apply(self._backward, word)


class PinchDirection(str, Enum):
    INVERSE_FIRST = "s^-1 u s"
    STABLE_FIRST = "s v s^-1"


@dataclass(frozen=True)
class Pinch:
    """A removable subword s⁻¹us (u in U) or svs⁻¹ (v in V).

    `start` and `end` index the two stable letters.
    """

    start: int
    end: int
    stable: str
    inner: Word
    direction: PinchDirection
    exponent: Optional[int]


class BrittonSolver(WordSolver):
    """Word problem of a multiple HNN extension over a base solver."""

    def __init__(self, hnn: HnnStructure, base: WordSolver,
                 associations: Mapping[str, Association]):
        super().__init__(hnn.alphabet)
        self.hnn = hnn
        self.base = base
        self.associations = dict(associations)
        self._positive: dict[str, str] = {}
        for s in hnn.stable_letters:
            self._positive[s] = s
            self._positive[hnn.alphabet.inv(s)] = s
        self._cyclic_cache: dict[str, SubgroupOracle] = {}

    @property
    def name(self) -> str:
        return "hnn"

    @property
    def identity(self) -> tuple:
        return (self.base.identity,)

    def is_stable(self, letter: str) -> bool:
        return letter in self._positive

    def stable_letter_count(self, word: Word) -> int:
        return sum(1 for x in word if x in self._positive)

    # ------------------------------------------------------------------
    # Normal form
    # ------------------------------------------------------------------

    def _append_stable(self, parts: list, x: str):
        s = self._positive[x]
        positive = x == s
        assoc = self.associations[s]
        oracle = assoc.u_oracle if positive else assoc.v_oracle
        last = parts[-1]
        if len(parts) >= 3 and parts[-2] == self.alphabet.inv(x) and oracle.contains(last):
            image = assoc.forward(last) if positive else assoc.backward(last)
            parts.pop()
            parts.pop()
            parts[-1] = self.base.multiply(parts[-1], image)
            return
        rep, member = oracle.split(last)
        parts[-1] = rep
        parts.append(x)
        parts.append(assoc.forward(member) if positive else assoc.backward(member))

    def step(self, key: tuple, letter: str) -> tuple:
        parts = list(key)
        if letter in self._positive:
            self._append_stable(parts, letter)
        else:
            parts[-1] = self.base.step(parts[-1], letter)
        return tuple(parts)

    def multiply(self, x: tuple, y: tuple) -> tuple:
        parts = list(x)
        parts[-1] = self.base.multiply(parts[-1], y[0])
        for i in range(1, len(y), 2):
            self._append_stable(parts, y[i])
            parts[-1] = self.base.multiply(parts[-1], y[i + 1])
        return tuple(parts)

    def inverse(self, x: tuple) -> tuple:
        parts = [self.base.inverse(x[-1])]
        for i in range(len(x) - 2, 0, -2):
            self._append_stable(parts, self.alphabet.inv(x[i]))
            parts[-1] = self.base.multiply(parts[-1], self.base.inverse(x[i - 1]))
        return tuple(parts)

    def eval(self, word: Word) -> tuple:
        self.check_word(word)
        reduced = self.britton_reduce(word)
        return super().eval(reduced)

    def represent(self, key: tuple) -> Word:
        letters: list[str] = []
        for i, part in enumerate(key):
            if i % 2:
                letters.append(part)
            else:
                letters.extend(self.base.represent(part).letters)
        return self.alphabet.word(letters)

    # ------------------------------------------------------------------
    # Word-level reduction
    # ------------------------------------------------------------------

    def _base_word(self, letters) -> Word:
        return self.base.alphabet.word(letters)

    def find_pinch(self, word: Word) -> Optional[Pinch]:
        """Innermost pinch, leftmost on ties."""
        inv = self.alphabet.inv
        positions = [i for i, x in enumerate(word) if x in self._positive]
        for i, j in zip(positions, positions[1:]):
            x, y = word[i], word[j]
            if y != inv(x):
                continue
            s = self._positive[x]
            assoc = self.associations[s]
            inner = self._base_word(word.letters[i + 1:j])
            if x == s:
                oracle, direction = assoc.v_oracle, PinchDirection.STABLE_FIRST
            else:
                oracle, direction = assoc.u_oracle, PinchDirection.INVERSE_FIRST
            inner_key = self.base.eval(inner)
            if oracle.contains(inner_key):
                return Pinch(i, j, s, self.alphabet.word(inner.letters), direction,
                             oracle.exponent(inner_key))
        return None

    def pinch_replacement(self, pinch: Pinch) -> Word:
        assoc = self.associations[pinch.stable]
        inner = self._base_word(pinch.inner.letters)
        if pinch.direction == PinchDirection.INVERSE_FIRST:
            letters = assoc.forward_word(inner)
        else:
            letters = assoc.backward_word(inner)
        return self.alphabet.word(letters)

    def britton_reduce(self, word: Word) -> Word:
        """Remove pinches until none is left.

        Each removal drops two stable letters, so this terminates.
        """
        current = self.alphabet.word(word.letters)
        while True:
            pinch = self.find_pinch(current)
            if pinch is None:
                return current
            replacement = self.pinch_replacement(pinch)
            current = current[:pinch.start] + replacement + current[pinch.end + 1:]

    # ------------------------------------------------------------------
    # Base subgroups
    # ------------------------------------------------------------------

    def base_part(self, key: tuple) -> Optional[ElementKey]:
        """The base element when the key has no stable letters."""
        return key[0] if len(key) == 1 else None

    def cyclic_oracle(self, letter: str) -> SubgroupOracle:
        if letter not in self._cyclic_cache:
            self._cyclic_cache[letter] = make_cyclic_oracle(self.base, self.base.letter_key(letter))
        return self._cyclic_cache[letter]

    def base_cyclic_exponent(self, key: tuple, letter: str) -> Optional[int]:
        base_key = self.base_part(key)
        if base_key is None:
            return None
        return self.cyclic_oracle(letter).exponent(base_key)
