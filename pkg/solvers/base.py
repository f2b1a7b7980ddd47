"""Abstract base classes for word-problem solvers and subgroup oracles.

Implement this interface to add support for another family of groups.
"""
from abc import ABC, abstractmethod
from typing import Hashable, Optional

from presentation import Alphabet, AlphabetError, OracleError, Word

ElementKey = Hashable


class WordSolver(ABC):
    """Abstract interface for word-problem backends.

    Keys are hashable canonical forms: two words evaluate to the same key
    exactly when they represent the same group element.

    To create a new solver:
    1. Inherit from WordSolver
    2. Implement name, identity, step, multiply and inverse
    3. Add a factory to router.py

    Example:
        class CyclicSolver(WordSolver):
            @property
            def name(self) -> str:
                return "cyclic"

            @property
            def identity(self):
                return 0

            def step(self, key, letter):
                return (key + (1 if letter == "x" else -1)) % self.order
            ...
    """

    def __init__(self, alphabet: Alphabet):
        self._alphabet = alphabet

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    @abstractmethod
    def name(self) -> str:
        """Backend identifier (e.g., 'free', 'hnn')."""
        ...

    @property
    @abstractmethod
    def identity(self) -> ElementKey:
        ...

    @abstractmethod
    def step(self, key: ElementKey, letter: str) -> ElementKey:
        """Right-multiply an element by one letter."""
        ...

    @abstractmethod
    def multiply(self, x: ElementKey, y: ElementKey) -> ElementKey:
        ...

    @abstractmethod
    def inverse(self, x: ElementKey) -> ElementKey:
        ...

    def is_identity(self, key: ElementKey) -> bool:
        return key == self.identity

    def check_word(self, word: Word):
        for letter in word:
            if letter not in self._alphabet:
                raise AlphabetError(f"Letter {letter!r} is not in the {self.name} alphabet")

    def eval(self, word: Word) -> ElementKey:
        """Canonical key of the element a word represents.

        Raises:
            AlphabetError: If the word uses a letter outside the alphabet.
        """
        self.check_word(word)
        key = self.identity
        for letter in word:
            key = self.step(key, letter)
        return key

    def power(self, key: ElementKey, exponent: int) -> ElementKey:
        base = key if exponent >= 0 else self.inverse(key)
        result = self.identity
        for _ in range(abs(exponent)):
            result = self.multiply(result, base)
        return result

    def letter_key(self, letter: str) -> ElementKey:
        return self.step(self.identity, letter)

    def represent(self, key: ElementKey) -> Word:
        """A word over the alphabet representing the key.

        Only backends whose keys are readable as words support this.
        """
        raise NotImplementedError(f"{self.name} solver cannot spell its keys")


def trace_word(solver: WordSolver, word: Word) -> list[ElementKey]:
    """Walk a word edge by edge, returning every vertex visited."""
    solver.check_word(word)
    keys = [solver.identity]
    for letter in word:
        keys.append(solver.step(keys[-1], letter))
    return keys


class SubgroupOracle(ABC):
    """Exact membership for a subgroup of a base group.

    `split(b)` writes b = r·h with h in the subgroup and r a canonical
    representative of the left coset b·H, so equal cosets give equal r.
    """

    def __init__(self, solver: WordSolver, description: str):
        self.solver = solver
        self.description = description

    @abstractmethod
    def contains(self, key: ElementKey) -> bool:
        ...

    def exponent(self, key: ElementKey) -> Optional[int]:
        """Exponent m with key = generator^m, for cyclic subgroups."""
        return None

    @abstractmethod
    def split(self, key: ElementKey) -> tuple[ElementKey, ElementKey]:
        ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.description})"


class FullSubgroup(SubgroupOracle):
    """The whole base group."""

    def __init__(self, solver: WordSolver):
        super().__init__(solver, "full")

    def contains(self, key: ElementKey) -> bool:
        return True

    def split(self, key):
        return self.solver.identity, key


class TrivialSubgroup(SubgroupOracle):
    """Only the identity."""

    def __init__(self, solver: WordSolver):
        super().__init__(solver, "trivial")

    def contains(self, key: ElementKey) -> bool:
        return self.solver.is_identity(key)

    def exponent(self, key):
        return 0 if self.solver.is_identity(key) else None

    def split(self, key):
        return key, self.solver.identity


class CyclicSubgroup(SubgroupOracle):
    """Shared plumbing for cyclic subgroups ⟨g⟩ of a base group."""

    def __init__(self, solver: WordSolver, generator: ElementKey, description: str):
        if solver.is_identity(generator):
            raise OracleError(f"Cyclic subgroup generator {description} is trivial")
        super().__init__(solver, description)
        self.generator = generator

    def contains(self, key: ElementKey) -> bool:
        return self.exponent(key) is not None

    @abstractmethod
    def exponent(self, key: ElementKey) -> Optional[int]:
        ...
