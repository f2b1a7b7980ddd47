"""Alphabets, words, finite presentations and HNN structures.

This is the shared vocabulary of the workbench. Everything here is
immutable after construction. The presentation file format is line based:

    name wise
    generators a A b B c C d D s S t T
    inverses a=A b=B c=C d=D s=S t=T
    relator cBA
    backend hnn
    base-backend free-abelian dim 2 map a=(1,0) b=(0,1) c=(1,1) d=(2,2)
    stable s pair a -> d
    stable t pair b -> d

`#` starts a comment. Unknown keys are errors.
"""
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

logger = logging.getLogger(__name__)


# =============================================================================
# ERRORS
# =============================================================================

class WorkbenchError(RuntimeError):
    """Root of every error raised by the workbench."""


class PresentationError(WorkbenchError, ValueError):
    """A presentation file or structure is malformed."""


class AlphabetError(PresentationError):
    """A letter is not part of the alphabet."""


class OracleError(WorkbenchError):
    """A subgroup membership oracle is misconfigured."""


class BudgetExceeded(WorkbenchError):
    """A search ran past its configured budget.

    Carries whatever partial progress is certain, so callers can report it
    instead of a bogus negative answer.
    """

    def __init__(self, message: str, largest_radius: Optional[int] = None,
                 explored: Optional[int] = None, lower_bound: Optional[int] = None):
        super().__init__(message)
        self.largest_radius = largest_radius
        self.explored = explored
        self.lower_bound = lower_bound


class RadiusShortfall(WorkbenchError):
    """A query needs a larger ball than the one available."""

    def __init__(self, message: str, needed: Optional[int] = None,
                 available: Optional[int] = None):
        super().__init__(message)
        self.needed = needed
        self.available = available


class PremiseViolation(WorkbenchError):
    """The inputs of a construction do not satisfy its hypotheses."""


class ConstantViolation(WorkbenchError):
    """A construction produced output that fails its own certified bound."""


class ShorteningUnavailable(WorkbenchError):
    """A required loop shortening does not exist at the given constant."""


class StuckLoop(WorkbenchError):
    """Iterated shortening reached a loop with no shorter fellow traveler."""

    def __init__(self, message: str, loop: "Word" = None, k: Optional[int] = None):
        super().__init__(message)
        self.loop = loop
        self.k = k


class LemmaBoundViolation(WorkbenchError):
    """A word shorter than the claimed lower bound reaches the target."""

    def __init__(self, message: str, length: Optional[int] = None, word: "Word" = None):
        super().__init__(message)
        self.length = length
        self.word = word


class UnknownPreset(WorkbenchError, KeyError):
    """No preset with the requested name."""

    def __str__(self) -> str:
        return RuntimeError.__str__(self)


# =============================================================================
# ALPHABETS AND WORDS
# =============================================================================

class BackendHint(str, Enum):
    FREE = "free"
    FREE_ABELIAN = "free-abelian"
    DIRECT_PRODUCT_FREE = "direct-product-free"
    HNN = "hnn"


def default_inverse(token: str) -> str:
    """Formal inverse by convention: reverse and swap case ("aC" <-> "cA")."""
    return token[::-1].swapcase()


class Alphabet:
    """Ordered, involutive set of letters.

    Letters may be multi-character tokens as long as no token is a proper
    prefix of another; that keeps `tokenize` unambiguous.
    """

    def __init__(self, letters: Sequence[str], inverses: Optional[Mapping[str, str]] = None):
        letters = tuple(letters)
        if len(set(letters)) != len(letters):
            dupes = sorted({x for x in letters if letters.count(x) > 1})
            raise PresentationError(f"Duplicate letters: {' '.join(dupes)}")
        for letter in letters:
            if not letter or any(ch.isspace() or ch in "#=()," for ch in letter):
                raise PresentationError(f"Invalid letter token: {letter!r}")

        inv: dict[str, str] = {}
        if inverses is None:
            for letter in letters:
                inv[letter] = default_inverse(letter)
        else:
            for x, y in inverses.items():
                inv[x] = y
                inv[y] = x

        for letter in letters:
            partner = inv.get(letter)
            if partner is None:
                raise PresentationError(f"Letter {letter!r} has no inverse")
            if partner == letter:
                raise PresentationError(f"Letter {letter!r} is its own inverse")
            if partner not in letters:
                raise PresentationError(f"Inverse {partner!r} of {letter!r} is not a letter")
            if inv.get(partner) != letter:
                raise PresentationError(f"Inverse map is not an involution at {letter!r}")

        for a in letters:
            for b in letters:
                if a != b and b.startswith(a):
                    raise PresentationError(f"Letter {a!r} is a prefix of {b!r}")

        self.letters: tuple[str, ...] = letters
        self._inv = {x: inv[x] for x in letters}
        self._index = {x: i for i, x in enumerate(letters)}
        longest_first = sorted(letters, key=lambda x: (-len(x), x))
        self._token_re = re.compile("|".join(re.escape(x) for x in longest_first))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __contains__(self, letter: str) -> bool:
        return letter in self._index

    def __eq__(self, other) -> bool:
        return (isinstance(other, Alphabet) and self.letters == other.letters
                and self._inv == other._inv)

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"Alphabet({' '.join(self.letters)})"

    def inv(self, letter: str) -> str:
        try:
            return self._inv[letter]
        except KeyError:
            raise AlphabetError(f"Letter {letter!r} is not in {self!r}") from None

    def index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise AlphabetError(f"Letter {letter!r} is not in {self!r}") from None

    def tokenize(self, text: str) -> tuple[str, ...]:
        """Split text into letters, ignoring whitespace."""
        compact = "".join(text.split())
        out = []
        pos = 0
        while pos < len(compact):
            match = self._token_re.match(compact, pos)
            if match is None:
                raise AlphabetError(
                    f"Unknown letter at {compact[pos:pos + 3]!r} in {text!r}"
                )
            out.append(match.group(0))
            pos = match.end()
        return tuple(out)

    def word(self, spec: Union[str, Iterable[str], "Word"] = "") -> "Word":
        """Build a Word from text or a letter sequence, checking every letter."""
        if isinstance(spec, Word):
            letters = spec.letters
        elif isinstance(spec, str):
            letters = self.tokenize(spec)
        else:
            letters = tuple(spec)
        for letter in letters:
            if letter not in self._index:
                raise AlphabetError(f"Letter {letter!r} is not in {self!r}")
        return Word(letters, self)

    def representatives(self) -> tuple[str, ...]:
        """First letter of each inverse pair, in declared order."""
        seen: set[str] = set()
        reps = []
        for letter in self.letters:
            if letter not in seen:
                reps.append(letter)
                seen.add(letter)
                seen.add(self._inv[letter])
        return tuple(reps)

    def restrict(self, letters: Iterable[str]) -> "Alphabet":
        """Sub-alphabet on the given letters and their inverses, order kept."""
        keep = set()
        for letter in letters:
            keep.add(letter)
            keep.add(self.inv(letter))
        ordered = [x for x in self.letters if x in keep]
        return Alphabet(ordered, {x: self._inv[x] for x in ordered})

    def shortlex_key(self, word: Iterable[str]) -> tuple[int, tuple[int, ...]]:
        letters = tuple(word)
        return len(letters), tuple(self._index[x] for x in letters)


@dataclass(frozen=True)
class Word:
    """A finite letter sequence.

    Position t of a path is the prefix of length min(t, len); beyond its
    length a path stays frozen at its endpoint.
    """

    letters: tuple[str, ...]
    alphabet: Alphabet = field(compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Word(self.letters[item], self.alphabet)
        return self.letters[item]

    def __add__(self, other: "Word") -> "Word":
        if isinstance(other, str):
            other = self.alphabet.word(other)
        return Word(self.letters + tuple(other.letters), self.alphabet)

    def __mul__(self, times: int) -> "Word":
        return Word(self.letters * times, self.alphabet)

    def __str__(self) -> str:
        return "".join(self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def prefix(self, t: int) -> "Word":
        return Word(self.letters[:max(0, t)], self.alphabet)

    def inverse(self) -> "Word":
        return invert(self)

    def reduced(self) -> "Word":
        return free_reduce(self)

    def shortlex_key(self) -> tuple[int, tuple[int, ...]]:
        return self.alphabet.shortlex_key(self.letters)


def free_reduce(w: Word) -> Word:
    """Cancel adjacent x·inv(x) pairs until none remain."""
    inv = w.alphabet.inv
    stack: list[str] = []
    for letter in w.letters:
        if stack and stack[-1] == inv(letter):
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack), w.alphabet)


def invert(w: Word) -> Word:
    inv = w.alphabet.inv
    return Word(tuple(inv(x) for x in reversed(w.letters)), w.alphabet)


# =============================================================================
# PRESENTATIONS
# =============================================================================

@dataclass(frozen=True)
class BackendSpec:
    """How the word problem of a presentation is solved.

    `images` keeps the raw right-hand sides of `map` entries, either an
    integer vector "(1,0)" or a word "abAB"; solvers interpret them.
    """

    kind: BackendHint
    dim: Optional[int] = None
    images: tuple[tuple[str, str], ...] = ()
    factors: tuple[str, ...] = ()

    def image_map(self) -> dict[str, str]:
        return dict(self.images)

    def render(self) -> str:
        parts = [self.kind.value]
        if self.dim is not None:
            parts.append(f"dim {self.dim}")
        if self.images:
            parts.append("map " + " ".join(f"{x}={img}" for x, img in self.images))
        if self.factors:
            parts.append("factors " + " ".join(self.factors))
        return " ".join(parts)


@dataclass(frozen=True)
class Presentation:
    name: str
    alphabet: Alphabet
    relators: tuple[Word, ...]
    backend: BackendSpec

    @property
    def backend_hint(self) -> BackendHint:
        return self.backend.kind


@dataclass(frozen=True)
class HnnStructure:
    """A multiple HNN extension of a base presentation.

    `pairs[s]` lists (u, v) with s⁻¹ u s = v; the pairing defines the
    associated isomorphism on generators. Stable letters listed in
    `full_subgroups` have the whole base group as associated subgroup.
    """

    name: str
    base: Presentation
    alphabet: Alphabet
    stable_letters: tuple[str, ...]
    pairs: Mapping[str, tuple[tuple[Word, Word], ...]]
    full_subgroups: frozenset = frozenset()

    @property
    def backend_hint(self) -> BackendHint:
        return BackendHint.HNN

    @property
    def relators(self) -> tuple[Word, ...]:
        """Base relators followed by the stable relators s⁻¹ u s v⁻¹."""
        derived = []
        for s in self.stable_letters:
            for u, v in self.pairs[s]:
                word = self.alphabet.word(
                    (self.alphabet.inv(s),) + u.letters + (s,) + invert(v).letters
                )
                derived.append(word)
        lifted = tuple(self.alphabet.word(r.letters) for r in self.base.relators)
        return lifted + tuple(derived)

    def is_stable(self, letter: str) -> bool:
        return letter in self.stable_letters or (
            letter in self.alphabet and self.alphabet.inv(letter) in self.stable_letters
        )


Structure = Union[Presentation, HnnStructure]

_KEYS = {"name", "generators", "inverses", "relator", "backend", "base-backend", "stable"}
_BACKEND_WORDS = {"dim", "map", "factors"}


def _parse_backend(text: str, lineno: int) -> BackendSpec:
    tokens = text.split()
    if not tokens:
        raise PresentationError(f"line {lineno}: empty backend")
    try:
        kind = BackendHint(tokens[0])
    except ValueError:
        raise PresentationError(f"line {lineno}: unknown backend {tokens[0]!r}") from None

    dim = None
    images: list[tuple[str, str]] = []
    factors: list[str] = []
    section = None
    i = 1
    while i < len(tokens):
        tok = tokens[i]
        if tok in _BACKEND_WORDS:
            section = tok
            if tok == "dim":
                if i + 1 >= len(tokens):
                    raise PresentationError(f"line {lineno}: dim needs a value")
                try:
                    dim = int(tokens[i + 1])
                except ValueError:
                    raise PresentationError(f"line {lineno}: bad dim {tokens[i + 1]!r}") from None
                i += 2
                section = None
                continue
        elif section == "map":
            if "=" not in tok:
                raise PresentationError(f"line {lineno}: bad map entry {tok!r}")
            letter, image = tok.split("=", 1)
            images.append((letter, image))
        elif section == "factors":
            factors.append(tok)
        else:
            raise PresentationError(f"line {lineno}: unknown backend option {tok!r}")
        i += 1

    if kind == BackendHint.FREE_ABELIAN and dim is None:
        raise PresentationError(f"line {lineno}: free-abelian backend needs dim")
    if kind == BackendHint.DIRECT_PRODUCT_FREE and not factors:
        raise PresentationError(f"line {lineno}: direct-product-free backend needs factors")
    return BackendSpec(kind, dim, tuple(images), tuple(factors))


def _parse_stable(text: str, lineno: int) -> tuple[str, list[tuple[str, str]], bool]:
    tokens = text.split()
    if not tokens:
        raise PresentationError(f"line {lineno}: stable needs a letter")
    letter = tokens[0]
    pairs = []
    full = False
    i = 1
    while i < len(tokens):
        if tokens[i] == "pair":
            if i + 3 >= len(tokens) or tokens[i + 2] != "->":
                raise PresentationError(f"line {lineno}: pair must read 'pair u -> v'")
            pairs.append((tokens[i + 1], tokens[i + 3]))
            i += 4
        elif tokens[i] == "oracle":
            if i + 1 >= len(tokens) or tokens[i + 1] != "full":
                raise PresentationError(f"line {lineno}: only 'oracle full' is supported")
            full = True
            i += 2
        else:
            raise PresentationError(f"line {lineno}: unknown stable option {tokens[i]!r}")
    if not pairs:
        raise PresentationError(f"line {lineno}: stable letter {letter!r} has no pairs")
    if len(pairs) > 1 and not full:
        raise PresentationError(
            f"line {lineno}: several pairs for {letter!r} need 'oracle full'"
        )
    return letter, pairs, full


def parse_presentation(text: str) -> Structure:
    """Parse presentation-file contents.

    Returns a Presentation, or an HnnStructure when the backend is `hnn`.

    Raises:
        PresentationError: malformed file, duplicate or unknown letters,
            stable letters colliding with the base
    """
    name = None
    generators: Optional[list[str]] = None
    inverses: dict[str, str] = {}
    relator_texts: list[tuple[int, str]] = []
    backend = None
    base_backend = None
    stables: list[tuple[int, str, list[tuple[str, str]], bool]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key not in _KEYS:
            raise PresentationError(f"line {lineno}: unknown key {key!r}")
        if key == "name":
            name = rest
        elif key == "generators":
            if generators is not None:
                raise PresentationError(f"line {lineno}: generators declared twice")
            generators = rest.split()
        elif key == "inverses":
            for entry in rest.split():
                if entry.count("=") != 1:
                    raise PresentationError(f"line {lineno}: bad inverse entry {entry!r}")
                x, y = entry.split("=")
                if x in inverses or y in inverses:
                    raise PresentationError(f"line {lineno}: duplicate inverse for {entry!r}")
                inverses[x] = y
                inverses[y] = x
        elif key == "relator":
            relator_texts.append((lineno, rest))
        elif key == "backend":
            backend = _parse_backend(rest, lineno)
        elif key == "base-backend":
            base_backend = _parse_backend(rest, lineno)
        elif key == "stable":
            stables.append((lineno,) + _parse_stable(rest, lineno))

    if name is None:
        raise PresentationError("missing 'name'")
    if generators is None:
        raise PresentationError("missing 'generators'")
    if backend is None:
        raise PresentationError("missing 'backend'")

    # Pair up letters the file leaves implicit by convention.
    full_inverses = dict(inverses)
    for letter in generators:
        if letter not in full_inverses:
            full_inverses[letter] = default_inverse(letter)
    alphabet = Alphabet(generators, {x: full_inverses[x] for x in generators})

    relators = []
    for lineno, rel in relator_texts:
        try:
            relators.append(alphabet.word(rel))
        except AlphabetError as e:
            raise AlphabetError(f"line {lineno}: relator {rel!r}: {e}") from None

    if backend.kind != BackendHint.HNN:
        if stables or base_backend is not None:
            raise PresentationError("stable letters need 'backend hnn'")
        _check_backend_letters(backend, alphabet)
        structure = Presentation(name, alphabet, tuple(relators), backend)
        logger.debug(f"Parsed presentation {name}: {len(alphabet)} letters, {len(relators)} relators")
        return structure

    if base_backend is None:
        raise PresentationError("hnn backend needs 'base-backend'")
    if not stables:
        raise PresentationError("hnn backend needs at least one 'stable' line")

    stable_letters = []
    stable_set = set()
    for lineno, letter, _, _ in stables:
        if letter not in alphabet:
            raise AlphabetError(f"line {lineno}: stable letter {letter!r} is not a generator")
        if letter in stable_set or alphabet.inv(letter) in stable_set:
            raise PresentationError(f"line {lineno}: stable letter {letter!r} declared twice")
        stable_letters.append(letter)
        stable_set.update({letter, alphabet.inv(letter)})

    base_letters = [x for x in alphabet.letters if x not in stable_set]
    base_alphabet = alphabet.restrict(base_letters) if base_letters else Alphabet([])

    for rel in relators:
        for letter in rel:
            if letter in stable_set:
                raise PresentationError(
                    f"stable letter {letter!r} collides with the base: used in relator {rel}"
                )
    _check_backend_letters(base_backend, base_alphabet, stable_set)

    pairs: dict[str, tuple[tuple[Word, Word], ...]] = {}
    full = set()
    for lineno, letter, raw_pairs, is_full in stables:
        parsed = []
        for u_text, v_text in raw_pairs:
            try:
                u = base_alphabet.word(u_text)
                v = base_alphabet.word(v_text)
            except AlphabetError as e:
                raise PresentationError(
                    f"line {lineno}: pair {u_text} -> {v_text} must be over the base: {e}"
                ) from None
            parsed.append((u, v))
        pairs[letter] = tuple(parsed)
        if is_full:
            full.add(letter)

    base = Presentation(
        name,
        base_alphabet,
        tuple(base_alphabet.word(r.letters) for r in relators),
        base_backend,
    )
    structure = HnnStructure(
        name=name,
        base=base,
        alphabet=alphabet,
        stable_letters=tuple(stable_letters),
        pairs=pairs,
        full_subgroups=frozenset(full),
    )
    logger.debug(f"Parsed HNN structure {name}: {len(stable_letters)} stable letters")
    return structure


def _check_backend_letters(spec: BackendSpec, alphabet: Alphabet, stable: set = frozenset()):
    for letter, _ in spec.images:
        if letter in stable:
            raise PresentationError(f"stable letter {letter!r} collides with the base backend map")
        if letter not in alphabet:
            raise AlphabetError(f"backend map names unknown letter {letter!r}")


def serialize_presentation(structure: Structure) -> str:
    """Render the canonical file form; parse then serialize is a fixed point."""
    alphabet = structure.alphabet
    lines = [f"name {structure.name}", "generators " + " ".join(alphabet.letters)]
    reps = alphabet.representatives()
    lines.append("inverses " + " ".join(f"{x}={alphabet.inv(x)}" for x in reps))

    if isinstance(structure, HnnStructure):
        for rel in structure.base.relators:
            lines.append(f"relator {rel}")
        lines.append("backend hnn")
        lines.append("base-backend " + structure.base.backend.render())
        for s in structure.stable_letters:
            parts = [f"stable {s}"]
            for u, v in structure.pairs[s]:
                parts.append(f"pair {u} -> {v}")
            if s in structure.full_subgroups:
                parts.append("oracle full")
            lines.append(" ".join(parts))
    else:
        for rel in structure.relators:
            lines.append(f"relator {rel}")
        lines.append("backend " + structure.backend.render())

    return "\n".join(lines) + "\n"
