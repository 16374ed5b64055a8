"""Countable-state Markov shifts, admissible words and word collections.

A shift is described by an alphabet (an explicit finite tuple, or the
positive integers with a membership predicate) together with a 0/1
incidence oracle on symbol pairs.  Countable alphabets are never
materialised: every enumeration goes through a finite :class:`Truncation`,
and pressure computations approach the full system by exhausting it with
growing truncations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .errors import DomainError, PreconditionError

Symbol = object  # hashable + orderable; ints for the built-in families


class ShiftSpec:
    """A Markov shift: alphabet plus incidence oracle.

    ``symbols`` is an explicit tuple for finite alphabets;  ``None`` means
    the alphabet is the positive integers filtered by ``contains``.
    The incidence oracle is memoised so repeated queries always agree.
    """

    def __init__(
        self,
        incidence: Callable[[Symbol, Symbol], bool],
        symbols: Optional[tuple] = None,
        contains: Optional[Callable[[Symbol], bool]] = None,
        family: Optional[str] = None,
        family_params: Optional[dict] = None,
        name: str = "",
    ):
        self._incidence = incidence
        self.symbols = tuple(symbols) if symbols is not None else None
        self._contains = contains
        self.family = family
        self.family_params = dict(family_params or {})
        self.name = name or (family or "custom")
        self._cache: dict = {}

    # -- alphabet -----------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.symbols is not None

    def in_alphabet(self, s) -> bool:
        if self.symbols is not None:
            return s in self._symbol_set
        if self._contains is not None:
            return bool(self._contains(s))
        return isinstance(s, int) and s >= 1

    @property
    def _symbol_set(self):
        try:
            return self.__symbol_set
        except AttributeError:
            self.__symbol_set = frozenset(self.symbols)
            return self.__symbol_set

    # -- incidence ----------------------------------------------------

    def allows(self, a, b) -> bool:
        """Incidence oracle: may symbol ``b`` follow symbol ``a``?"""
        key = (a, b)
        hit = self._cache.get(key)
        if hit is None:
            if not self.in_alphabet(a):
                raise DomainError(f"symbol {a!r} not in alphabet of {self.name}")
            if not self.in_alphabet(b):
                raise DomainError(f"symbol {b!r} not in alphabet of {self.name}")
            hit = self._cache[key] = bool(self._incidence(a, b))
        return hit

    def successors(self, a, within: Iterable) -> list:
        return [b for b in within if self.allows(a, b)]

    def __repr__(self):
        size = len(self.symbols) if self.symbols is not None else "countable"
        return f"ShiftSpec({self.name!r}, alphabet={size})"


# -- built-in families ---------------------------------------------------


def full_shift(n: int) -> ShiftSpec:
    """Full shift on ``n`` symbols ``1..n``: every transition allowed."""
    if n < 1:
        raise DomainError("full shift needs at least one symbol")
    return ShiftSpec(
        lambda a, b: True,
        symbols=tuple(range(1, n + 1)),
        family="full",
        family_params={"n": n},
        name=f"full-shift({n})",
    )


def renewal_shift() -> ShiftSpec:
    """Renewal shift on the positive integers rooted at 1.

    Transitions: 1 -> n for every n, and n -> n-1 for n >= 2.   Mixing but
    not finitely irreducible; the standard countable-alphabet test bed.
    """

    def inc(a, b):
        return a == 1 or b == a - 1

    return ShiftSpec(inc, symbols=None, family="renewal", name="renewal")


def from_matrix(rows, symbols: Optional[Iterable] = None) -> ShiftSpec:
    """Finite shift from an explicit 0/1 matrix (row = source symbol)."""
    rows = [list(r) for r in rows]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DomainError("incidence matrix must be square")
    syms = tuple(symbols) if symbols is not None else tuple(range(1, n + 1))
    if len(syms) != n:
        raise DomainError("symbol list length must match matrix size")
    index = {s: i for i, s in enumerate(syms)}
    return ShiftSpec(
        lambda a, b: bool(rows[index[a]][index[b]]),
        symbols=syms,
        family="matrix",
        family_params={"rows": tuple(tuple(int(bool(x)) for x in r) for r in rows)},
        name="matrix",
    )


# -- words ----------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """A finite admissible word.  Construct through :func:`word` so that
    admissibility under the owning spec has actually been checked."""

    symbols: tuple

    @property
    def length(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)


def is_admissible(spec: ShiftSpec, symbols) -> bool:
    """True iff every consecutive pair passes the incidence oracle.

    Raises :class:`DomainError` for symbols outside the alphabet or an
    empty sequence.
    """
    symbols = tuple(symbols)
    if not symbols:
        raise DomainError("words are non-empty")
    for s in symbols:
        if not spec.in_alphabet(s):
            raise DomainError(f"symbol {s!r} not in alphabet of {spec.name}")
    return all(spec.allows(a, b) for a, b in zip(symbols, symbols[1:]))


def word(spec: ShiftSpec, symbols) -> Word:
    symbols = tuple(symbols)
    if not is_admissible(spec, symbols):
        raise DomainError(f"{symbols} is not admissible in {spec.name}")
    return Word(symbols)


# -- collections of words --------------------------------------------------


@dataclass(frozen=True)
class WordCollection:
    """A subset of the finite admissible words, given by kind + parameters.

    Kinds: ``all`` | ``periodic`` | ``periodic_at`` | ``starting_in`` |
    ``bridges`` | ``custom``.  Membership is a predicate on whole words;
    custom predicates are applied post-enumeration.
    """

    kind: str
    at: object = None
    starting: frozenset = frozenset()
    terminating: frozenset = frozenset()
    predicate: Optional[Callable[[tuple], bool]] = field(default=None, compare=False)

    def admits(self, spec: ShiftSpec, symbols: tuple) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "periodic":
            return spec.allows(symbols[-1], symbols[0])
        if self.kind == "periodic_at":
            return symbols[0] == self.at and spec.allows(symbols[-1], self.at)
        if self.kind == "starting_in":
            return symbols[0] in self.starting
        if self.kind == "bridges":
            return symbols[0] in self.starting and symbols[-1] in self.terminating
        if self.kind == "custom":
            return bool(self.predicate(symbols))
        raise DomainError(f"unknown collection kind {self.kind!r}")

    def seed_symbols(self, candidates: Iterable) -> list:
        """Symbols a member word may start with (used to prune searches)."""
        if self.kind == "periodic_at":
            return [s for s in candidates if s == self.at]
        if self.kind in ("starting_in", "bridges"):
            return [s for s in candidates if s in self.starting]
        return list(candidates)

    @property
    def representable_by_loops(self) -> bool:
        """Closed under concatenation + refinable, so a loop alphabet exists."""
        return self.kind in ("periodic_at", "bridges")

    def describe(self) -> str:
        if self.kind == "periodic_at":
            return f"periodic@{self.at}"
        if self.kind == "bridges":
            return f"bridges({sorted(self.starting)}->{sorted(self.terminating)})"
        if self.kind == "starting_in":
            return f"starting_in({sorted(self.starting)})"
        return self.kind


def all_words() -> WordCollection:
    return WordCollection("all")


def periodic_words() -> WordCollection:
    return WordCollection("periodic")


def periodic_at(a) -> WordCollection:
    return WordCollection("periodic_at", at=a)


def starting_in(starting: Iterable) -> WordCollection:
    return WordCollection("starting_in", starting=frozenset(starting))


def bridges(starting: Iterable, terminating: Iterable) -> WordCollection:
    return WordCollection(
        "bridges", starting=frozenset(starting), terminating=frozenset(terminating)
    )


def custom_collection(predicate: Callable[[tuple], bool]) -> WordCollection:
    return WordCollection("custom", predicate=predicate)


# -- truncations -----------------------------------------------------------


class Truncation:
    """A finite set of retained symbols with the induced finite shift."""

    def __init__(self, owner: ShiftSpec, retained: Iterable):
        retained = tuple(sorted(set(retained)))
        for s in retained:
            if not owner.in_alphabet(s):
                raise DomainError(f"retained symbol {s!r} not in alphabet")
        self.owner = owner
        self.retained = retained
        self.spec = ShiftSpec(
            owner.allows,
            symbols=retained,
            family=owner.family,
            family_params=owner.family_params,
            name=f"{owner.name}|{len(retained)}",
        )

    def __len__(self):
        return len(self.retained)

    def degenerate_symbols(self) -> tuple:
        """Retained symbols with no admissible successor inside the
        truncation (dead ends a non-degenerate system should not have)."""
        return tuple(
            s for s in self.retained
            if not any(self.owner.allows(s, t) for t in self.retained)
        )

    def __repr__(self):
        return f"Truncation({self.owner.name}, {len(self.retained)} symbols)"


def truncate(spec: ShiftSpec, retained: Iterable) -> Truncation:
    return Truncation(spec, retained)


def truncate_range(spec: ShiftSpec, n: int) -> Truncation:
    """Convenience: retain symbols 1..n (integer alphabets)."""
    if spec.is_finite:
        return Truncation(spec, [s for s in spec.symbols if isinstance(s, int) and s <= n])
    return Truncation(spec, range(1, n + 1))


# -- enumeration -----------------------------------------------------------


def enumerate_words(
    spec: ShiftSpec,
    collection: WordCollection,
    trunc: Truncation,
    max_len: int,
) -> Iterator[Word]:
    """Yield the members of ``collection`` over the retained symbols, each
    once, ordered by (length, symbols).  Empty truncation yields nothing.
    """
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    syms = trunc.retained
    if not syms:
        return

    def extend(prefix: tuple) -> Iterator[tuple]:
        last = prefix[-1]
        for s in syms:
            if spec.allows(last, s):
                yield prefix + (s,)

    for length in range(1, max_len + 1):
        level: Iterable[tuple]
        if length == 1:
            level = [(s,) for s in sorted(collection.seed_symbols(syms))]
        else:
            level = _level_words(spec, collection, syms, length)
        for symbols in level:
            if collection.admits(spec, symbols):
                yield Word(symbols)


def _level_words(spec, collection, syms, length):
    """All admissible words of exactly ``length`` in lexicographic order,
    first symbol restricted by the collection's seed set."""
    stack = [(s,) for s in sorted(collection.seed_symbols(syms), reverse=True)]
    while stack:
        prefix = stack.pop()
        if len(prefix) == length:
            yield prefix
            continue
        last = prefix[-1]
        for s in sorted(syms, reverse=True):
            if spec.allows(last, s):
                stack.append(prefix + (s,))
