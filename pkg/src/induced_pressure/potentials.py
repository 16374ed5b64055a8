"""Finite-memory potentials and exact orbit sums along words.

A potential of depth ``m`` depends on the first ``m`` coordinates of a
point.  With finite memory every orbit sum along a word is exact once the
trailing lookahead is resolved: either a continuation symbol is pinned
(the loop case, where a periodic-at-``a`` word is always followed by
``a``) or the sum is bracketed by a supremum/infimum over admissible
completions inside the active truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DomainError, ModeError, PreconditionError, SignFlagError
from .shifts import ShiftSpec, Truncation, Word

EXACT = "exact"
SUP = "sup"
INF = "inf"


class Potential:
    """Real-valued function of the first ``depth`` coordinates.

    ``sign_flags`` may declare ``nonnegative``, ``strictly_positive`` or a
    positive lower bound; they are checked on every evaluation and a
    violation is a hard error, since downstream code relies on them.
    """

    def __init__(
        self,
        depth: int,
        value: Callable[[tuple], float],
        nonnegative: bool = False,
        strictly_positive: bool = False,
        lower_bound: Optional[float] = None,
        name: str = "potential",
        constant: Optional[float] = None,
    ):
        if depth < 1:
            raise DomainError("potential depth must be >= 1")
        self.depth = depth
        self._value = value
        self.nonnegative = nonnegative or strictly_positive or (
            lower_bound is not None and lower_bound >= 0
        )
        self.strictly_positive = strictly_positive or (
            lower_bound is not None and lower_bound > 0
        )
        self.lower_bound = lower_bound
        self.name = name
        self.constant = constant  # set iff the potential is a known constant
        self._cache: dict = {}

    def __call__(self, coords: tuple) -> float:
        coords = tuple(coords[: self.depth])
        if len(coords) != self.depth:
            raise DomainError(
                f"{self.name} needs {self.depth} coordinates, got {len(coords)}"
            )
        v = self._cache.get(coords)
        if v is None:
            v = float(self._value(coords))
            if math.isnan(v) or math.isinf(v):
                raise DomainError(f"{self.name}{coords} is not finite")
            if self.nonnegative and v < 0:
                raise SignFlagError(f"{self.name}{coords} = {v} < 0 (declared nonnegative)")
            if self.strictly_positive and v <= 0:
                raise SignFlagError(
                    f"{self.name}{coords} = {v} <= 0 (declared strictly positive)"
                )
            if self.lower_bound is not None and v < self.lower_bound:
                raise SignFlagError(
                    f"{self.name}{coords} = {v} below declared bound {self.lower_bound}"
                )
            self._cache[coords] = v
        return v

    def __repr__(self):
        return f"Potential({self.name!r}, depth={self.depth})"


# -- built-ins --------------------------------------------------------------


def constant(c: float, name: Optional[str] = None) -> Potential:
    c = float(c)
    return Potential(
        1,
        lambda t: c,
        nonnegative=c >= 0,
        strictly_positive=c > 0,
        lower_bound=c if c > 0 else None,
        name=name or f"const({c:g})",
        constant=c,
    )


def zero() -> Potential:
    return constant(0.0, name="zero")


def alpha_farey_geometric() -> Potential:
    """Geometric potential of the harmonic alpha-Farey interval map,
    written on the conjugate renewal shift: log 2 on cylinder [1] and
    log((n+1)/(n-1)) on [n] for n >= 2.  Strictly positive, not bounded
    away from zero."""

    def val(t):
        n = t[0]
        if n == 1:
            return math.log(2.0)
        return math.log((n + 1) / (n - 1))

    return Potential(1, val, strictly_positive=True, name="alpha_farey_geometric")


def first_symbol_negated() -> Potential:
    """phi(omega) = -omega_1 on integer alphabets."""
    return Potential(1, lambda t: -float(t[0]), name="first_symbol_negated")


def from_table(depth: int, table: dict, name: str = "table", **flags) -> Potential:
    """Potential from an explicit {coordinate tuple: value} table."""
    table = {tuple(k) if isinstance(k, (tuple, list)) else (k,): float(v) for k, v in table.items()}

    def val(t):
        try:
            return table[t]
        except KeyError:
            raise DomainError(f"no table entry for {t}") from None

    return Potential(depth, val, name=name, **flags)


def coboundary(h: Potential) -> Potential:
    """The depth-2 potential h - h(shifted point): adding it to any
    potential leaves every pressure unchanged (bounded cocycle)."""
    if h.depth != 1:
        raise DomainError("coboundary helper expects a depth-1 function")
    return Potential(2, lambda t: h((t[0],)) - h((t[1],)), name=f"d({h.name})")


def combine(p1: Potential, p2: Potential, coeffs: tuple) -> Potential:
    """Pointwise a*p1 + b*p2.  Result depth is the max of the two depths;
    sign flags survive only when provable from the inputs."""
    a, b = float(coeffs[0]), float(coeffs[1])
    depth = max(p1.depth, p2.depth)
    if p1.constant is not None and p2.constant is not None:
        return constant(a * p1.constant + b * p2.constant)

    def val(t):
        return a * p1(t[: p1.depth]) + b * p2(t[: p2.depth])

    def term_nonneg(p, c):
        return (p.nonnegative and c >= 0) or (p.constant == 0.0) or c == 0

    def term_strict(p, c):
        return p.strictly_positive and c > 0

    nonneg = term_nonneg(p1, a) and term_nonneg(p2, b)
    strict = (term_strict(p1, a) and term_nonneg(p2, b)) or (
        term_strict(p2, b) and term_nonneg(p1, a)
    )
    return Potential(
        depth,
        val,
        nonnegative=nonneg,
        strictly_positive=strict,
        name=f"({a:g}*{p1.name} + {b:g}*{p2.name})",
    )


def scale(p: Potential, c: float) -> Potential:
    return combine(p, zero(), (c, 0.0))


# -- orbit sums --------------------------------------------------------------


@dataclass(frozen=True)
class BirkhoffSum:
    word: Word
    value: float
    boundary: str  # EXACT | SUP | INF


def birkhoff_sum(
    p: Potential,
    w: Word,
    mode: str = EXACT,
    continuation=None,
    trunc: Optional[Truncation] = None,
    spec: Optional[ShiftSpec] = None,
) -> BirkhoffSum:
    """Sum of ``p`` along the first ``len(w)`` shift iterates on the
    cylinder of ``w``.

    Depth-1 potentials are always exact.  Depth-2 sums are exact when a
    continuation symbol is pinned (periodic-at-``a`` loops continue with
    ``a``).  Otherwise ``sup``/``inf`` bracket the value over admissible
    completions of the trailing coordinates within ``trunc``.
    """
    symbols = w.symbols
    n = len(symbols)
    m = p.depth
    if n < 1:
        raise DomainError("empty word")

    if m == 1:
        value = math.fsum(p((s,)) for s in symbols)
        return BirkhoffSum(w, value, EXACT)

    if mode == EXACT:
        if continuation is None:
            if m <= n:
                # still needs m-1 lookahead symbols beyond the word
                raise ModeError(
                    "exact sum needs a pinned continuation for depth >= 2"
                )
            raise ModeError("word shorter than potential depth")
        if m > 2:
            raise ModeError(
                "exact sums with pinned continuation support depth <= 2 only; "
                "use sup/inf bracketing for deeper potentials"
            )
        ext = symbols + (continuation,)
        value = math.fsum(p(ext[i : i + m]) for i in range(n))
        return BirkhoffSum(w, value, EXACT)

    if mode not in (SUP, INF):
        raise ModeError(f"unknown mode {mode!r}")
    if trunc is None:
        raise PreconditionError("sup/inf bracketing needs an active truncation")
    base = spec or trunc.owner
    head = math.fsum(p(symbols[i : i + m]) for i in range(n - m + 1)) if n >= m else 0.0
    best = None
    for tail in _completions(base, trunc, symbols, m - 1):
        ext = symbols + tail
        start = max(0, n - m + 1)
        v = math.fsum(p(ext[i : i + m]) for i in range(start, n))
        best = v if best is None else (max(best, v) if mode == SUP else min(best, v))
    if best is None:
        raise ModeError(f"{w} has no admissible continuation in the truncation")
    return BirkhoffSum(w, head + best, mode)


def _completions(spec, trunc, symbols, k):
    """All admissible k-symbol continuations of ``symbols`` inside trunc."""
    if k == 0:
        yield ()
        return
    last = symbols[-1]
    for s in trunc.retained:
        if spec.allows(last, s):
            for rest in _completions(spec, trunc, symbols + (s,), k - 1):
                yield (s,) + rest
