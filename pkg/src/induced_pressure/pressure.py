"""Scaling-induced pressure: window estimator, pseudo-inverse, exhaustion.

Three routes to the same number, kept deliberately independent so they can
cross-check each other:

* the window estimator sums ``exp`` of orbit sums of ``phi`` over words
  whose ``psi``-sum lands in a sliding window below ``T`` and reads off the
  exponential growth rate in ``T``;
* the pseudo-inverse solves ``pressure(phi - beta*psi) = 0`` for ``beta``
  on a finite truncation, where the inner pressure is a Perron eigenvalue;
* exhaustion runs the pseudo-inverse along growing truncations, producing
  a nondecreasing sequence of certified lower bounds.

Infinite answers are legitimate: they are returned as ``+inf`` verdicts
carrying an explicit certificate, never silently saturated.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import PreconditionError
from .potentials import Potential
from .shifts import ShiftSpec, Truncation, WordCollection, all_words
from .transfer import PressureFamily

INF = float("inf")

SUM_THRESHOLD = 1e12  # partial window mass certifying divergence
FAMILY_BLOCKS = 6  # doublings of the symbol parameter needed for a family
FAMILY_DECAY_SLACK = 0.9  # block masses may dip to this fraction and still count


@dataclass
class DivergenceCertificate:
    """Evidence attached to a +inf verdict."""

    rule: str  # "partial-sum-threshold" | "unbounded-symbol-family"
    window: tuple  # (T - eta, T]
    partial_sum: float
    sample_words: list
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "rule": self.rule,
            "window": list(self.window),
            "partial_sum": self.partial_sum,
            "sample_words": [list(w) for w in self.sample_words],
            "detail": {k: v for k, v in self.detail.items()},
        }


@dataclass
class PressureResult:
    """A pressure value or an infinite verdict, with provenance."""

    value: float
    method: str
    bracket: tuple
    diagnostics: dict = field(default_factory=dict)
    sequence: Optional[list] = None
    certificate: Optional[DivergenceCertificate] = None

    @property
    def verdict(self) -> str:
        if self.value == INF:
            return "+inf"
        if self.value == -INF:
            return "-inf"
        return "finite"

    def to_dict(self):
        def enc(x):
            if x == INF:
                return "+inf"
            if x == -INF:
                return "-inf"
            return x

        out = {
            "value": enc(self.value),
            "verdict": self.verdict,
            "method": self.method,
            "bracket": [enc(self.bracket[0]), enc(self.bracket[1])],
            "diagnostics": {k: enc(v) if isinstance(v, float) else v
                            for k, v in self.diagnostics.items()},
        }
        if self.sequence is not None:
            out["sequence"] = [enc(v) if isinstance(v, float) else v for v in self.sequence]
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


# -- monotone root solve ----------------------------------------------------


def solve_decreasing(
    f: Callable[[float], float],
    center: float,
    radius: float,
    tol: float = 1e-10,
    expansions: int = 60,
    slope_range: Optional[tuple] = None,
):
    """Root of a nonincreasing function: the infimum of {x : f(x) <= 0}.

    Expands the bracket geometrically from ``center +- radius`` until
    ``f(lo) > 0 >= f(hi)``, then bisects and finishes with guarded secant
    steps.  Returns ``(root, lo, hi, status)`` with status ``"ok"``,
    ``"plus_inf"`` (f stays positive) or ``"minus_inf"`` (f never positive).

    ``slope_range=(m, M)`` declares -M <= f' <= -m < 0 with f additionally
    convex (true for pressure functions: log-sum-exp limits of affine maps
    of the argument).  The root is then approached by certified secant
    steps that never probe far beyond it, where eigensolves can be
    arbitrarily slow.
    """
    radius = max(radius, tol)
    if slope_range is not None:
        m, M = slope_range
        if 0 < m <= M < INF:
            out = _solve_with_slopes(f, center, m, M, tol)
            if out is not None:
                return out
    lo, hi = center - radius, center + radius
    flo, fhi = f(lo), f(hi)
    width = 2 * radius
    for _ in range(expansions):
        if flo > 0:
            break
        hi, fhi = lo, flo
        lo -= width
        width *= 2
        flo = f(lo)
    else:
        if flo <= 0:
            return -INF, -INF, lo, "minus_inf"
    width = hi - lo
    for _ in range(expansions):
        if fhi <= 0:
            break
        lo, flo = hi, fhi
        hi += width
        width *= 2
        fhi = f(hi)
    else:
        if fhi > 0:
            return INF, hi, INF, "plus_inf"
    return _refine_root(f, lo, hi, flo, fhi, tol)


def _solve_with_slopes(f, center, m, M, tol, max_evals=200):
    """Root solve for a convex nonincreasing f with -M <= f' <= -m < 0.

    From a point with f > 0 the step f/M never crosses the root, and a
    secant through two such points stays left of the root by convexity;
    symmetrically from the right.  Once both sides are seen, the bracket
    is handed to the damped secant.  Probes therefore cluster near the
    root instead of wandering into regions where f is expensive.
    Returns None if f is not finite at the center (caller falls back to
    geometric expansion).
    """
    x = center
    fx = f(x)
    if not math.isfinite(fx):
        return None
    lo = flo = hi = fhi = None
    prev = None
    onesided = 0
    for _ in range(max_evals):
        if fx > 0:
            if lo is None or x > lo:
                lo, flo = x, fx
        else:
            if hi is None or x < hi:
                hi, fhi = x, fx
        if lo is not None and hi is not None:
            return _refine_root(f, lo, hi, flo, fhi, tol)
        # certified enclosure from the one visited side
        if lo is not None:
            clo, chi = lo, lo + flo / m
        else:
            clo, chi = hi + fhi / m, hi
        if chi - clo <= tol:
            return 0.5 * (clo + chi), clo, chi, "ok"
        onesided += 1
        jump = fx / M * (2.0 ** max(0, onesided - 8))  # force a crossing eventually
        nxt = x + jump
        if prev is not None and (fx - prev[1]) != 0.0:
            secant = x - fx * (x - prev[0]) / (fx - prev[1])
            if fx > 0:
                nxt = max(nxt, min(secant, chi))
            else:
                nxt = min(nxt, max(secant, clo))
        prev = (x, fx)
        x = nxt
        fx = f(x)
        if not math.isfinite(fx):
            return None
    return None


def _refine_root(f, lo, hi, flo, fhi, tol):

    # bisect to a modest width, then finish with Illinois-damped secant
    while hi - lo > max(tol, 1e-3):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm <= 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    side = 0
    while hi - lo > tol:
        if math.isfinite(flo) and math.isfinite(fhi) and fhi < 0 < flo:
            x = hi - fhi * (hi - lo) / (fhi - flo)
            if not (lo < x < hi):
                x = 0.5 * (lo + hi)
        else:
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx <= 0:
            hi, fhi = x, fx
            if side == -1 and math.isfinite(flo):
                flo *= 0.5  # same side twice: damp the stale endpoint
            side = -1
        else:
            lo, flo = x, fx
            if side == 1 and math.isfinite(fhi):
                fhi *= 0.5
            side = 1
    return 0.5 * (lo + hi), lo, hi, "ok"


# -- pseudo-inverse route ----------------------------------------------------


def pseudo_inverse_pressure(
    trunc: Truncation,
    phi: Potential,
    psi: Potential,
    collection: Optional[WordCollection] = None,
    tol: float = 1e-10,
    expansions: int = 60,
) -> PressureResult:
    """The unique ``beta`` with ``pressure(phi - beta*psi) = 0`` on the
    truncated shift (all-words or periodic-at-``a`` collections).

    ``psi`` must be declared strictly positive; this is also verified on
    every transition of the truncation.  When the zero lies beyond the
    expanded search bracket the result is a ``+-inf`` verdict.
    """
    if not psi.strictly_positive:
        raise PreconditionError(
            "pseudo-inverse needs a strictly positive scaling potential"
        )
    collection = collection if collection is not None else all_words()
    fam = PressureFamily(trunc, phi, psi, collection)
    diag = {
        "truncation_size": len(trunc),
        "states": len(fam.states),
        "collection": collection.describe(),
    }
    if fam.nilpotent:
        return PressureResult(-INF, "pseudo-inverse", (-INF, -INF),
                              {**diag, "note": "no cycles in the truncation"})
    if fam.min_psi <= 0:
        raise PreconditionError("scaling potential not positive on the truncation")
    radius = fam.max_abs_phi / fam.min_psi + 1.0
    root, lo, hi, status = solve_decreasing(
        fam.value, 0.0, radius, tol, expansions,
        slope_range=(fam.min_psi, fam.max_psi),
    )
    diag["pressure_evaluations"] = fam.evals
    if status == "plus_inf":
        diag["note"] = f"pressure still positive at beta={lo:g}"
        return PressureResult(INF, "pseudo-inverse", (lo, INF), diag)
    if status == "minus_inf":
        diag["note"] = f"pressure nonpositive already at beta={hi:g}"
        return PressureResult(-INF, "pseudo-inverse", (-INF, hi), diag)
    return PressureResult(root, "pseudo-inverse", (lo, hi), diag)


# -- window estimator --------------------------------------------------------


class _Kahan:
    """Compensated accumulator; deterministic for a fixed visit order."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x):
        y = x - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t

    @property
    def total(self):
        return self.s


def estimate_pressure_window(
    spec: ShiftSpec,
    phi: Potential,
    psi: Potential,
    collection: WordCollection,
    trunc: Truncation,
    eta: float = 1.0,
    t_grid: Sequence[float] = tuple(range(1, 21)),
    length_cap: int = 200,
    sum_threshold: float = SUM_THRESHOLD,
) -> PressureResult:
    """Partition-sum estimate of the induced pressure.

    For each ``T`` in the grid, sums ``exp`` of the ``phi``-sum over words
    of the collection whose ``psi``-sum lies in ``(T - eta, T]``, by
    depth-first search pruned as soon as the running ``psi``-sum exceeds
    the largest ``T``.  The reported value is the running maximum of
    ``log(sum)/T`` over the tail of the grid.

    Divergence is certified two ways: a single window's mass crossing
    ``sum_threshold``, or an explicit family of window words whose maximal
    symbol keeps growing to the edge of the truncation without the
    per-scale mass decaying.
    """
    if eta <= 0:
        raise PreconditionError("window width eta must be positive")
    if not psi.nonnegative:
        raise PreconditionError("window estimator needs psi >= 0 declared")
    if phi.depth != 1 or psi.depth != 1:
        raise PreconditionError("window estimator supports depth-1 potentials")
    t_grid = sorted(float(t) for t in t_grid)
    if not t_grid:
        raise PreconditionError("empty T grid")
    max_t = t_grid[-1]
    syms = sorted(trunc.retained)
    seeds = sorted(collection.seed_symbols(syms))
    top_symbol = syms[-1] if syms else None

    totals = [_Kahan() for _ in t_grid]
    counts = [0 for _ in t_grid]
    blocks: list[dict] = [dict() for _ in t_grid]  # window -> {block: mass}
    samples: list[dict] = [dict() for _ in t_grid]  # window -> {block: word}
    threshold_hit = None

    def windows_for(s):
        # T in [s, s + eta): the windows (T - eta, T] containing s
        i = bisect.bisect_left(t_grid, s)
        while i < len(t_grid) and t_grid[i] < s + eta:
            yield i
            i += 1

    def record(widx, word, weight):
        nonlocal threshold_hit
        totals[widx].add(weight)
        counts[widx] += 1
        b = max(word).bit_length() if isinstance(word[0], int) else 0
        blk = blocks[widx]
        blk[b] = blk.get(b, 0.0) + weight
        samples[widx].setdefault(b, word)
        if totals[widx].total > sum_threshold and threshold_hit is None:
            threshold_hit = widx

    succ_cache: dict = {}

    def successors(last):
        out = succ_cache.get(last)
        if out is None:
            out = succ_cache[last] = [
                (s, psi((s,)), phi((s,))) for s in syms if spec.allows(last, s)
            ]
        return out

    # DFS over (word, psi-sum, phi-sum); psi >= 0 makes the prune sound
    stack = [((s,), psi((s,)), phi((s,))) for s in reversed(seeds)]
    while stack:
        word, ssum, fsum_ = stack.pop()
        if ssum <= max_t and collection.admits(spec, word):
            for widx in windows_for(ssum):
                record(widx, word, math.exp(fsum_))
                if threshold_hit is not None:
                    return _divergence_result(
                        t_grid, eta, threshold_hit, totals, samples, blocks,
                        "partial-sum-threshold",
                    )
        if len(word) < length_cap:
            for s, ps, fs in reversed(successors(word[-1])):
                s2 = ssum + ps
                if s2 <= max_t:
                    stack.append((word + (s,), s2, fsum_ + fs))

    family = _detect_family(t_grid, blocks, top_symbol)
    if family is not None:
        return _divergence_result(
            t_grid, eta, family, totals, samples, blocks, "unbounded-symbol-family"
        )

    values = [
        (math.log(t.total) / T if t.total > 0 else -INF)
        for t, T in zip(totals, t_grid)
    ]
    tail_start = len(t_grid) // 2
    tail = values[tail_start:]
    value = max(tail)
    diag = {
        "eta": eta,
        "t_grid": list(t_grid),
        "window_counts": counts,
        "length_cap": length_cap,
        "truncation_size": len(trunc),
    }
    return PressureResult(
        value, "window", (values[-1], value), diag, sequence=values
    )


def _detect_family(t_grid, blocks, top_symbol):
    """Window index whose per-scale mass keeps growing to the probe edge.

    Masses are grouped by the dyadic scale of a word's largest symbol; a
    family is declared when the per-scale mass is (near-)nondecreasing
    over enough doublings and still alive at the last scale the truncation
    covers in full.  Convergent systems decay per scale and never match.
    """
    if top_symbol is None or not isinstance(top_symbol, int):
        return None
    top_block = top_symbol.bit_length()
    # the top dyadic block is partial unless the bound is exactly 2^b - 1;
    # a truncated block legitimately carries less mass, so judge decay
    # only on full blocks
    last_full = top_block if top_symbol == 2**top_block - 1 else top_block - 1
    for widx in range(len(t_grid)):
        blk = blocks[widx]
        run = []
        for b in sorted(blk):
            if b > last_full:
                break
            if blk[b] <= 0:
                run = []
                continue
            if run and blk[b] < FAMILY_DECAY_SLACK * blk[run[-1]]:
                run = []
            run.append(b)
        if len(run) >= FAMILY_BLOCKS and run[-1] >= last_full:
            return widx
    return None


def _divergence_result(t_grid, eta, widx, totals, samples, blocks, rule):
    T = t_grid[widx]
    cert = DivergenceCertificate(
        rule=rule,
        window=(T - eta, T),
        partial_sum=totals[widx].total,
        sample_words=[samples[widx][b] for b in sorted(samples[widx])][:8],
        detail={"block_masses": {str(b): blocks[widx][b] for b in sorted(blocks[widx])}},
    )
    return PressureResult(
        INF,
        "window",
        (INF, INF),
        {"eta": eta, "witness_T": T, "witness_partial_sum": totals[widx].total},
        certificate=cert,
    )


# -- exhaustion --------------------------------------------------------------


def exhaustion_sequence(
    spec: ShiftSpec,
    phi: Potential,
    psi: Potential,
    collection: WordCollection,
    retained_sets: Sequence,
    tol: float = 1e-10,
    upper_bound: Optional[float] = None,
) -> PressureResult:
    """Pseudo-inverse values along an increasing family of truncations.

    The sequence is nondecreasing (monotonicity in the truncation) and
    every term is a certified lower bound for the full induced pressure;
    the bracket stays open above unless the caller supplies an upper bound
    from an independent route.
    """
    seq = []
    sizes = []
    for retained in retained_sets:
        trunc = Truncation(spec, retained)
        res = pseudo_inverse_pressure(trunc, phi, psi, collection, tol=tol)
        seq.append(res.value)
        sizes.append(len(trunc))
    if not seq:
        raise PreconditionError("no truncations supplied")
    value = seq[-1]
    hi = upper_bound if upper_bound is not None else INF
    diag = {
        "truncation_sizes": sizes,
        "collection": collection.describe(),
        "monotone": all(b >= a - 1e-12 for a, b in zip(seq, seq[1:])),
    }
    return PressureResult(value, "exhaustion", (value, hi), diag, sequence=seq)
