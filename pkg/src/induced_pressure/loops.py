"""Simple loops, induced potentials and the loop-space pressure route.

A collection that is closed under concatenation and refinable (periodic
words at a fixed symbol ``a``; bridges between finite symbol sets) is the
free monoid over its *simple* members: the words that do not factor into
two collection members.  Pressure computations then move to the loop
alphabet, where the partition function over the simple loops

    Z(beta) = sum over loops of exp(phi-sum - beta * psi-sum)

is strictly decreasing in ``beta`` and the induced pressure is the root of
``Z = 1``.  Truncating the inventory at a length cap only removes positive
mass, so the truncated root is a certified lower bound, nondecreasing in
the cap; an optional tail majorant turns it into a two-sided bracket.

Inventories come in several representations with one contract:

* ``explicit``      -- loops listed individually (small caps);
* ``renewal-chain`` -- the renewal shift's one-loop-per-length family,
                       induced values by prefix sums (huge caps, O(L));
* ``matrix``        -- per-length loop masses aggregated by transfer
                       recursion (huge caps on finite truncations);
* ``counted``       -- exact big-integer loop counts per length, for
                       length-proportional potentials (group extensions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, ModeError, PreconditionError, ResourceError
from .potentials import EXACT, INF as INF_MODE, SUP, Potential, birkhoff_sum
from .pressure import DivergenceCertificate, PressureResult, solve_decreasing
from .shifts import ShiftSpec, Truncation, Word, WordCollection

INF = float("inf")
NEG_INF = float("-inf")

LOOP_BUDGET = 200_000
NODE_BUDGET = 2_000_000
EARLY_STOP_MARGIN = 46.0  # nats below running total before a tail may be dropped


@dataclass(frozen=True)
class SimpleLoop:
    symbols: tuple

    @property
    def length(self) -> int:
        return len(self.symbols)


class LoopInventory:
    """Simple loops of a collection inside a truncation, up to a cap."""

    def __init__(self, kind, collection, trunc, max_len, spec=None):
        self.kind = kind
        self.collection = collection
        self.trunc = trunc
        self.max_len = int(max_len)
        self.spec = spec or (trunc.owner if trunc is not None else None)
        self._loops: Optional[dict] = None  # length -> sorted list of tuples
        self._counts: Optional[dict] = None
        self._complete: dict = {}
        self._structure = None  # matrix kind
        self._chain_top: Optional[int] = None  # renewal-chain kind

    # -- counts and listing -------------------------------------------

    def counts(self, upto: Optional[int] = None) -> dict:
        """Exact number of simple loops per length (big integers)."""
        upto = self.max_len if upto is None else min(upto, self.max_len)
        if self.kind == "explicit":
            return {n: len(ws) for n, ws in sorted(self._loops.items()) if n <= upto}
        if self.kind == "renewal-chain":
            return {n: 1 for n in range(1, min(self._chain_top, upto) + 1)}
        if self.kind == "counted":
            return {n: c for n, c in sorted(self._counts.items()) if n <= upto}
        if self.kind == "matrix":
            seq = self._structure.count_sequence(upto)
            return {n: c for n, c in enumerate(seq, start=1) if c}
        raise DomainError(self.kind)

    def complete_below(self, n: int) -> bool:
        return all(self._complete.get(m, False) for m in range(1, n + 1))

    def iter_loops(self) -> Iterator[SimpleLoop]:
        """Individual loops in (length, word) order; listable kinds only."""
        if self.kind == "explicit":
            for n in sorted(self._loops):
                for w in self._loops[n]:
                    yield SimpleLoop(w)
        elif self.kind == "renewal-chain":
            yield SimpleLoop((1,))
            for k in range(2, self._chain_top + 1):
                yield SimpleLoop((1,) + tuple(range(k, 1, -1)))
        else:
            raise PreconditionError(
                f"{self.kind!r} inventories aggregate loops and cannot list them"
            )

    def __repr__(self):
        return f"LoopInventory({self.kind}, max_len={self.max_len})"


# -- enumeration -------------------------------------------------------------


def enumerate_simple_loops(
    spec: ShiftSpec,
    collection: WordCollection,
    trunc: Truncation,
    max_len: int,
    representation: str = "auto",
    loop_budget: int = LOOP_BUDGET,
    node_budget: int = NODE_BUDGET,
) -> LoopInventory:
    """Inventory of simple loops of the collection, lengths <= ``max_len``.

    ``representation="auto"`` picks the cheapest faithful form: the
    renewal chain when the fixture allows it, an explicit listing while it
    fits the budgets, and per-length matrix aggregation beyond that.
    """
    if not collection.representable_by_loops:
        raise PreconditionError(
            f"collection {collection.describe()} is not representable by loops"
        )
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")

    if representation in ("auto", "renewal-chain") and _is_renewal_chain(
        spec, collection, trunc
    ):
        inv = LoopInventory("renewal-chain", collection, trunc, max_len, spec)
        inv._chain_top = min(max_len, max(trunc.retained))
        for n in range(1, inv._chain_top + 1):
            inv._complete[n] = True
        return inv
    if representation == "renewal-chain":
        raise PreconditionError("renewal chain form needs the renewal fixture at 1")

    explicit_plausible = max_len <= 64 and len(trunc) <= 32
    if representation == "explicit" or (representation == "auto" and explicit_plausible):
        try:
            return _enumerate_explicit(
                spec, collection, trunc, max_len, loop_budget, node_budget
            )
        except ResourceError:
            if representation == "explicit":
                raise
    return _matrix_inventory(spec, collection, trunc, max_len)


def _is_renewal_chain(spec, collection, trunc) -> bool:
    if spec.family != "renewal" or collection.kind != "periodic_at":
        return False
    if collection.at != 1:
        return False
    retained = trunc.retained
    return bool(retained) and retained == tuple(range(1, len(retained) + 1))


def _enumerate_explicit(spec, collection, trunc, max_len, loop_budget, node_budget):
    syms = sorted(trunc.retained)
    inv = LoopInventory("explicit", collection, trunc, max_len, spec)
    loops: dict = {}
    nodes = 0
    found = 0

    if collection.kind == "periodic_at":
        a = collection.at
        if a not in trunc.retained:
            inv._loops = {}
            return inv
        seeds = [(a,)]

        def children(w):
            for s in syms:
                if s != a and spec.allows(w[-1], s):
                    yield w + (s,)

        def is_member(w):
            return spec.allows(w[-1], a)

    else:  # bridges
        js = sorted(s for s in syms if s in collection.starting)
        jt = collection.terminating
        seeds = [(s,) for s in js]

        def children(w):
            last = w[-1]
            block = last in jt
            for s in syms:
                if block and s in collection.starting:
                    continue  # a split point would make the loop decomposable
                if spec.allows(last, s):
                    yield w + (s,)

        def is_member(w):
            return w[-1] in jt

    stack = list(reversed(seeds))
    while stack:
        w = stack.pop()
        nodes += 1
        if nodes > node_budget:
            raise ResourceError(
                f"simple-loop search exceeded {node_budget} nodes", size=nodes
            )
        if is_member(w):
            loops.setdefault(len(w), []).append(w)
            found += 1
            if found > loop_budget:
                raise ResourceError(
                    f"more than {loop_budget} simple loops below length {max_len}",
                    size=found,
                )
        if len(w) < max_len:
            stack.extend(reversed(list(children(w))))

    inv._loops = {n: sorted(ws) for n, ws in loops.items()}
    exhaustive = spec.is_finite and set(spec.symbols) == set(trunc.retained)
    for n in range(1, max_len + 1):
        inv._complete[n] = exhaustive
    return inv


def _matrix_inventory(spec, collection, trunc, max_len):
    inv = LoopInventory("matrix", collection, trunc, max_len, spec)
    inv._structure = _LoopStructure(spec, collection, trunc)
    exhaustive = spec.is_finite and set(spec.symbols) == set(trunc.retained)
    for n in range(1, max_len + 1):
        inv._complete[n] = exhaustive
    return inv


def counted_inventory(counts: dict, collection, max_len, complete=True) -> LoopInventory:
    """Inventory given by exact per-length loop counts (all loops of one
    length sharing any length-proportional weight)."""
    inv = LoopInventory("counted", collection, None, max_len)
    inv._counts = {int(n): int(c) for n, c in counts.items() if n <= max_len and c}
    for n in range(1, max_len + 1):
        inv._complete[n] = complete
    return inv


# -- matrix aggregation ------------------------------------------------------


class _LoopStructure:
    """First-return transfer structure for per-length loop aggregation."""

    def __init__(self, spec, collection, trunc):
        self.spec = spec
        self.collection = collection
        self.syms = sorted(trunc.retained)
        self.index = {s: i for i, s in enumerate(self.syms)}
        n = len(self.syms)
        A = np.zeros((n, n), dtype=bool)
        for i, u in enumerate(self.syms):
            for j, v in enumerate(self.syms):
                A[i, j] = spec.allows(u, v)
        self.A = A
        if collection.kind == "periodic_at":
            self.mode = "periodic_at"
            self.a = collection.at
            self.ai = self.index[self.a]
            self.others = [i for i in range(n) if i != self.ai]
        else:
            self.mode = "bridges"
            self.js = np.array([s in collection.starting for s in self.syms])
            self.jt = np.array([s in collection.terminating for s in self.syms])
            # extending past a terminal symbol with a starting symbol would
            # create a factorisation, so those transitions are cut
            self.T = A & ~(self.jt[:, None] & self.js[None, :])

    def count_sequence(self, upto: int) -> list:
        """Exact simple-loop counts for lengths 1..upto (big integers)."""
        if self.mode == "periodic_at":
            ai, others = self.ai, self.others
            A = self.A
            counts = [1 if A[ai, ai] else 0]
            x = {j: 1 for j in others if A[ai, j]}
            for _ in range(2, upto + 1):
                counts.append(sum(c for j, c in x.items() if A[j, ai]))
                x = _count_step(x, A, others)
            return counts[:upto]
        counts = []
        x = {i: 1 for i in range(len(self.syms)) if self.js[i]}
        live = list(range(len(self.syms)))
        for _ in range(1, upto + 1):
            counts.append(sum(c for i, c in x.items() if self.jt[i]))
            x = _count_step(x, self.T, live)
        return counts

    def weights(self, phi: Potential, psi: Potential):
        if self.mode == "bridges" and (phi.depth > 1 or psi.depth > 1):
            raise ModeError("bridge loop weights support depth-1 potentials")
        if phi.depth > 2 or psi.depth > 2:
            raise ModeError(
                "aggregated loop weights support depth <= 2; "
                "use an explicit inventory with sup/inf bracketing"
            )
        n = len(self.syms)
        PHI = np.zeros((n, n))
        PSI = np.zeros((n, n))
        for i, u in enumerate(self.syms):
            for j, v in enumerate(self.syms):
                if self.A[i, j]:
                    PHI[i, j] = phi((u, v)[: phi.depth])
                    PSI[i, j] = psi((u, v)[: psi.depth])
        return PHI, PSI


def _count_step(x, A, targets):
    new: dict = {}
    for j, c in x.items():
        row = A[j]
        for w in targets:
            if row[w]:
                new[w] = new.get(w, 0) + c
    return new


def _matrix_log_z(structure: _LoopStructure, phi, psi, max_len):
    """Callable beta -> log Z(beta) over loops of length <= max_len.

    Masses are aggregated per length by a first-return transfer recursion
    kept in rescaled form; the recursion stops early only after many
    consecutive lengths contribute negligibly *and* keep contributing,
    which can only shave mass (the root stays a lower bound).
    """
    PHI, PSI = structure.weights(phi, psi)
    A = structure.A
    STOP_RUN = 16

    if structure.mode == "periodic_at":
        ai = structure.ai
        others = np.array(structure.others, dtype=int)

        def log_z(beta: float) -> float:
            # loop of length n carries n edge weights: start a->v2,
            # interior steps, and the closing edge v_n->a
            G = PHI - beta * PSI
            gmax = float(G[A].max())
            total = float(G[ai, ai]) if A[ai, ai] else NEG_INF
            if len(others) == 0 or max_len < 2:
                return total
            B = np.where(A, np.exp(G - gmax), 0.0)
            x = B[ai, others]  # scaled mass after the start edge
            close = B[others, ai]
            Bo = B[np.ix_(others, others)]
            logscale = 0.0  # log of the rescaling applied to x so far
            decay_run = 0
            for n in range(2, max_len + 1):
                zc = float(x @ close)
                if zc > 0:
                    log_zn = logscale + math.log(zc) + n * gmax
                    total = float(np.logaddexp(total, log_zn))
                    decay_run = decay_run + 1 if log_zn < total - EARLY_STOP_MARGIN else 0
                    if decay_run >= STOP_RUN:
                        break
                if n < max_len:
                    x = x @ Bo
                    m = float(x.max()) if x.size else 0.0
                    if m <= 0:
                        break
                    x /= m
                    logscale += math.log(m)
            return total

    else:
        phi_node = np.array([phi((u,)) for u in structure.syms])
        psi_node = np.array([psi((u,)) for u in structure.syms])
        T = structure.T
        js, jt = structure.js, structure.jt

        def log_z(beta: float) -> float:
            # bridge words carry one node weight per symbol
            g = phi_node - beta * psi_node
            gmax = float(g.max())
            w = np.exp(g - gmax)
            step = T * w[None, :]
            x = np.where(js, w, 0.0)
            logscale = 0.0
            total = NEG_INF
            decay_run = 0
            for n in range(1, max_len + 1):
                zc = float(x[jt].sum())
                if zc > 0:
                    log_zn = logscale + math.log(zc) + n * gmax
                    total = float(np.logaddexp(total, log_zn))
                    decay_run = decay_run + 1 if log_zn < total - EARLY_STOP_MARGIN else 0
                    if decay_run >= STOP_RUN:
                        break
                if n < max_len:
                    x = x @ step
                    m = float(x.max())
                    if m <= 0:
                        break
                    x /= m
                    logscale += math.log(m)
            return total

    return log_z


# -- induced potentials ------------------------------------------------------


@dataclass
class InducedValues:
    """Per-loop orbit sums, aligned with the inventory's loop order."""

    lengths: np.ndarray
    values: np.ndarray
    boundary: str = EXACT


def induce_potential(p: Potential, inv: LoopInventory, mode: str = EXACT) -> InducedValues:
    """Orbit sum of ``p`` along every loop of a listable inventory.

    Periodic-at-``a`` loops are always followed by ``a`` again, which pins
    the continuation and keeps depth-2 sums exact; deeper potentials fall
    back to sup/inf bracketing.  The induced value of the constant 1 is
    the loop length.
    """
    if inv.kind == "renewal-chain":
        return _induce_renewal_chain(p, inv)
    if inv.kind != "explicit":
        raise PreconditionError(
            f"{inv.kind!r} inventories aggregate loops; induced values are not "
            "materialised per loop"
        )
    continuation = inv.collection.at if inv.collection.kind == "periodic_at" else None
    lengths, values = [], []
    for loop in inv.iter_loops():
        w = Word(loop.symbols)
        if p.depth == 1:
            bs = birkhoff_sum(p, w)
        elif continuation is not None and p.depth == 2 and mode == EXACT:
            bs = birkhoff_sum(p, w, EXACT, continuation=continuation)
        elif mode in (SUP, INF_MODE):
            bs = birkhoff_sum(p, w, mode, trunc=inv.trunc, spec=inv.spec)
        else:
            raise ModeError(
                "need a pinned continuation (periodic-at loops, depth <= 2) "
                "or sup/inf mode for this potential depth"
            )
        lengths.append(loop.length)
        values.append(bs.value)
    return InducedValues(np.array(lengths, dtype=float), np.array(values), mode)


def _induce_renewal_chain(p: Potential, inv: LoopInventory) -> InducedValues:
    top = inv._chain_top
    ks = np.arange(1, top + 1)
    vals = np.empty(top)
    if p.depth == 1:
        # loop k = (1, k, k-1, ..., 2): value = p(1) + sum_{j=2..k} p(j)
        base = p((1,))
        acc = 0.0
        for k in range(1, top + 1):
            if k >= 2:
                acc += p((k,))
            vals[k - 1] = base + acc
    elif p.depth == 2:
        # pairs (1,k), (k,k-1), ..., (3,2), (2,1); the loop (1) sees (1,1)
        vals[0] = p((1, 1))
        acc = 0.0  # sum of p(j, j-1) for j = 3..k
        for k in range(2, top + 1):
            if k >= 3:
                acc += p((k, k - 1))
            vals[k - 1] = p((1, k)) + acc + p((2, 1))
    else:
        raise ModeError("renewal chain inductions support depth <= 2")
    return InducedValues(ks.astype(float), vals, EXACT)


# -- loop pressure -----------------------------------------------------------


def loop_pressure(
    inv: LoopInventory,
    phi: Potential,
    psi: Potential,
    tol: float = 1e-10,
    tail_majorant: Optional[Callable[[float], float]] = None,
    expansions: int = 60,
) -> PressureResult:
    """Root of ``Z(beta) = 1`` over the inventory's loops.

    The truncated root is a certified lower bound for the full collection
    pressure (dropping loops only removes positive mass) and is
    nondecreasing in the length cap.  ``tail_majorant``, when supplied,
    is ``beta -> log`` of an upper bound on the omitted mass; the reported
    value is then the root of the majorised partition function and the
    bracket closes to (truncated root, majorised root).
    """
    if not psi.strictly_positive:
        raise PreconditionError("loop pressure needs a strictly positive psi")
    _require_full_loop_shift(inv)

    if inv.kind in ("explicit", "renewal-chain"):
        ind_phi = induce_potential(phi, inv)
        ind_psi = induce_potential(psi, inv)
        if ind_phi.values.size == 0:
            return PressureResult(
                -INF, "loop-route", (-INF, -INF),
                {"note": "empty loop inventory", "loops": 0},
            )
        if ind_psi.values.min() <= 0:
            raise PreconditionError("induced psi must be positive on every loop")
        pa, sa = ind_phi.values, ind_psi.values

        def log_z(beta: float) -> float:
            return float(logsumexp(pa - beta * sa))

        radius = float(np.abs(pa).max() / sa.min()) + 1.0
        nloops = int(pa.size)
    elif inv.kind == "counted":
        if phi.constant is None or psi.constant is None:
            raise PreconditionError(
                "counted inventories support constant potentials "
                "(induced values proportional to loop length)"
            )
        if psi.constant <= 0:
            raise PreconditionError("psi must be a positive constant here")
        items = sorted(inv._counts.items())
        if not items:
            return PressureResult(
                -INF, "loop-route", (-INF, -INF),
                {"note": "empty loop inventory", "loops": 0},
            )
        ns = np.array([n for n, _ in items], dtype=float)
        logc = np.array([_log_big(c) for _, c in items])
        cphi, cpsi = phi.constant, psi.constant

        def log_z(beta: float) -> float:
            return float(logsumexp(logc + ns * (cphi - beta * cpsi)))

        radius = abs(cphi) / cpsi + 1.0
        nloops = int(sum(c for _, c in items))
    elif inv.kind == "matrix":
        log_z = _matrix_log_z(inv._structure, phi, psi, inv.max_len)
        PHI, PSI = inv._structure.weights(phi, psi)
        mask = inv._structure.A
        if not mask.any():
            return PressureResult(
                -INF, "loop-route", (-INF, -INF), {"note": "no transitions"}
            )
        if PSI[mask].min() <= 0:
            raise PreconditionError("psi must be positive on every transition")
        radius = float(np.abs(PHI[mask]).max() / PSI[mask].min()) + 1.0
        nloops = None
    else:
        raise DomainError(inv.kind)

    diag = {"kind": inv.kind, "max_len": inv.max_len, "collection":
            inv.collection.describe() if inv.collection else "?"}
    if nloops is not None:
        diag["loops"] = nloops

    lower_root, lo, hi, status = solve_decreasing(log_z, 0.0, radius, tol, expansions)
    if status == "plus_inf":
        cert = DivergenceCertificate(
            rule="loop-mass-persistent",
            window=(lo, INF),
            partial_sum=math.exp(min(log_z(lo), 700.0)),
            sample_words=[],
            detail={"note": f"Z(beta) >= 1 for every probed beta up to {lo:g}"},
        )
        return PressureResult(INF, "loop-route", (lo, INF), diag, certificate=cert)
    if status == "minus_inf":
        diag["note"] = "loop mass below 1 for every probed beta (finite inventory)"
        return PressureResult(-INF, "loop-route", (-INF, hi), diag)

    if tail_majorant is None:
        return PressureResult(lower_root, "loop-route", (lo, INF), diag)

    def log_z_up(beta: float) -> float:
        t = tail_majorant(beta)
        z = log_z(beta)
        if t == INF:
            return INF
        return float(np.logaddexp(z, t))

    upper_root, ulo, uhi, ustatus = solve_decreasing(
        log_z_up, lower_root, max(1e-6, tol), tol, expansions
    )
    if ustatus != "ok":
        diag["note"] = "tail majorant did not close the bracket"
        return PressureResult(lower_root, "loop-route", (lo, INF), diag)
    diag["tail_corrected"] = True
    return PressureResult(upper_root, "loop-route", (lower_root, uhi), diag)


def _require_full_loop_shift(inv: LoopInventory) -> None:
    """The unit-mass equation needs the loop alphabet to generate a full
    shift.  Periodic-at loops always concatenate; bridge loops do only
    when every terminal symbol may be followed by every starting symbol
    (counted inventories are built that way by construction)."""
    coll = inv.collection
    if coll is None or coll.kind != "bridges" or inv.trunc is None:
        return
    spec = inv.spec
    retained = set(inv.trunc.retained)
    for t in coll.terminating & retained:
        for s in coll.starting & retained:
            if not spec.allows(t, s):
                raise PreconditionError(
                    "bridge loops do not form a full shift here: "
                    f"{t!r} cannot be followed by {s!r}"
                )


def _log_big(c: int) -> float:
    """log of a positive integer of arbitrary size."""
    if c <= 0:
        raise DomainError("count must be positive")
    shift = max(0, c.bit_length() - 53)
    return math.log(c >> shift) + shift * math.log(2.0)


def compose_counts(simple_counts: dict, max_len: int) -> dict:
    """Counts of all collection words per length from simple-loop counts
    via the unique-factorisation convolution  p_n = s_n + sum s_k p_{n-k}."""
    p: dict = {}
    for n in range(1, max_len + 1):
        total = simple_counts.get(n, 0)
        for k in range(1, n):
            sk = simple_counts.get(k, 0)
            if sk and (n - k) in p:
                total += sk * p[n - k]
        if total:
            p[n] = total
    return p
