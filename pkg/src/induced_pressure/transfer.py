"""Weighted transfer matrices on finite truncations.

The classical pressure of a depth-``m`` potential on a finite shift is
``log`` of the Perron eigenvalue of the matrix indexed by admissible
``(m-1)``-tuples, with entry ``exp`` of the potential on the overlapping
``m``-tuple.  Weights are kept in log form and rescaled per strongly
connected component, so arbitrarily large or small potential values never
overflow.  Eigenvalues come from power iteration (deterministic all-ones
start) with a certified min/max-ratio bracket; a small diagonal shift
keeps the iteration convergent on periodic components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ConvergenceError, PreconditionError
from .potentials import Potential
from .shifts import Truncation, WordCollection

NEG_INF = float("-inf")

POWER_RTOL = 1e-13
POWER_MAXITER = 10**6


class TransferMatrix:
    """Log-weighted transition structure of a potential on a truncation.

    ``states`` are admissible ``max(1, depth-1)``-tuples over the retained
    symbols; the edge ``(u, v)`` carries the potential value on the tuple
    ``u + (v[-1],)``.  ``logw[i, j]`` is that value, ``-inf`` when the
    transition is not admissible.
    """

    def __init__(self, trunc: Truncation, p: Potential):
        spec = trunc.owner
        d = max(1, p.depth - 1)
        states = [(s,) for s in trunc.retained]
        for _ in range(d - 1):
            states = [
                st + (s,)
                for st in states
                for s in trunc.retained
                if spec.allows(st[-1], s)
            ]
        self.trunc = trunc
        self.potential = p
        self.depth = p.depth
        self.states = states
        self.index = {st: i for i, st in enumerate(states)}
        n = len(states)
        logw = np.full((n, n), NEG_INF)
        for i, u in enumerate(states):
            for j, v in enumerate(states):
                if u[1:] == v[:-1] and spec.allows(u[-1], v[-1]):
                    logw[i, j] = p((u + (v[-1],))[: p.depth])
        self.logw = logw

    @property
    def n(self) -> int:
        return len(self.states)

    def component_labels(self):
        """Strongly connected components of the admissibility pattern."""
        pattern = csr_matrix(np.isfinite(self.logw))
        ncomp, labels = connected_components(pattern, directed=True, connection="strong")
        return ncomp, labels

    def states_with_symbol(self, a):
        return [i for i, st in enumerate(self.states) if a in st]


@dataclass
class PerronResult:
    log_value: float  # log of the Perron eigenvalue
    bracket: tuple  # certified (lower, upper) on the log value
    iterations: int


def _maxplus_condition(logw: np.ndarray):
    """Critical-cycle balancing of a strongly connected log-weight matrix.

    Returns ``(mu, d)`` where ``mu`` is the maximal mean cycle weight
    (Karp) and ``d`` a max-plus subeigenvector: the similarity
    ``logw + d_i - d_j - mu`` has every entry <= 0 with the dominant cycle
    exactly at 0, so ``exp`` of it has Perron root in ``[1, n]`` no matter
    how wide the original weight range is.  The conjugation leaves the
    spectrum untouched.
    """
    n = logw.shape[0]
    D = np.full((n + 1, n), NEG_INF)
    D[0, 0] = 0.0  # source = state 0; the block is strongly connected
    for k in range(n):
        D[k + 1] = np.max(D[k][:, None] + logw, axis=0)
    finite_end = np.isfinite(D[n])
    ks = np.arange(n)
    best = NEG_INF
    for v in np.flatnonzero(finite_end):
        diffs = (D[n, v] - D[ks, v]) / (n - ks)
        best = max(best, float(np.min(diffs)))
    mu = best
    B = logw - mu
    d = np.full(n, NEG_INF)
    d[0] = 0.0
    for _ in range(n - 1):
        d = np.maximum(d, np.max(d[:, None] + B, axis=0))
    return mu, d


def _perron_log(logw: np.ndarray, rtol: float = POWER_RTOL, maxiter: int = POWER_MAXITER):
    """Perron root of exp(logw) in log form, by shifted power iteration.

    ``logw`` must be a single strongly connected block (callers split into
    components first).  Returns a :class:`PerronResult`; raises
    :class:`ConvergenceError` with the last certified bracket if the
    iteration cap is hit.

    Wide weight ranges are first balanced by a max-plus similarity: the
    Perron root can be dominated by a cycle whose entries all lie far
    below the matrix maximum, which no linear-scale iteration could see;
    after balancing the root lies in ``[1, n]`` by construction.
    """
    n = logw.shape[0]
    finite = np.isfinite(logw)
    if not finite.any():
        return PerronResult(NEG_INF, (NEG_INF, NEG_INF), 0)
    if n == 1:
        v = float(logw[0, 0])
        return PerronResult(v, (v, v), 0)

    spread = float(logw[finite].max() - logw[finite].min())
    if spread > 30.0:
        mu, d = _maxplus_condition(logw)
        work = logw + d[:, None] - d[None, :] - mu
        base = mu
    else:
        work, base = logw, 0.0
    scale = float(work[np.isfinite(work)].max())
    W = np.exp(work - scale, where=np.isfinite(work), out=np.zeros_like(work))

    # states whose balanced weights underflow carry < 1e-300 of the root's
    # mass; drop them by splitting on the numeric support
    numeric = W > 0
    if (numeric != finite).any():
        ncomp, labels = connected_components(
            csr_matrix(numeric), directed=True, connection="strong"
        )
        if ncomp > 1:
            best = PerronResult(NEG_INF, (NEG_INF, NEG_INF), 0)
            for c in range(ncomp):
                members = np.flatnonzero(labels == c)
                if len(members) == 1:
                    i = members[0]
                    val = float(logw[i, i]) if finite[i, i] else NEG_INF
                    res = PerronResult(val, (val, val), 0)
                else:
                    res = _perron_log(logw[np.ix_(members, members)], rtol, maxiter)
                if res.log_value > best.log_value:
                    best = res
            return best

    # diagonal shift: keeps min/max Collatz ratios converging on periodic
    # patterns without changing the Perron root
    shift = 0.02 * float(W.max())
    Ws = W + shift * np.eye(n)
    v = np.ones(n)
    lo = hi = None
    for it in range(1, maxiter + 1):
        w = Ws @ v
        ratios = w / v
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= rtol * max(hi, 1e-300):
            lam = 0.5 * (lo + hi) - shift
            if lam <= 0:  # numerically zero spectral radius
                return PerronResult(NEG_INF, (NEG_INF, NEG_INF), it)
            blo = max(lo - shift, 1e-300)
            bhi = max(hi - shift, blo)
            return PerronResult(
                base + scale + math.log(lam),
                (base + scale + math.log(blo), base + scale + math.log(bhi)),
                it,
            )
        v = w / w.max()
        if float(v.min()) < 1e-290:
            # near-underflow states hold a vanishing share of the root's
            # mass; restart without them rather than divide by zero
            keep = np.flatnonzero(v >= 1e-290)
            return _perron_log(logw[np.ix_(keep, keep)], rtol, maxiter)
    bracket = (
        base + scale + math.log(max(lo - shift, 1e-300)),
        base + scale + math.log(max(hi - shift, 1e-300)),
    )
    raise ConvergenceError(
        f"power iteration did not reach rtol={rtol} in {maxiter} iterations",
        bracket=bracket,
    )


def _perron_vectors(logw: np.ndarray, rtol: float = POWER_RTOL, maxiter: int = POWER_MAXITER):
    """(log Perron root, right vector, left vector) for an irreducible block.

    Vectors are positive, scaled to max 1 and unit pairing <u, v> = 1.
    Moderately wide weight ranges are balanced as in :func:`_perron_log`
    and the vectors mapped back through the diagonal similarity.
    """
    n = logw.shape[0]
    finite = np.isfinite(logw)
    spread = float(logw[finite].max() - logw[finite].min()) if n > 1 else 0.0
    if 30.0 < spread <= 600.0:
        mu, d = _maxplus_condition(logw)
        work, base = logw + d[:, None] - d[None, :] - mu, mu
    else:
        work, base, d = logw, 0.0, np.zeros(n)
    wfinite = np.isfinite(work)
    scale = float(work[wfinite].max())
    W = np.exp(work - scale, where=wfinite, out=np.zeros_like(work))
    shift = 0.02 * float(W.max())
    Ws = W + shift * np.eye(n)

    def iterate(M):
        v = np.ones(n)
        for it in range(1, maxiter + 1):
            w = M @ v
            ratios = w / v
            lo, hi = float(ratios.min()), float(ratios.max())
            v = w / w.max()
            if hi - lo <= rtol * max(hi, 1e-300):
                return 0.5 * (lo + hi), v
        raise ConvergenceError(f"eigenvector iteration stalled after {maxiter} steps")

    lam_s, right = iterate(Ws)
    _, left = iterate(Ws.T)
    right = right * np.exp(-d)
    left = left * np.exp(d)
    right = right / right.max()
    left = left / float(left @ right)
    return base + scale + math.log(lam_s - shift), right, left


def finite_pressure(
    trunc: Truncation,
    p: Potential,
    collection: Optional[WordCollection] = None,
    rtol: float = POWER_RTOL,
    maxiter: int = POWER_MAXITER,
) -> float:
    """Classical pressure of ``p`` on the truncated shift: log Perron root
    of the transfer matrix, maximised over irreducible components.

    ``collection=periodic_at(a)`` restricts to the components whose states
    involve the symbol ``a`` (the loops through ``a``); on an irreducible
    truncation this agrees with the unrestricted value.  Returns ``-inf``
    when the relevant part of the graph carries no cycles.
    """
    if len(trunc) == 0:
        raise PreconditionError("truncation is empty")
    tm = TransferMatrix(trunc, p)
    return transfer_pressure(tm, collection, rtol=rtol, maxiter=maxiter)


def transfer_pressure(tm, collection=None, rtol=POWER_RTOL, maxiter=POWER_MAXITER):
    ncomp, labels = tm.component_labels()
    wanted = None
    if collection is not None and collection.kind == "periodic_at":
        idx = tm.states_with_symbol(collection.at)
        wanted = {labels[i] for i in idx}
    elif collection is not None and collection.kind not in ("all",):
        raise PreconditionError(
            f"finite pressure supports all-words or periodic_at, not {collection.kind!r}"
        )
    best = NEG_INF
    for c in range(ncomp):
        if wanted is not None and c not in wanted:
            continue
        members = np.flatnonzero(labels == c)
        sub = tm.logw[np.ix_(members, members)]
        if len(members) == 1 and not np.isfinite(sub[0, 0]):
            continue  # trivial component: no cycle through it
        best = max(best, _perron_log(sub, rtol, maxiter).log_value)
    return best


@dataclass
class EquilibriumMeasure:
    """Stationary Markov chain from the Perron data of a transfer matrix,
    restricted to the dominant component."""

    states: list
    transition: np.ndarray
    stationary: np.ndarray
    entropy_rate: float
    log_perron: float

    def integrate(self, f: Potential) -> float:
        """Integral of a potential of depth <= state length + 1 against
        the chain (edge marginals for the deepest coordinate)."""
        d = len(self.states[0])
        if f.depth <= d:
            return float(
                math.fsum(
                    self.stationary[i] * f(st[: f.depth]) for i, st in enumerate(self.states)
                )
            )
        if f.depth != d + 1:
            raise PreconditionError("potential too deep for this chain")
        total = 0.0
        for i, u in enumerate(self.states):
            for j, v in enumerate(self.states):
                pij = self.transition[i, j]
                if pij > 0:
                    total += self.stationary[i] * pij * f(u + (v[-1],))
        return total


def equilibrium_measure(tm: TransferMatrix) -> EquilibriumMeasure:
    """Perron-vector Markov measure of the dominant irreducible component."""
    ncomp, labels = tm.component_labels()
    best, best_members = NEG_INF, None
    for c in range(ncomp):
        members = np.flatnonzero(labels == c)
        sub = tm.logw[np.ix_(members, members)]
        if len(members) == 1 and not np.isfinite(sub[0, 0]):
            continue
        val = _perron_log(sub).log_value
        if val > best:
            best, best_members = val, members
    if best_members is None:
        raise PreconditionError("no cycles: equilibrium measure undefined")
    sub = tm.logw[np.ix_(best_members, best_members)]
    logp, right, left = _perron_vectors(sub)
    finite = np.isfinite(sub)
    scale = float(sub[finite].max())
    W = np.exp(sub - scale, where=finite, out=np.zeros_like(sub))
    lam = math.exp(logp - scale)
    P = W * right[None, :] / (lam * right[:, None])
    P = P / P.sum(axis=1, keepdims=True)  # clean rounding: rows sum to 1
    pi = left * right
    pi = pi / pi.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        logP = np.where(P > 0, np.log(np.where(P > 0, P, 1.0)), 0.0)
    h = float(-(pi[:, None] * P * logP).sum())
    states = [tm.states[i] for i in best_members]
    return EquilibriumMeasure(states, P, pi, h, logp)


def variational_defect(trunc, phi, psi, beta, combined=None):
    """h_mu + int(phi) - beta * int(psi) at the equilibrium measure of the
    weight phi - beta*psi.  Zero (to solver precision) exactly when beta is
    the scaling-potential pressure of the truncation."""
    from .potentials import combine

    g = combined if combined is not None else combine(phi, psi, (1.0, -beta))
    tm = TransferMatrix(trunc, g)
    mu = equilibrium_measure(tm)
    return mu.entropy_rate + mu.integrate(phi) - beta * mu.integrate(psi)


class PressureFamily:
    """Evaluations of beta -> pressure(phi - beta*psi) on one truncation.

    The two potentials are lifted to a common state space once; each
    evaluation then only recombines the cached log-weight matrices and
    re-runs the eigensolve per component, so bisection stays cheap.
    """

    def __init__(self, trunc, phi, psi, collection=None,
                 rtol=POWER_RTOL, maxiter=POWER_MAXITER):
        from .potentials import combine

        if len(trunc) == 0:
            raise PreconditionError("truncation is empty")
        tm_phi = TransferMatrix(trunc, combine(phi, psi, (1.0, 0.0)))
        tm_psi = TransferMatrix(trunc, combine(phi, psi, (0.0, 1.0)))
        self.states = tm_phi.states
        self.pattern = np.isfinite(tm_phi.logw)
        self.phi_w = np.where(self.pattern, tm_phi.logw, 0.0)
        self.psi_w = np.where(self.pattern, tm_psi.logw, 0.0)
        self.rtol = rtol
        self.maxiter = maxiter
        self.evals = 0

        ncomp, labels = tm_phi.component_labels()
        wanted = None
        if collection is not None and collection.kind == "periodic_at":
            idx = tm_phi.states_with_symbol(collection.at)
            wanted = {labels[i] for i in idx}
        elif collection is not None and collection.kind != "all":
            raise PreconditionError(
                "pseudo-inverse supports all-words or periodic_at collections"
            )
        self.components = []
        for c in range(ncomp):
            if wanted is not None and c not in wanted:
                continue
            members = np.flatnonzero(labels == c)
            if len(members) == 1 and not self.pattern[members[0], members[0]]:
                continue
            self.components.append(members)

    @property
    def nilpotent(self) -> bool:
        return not self.components

    @property
    def min_psi(self) -> float:
        return float(self.psi_w[self.pattern].min()) if self.pattern.any() else math.inf

    @property
    def max_psi(self) -> float:
        return float(self.psi_w[self.pattern].max()) if self.pattern.any() else math.inf

    @property
    def max_abs_phi(self) -> float:
        return float(np.abs(self.phi_w[self.pattern]).max()) if self.pattern.any() else 0.0

    def value(self, beta: float) -> float:
        """log Perron root of exp(phi - beta*psi), max over components."""
        self.evals += 1
        logw = np.where(self.pattern, self.phi_w - beta * self.psi_w, NEG_INF)
        best = NEG_INF
        for members in self.components:
            sub = logw[np.ix_(members, members)]
            best = max(best, _perron_log(sub, self.rtol, self.maxiter).log_value)
        return best
