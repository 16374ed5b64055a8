"""Built-in fixture systems with their known values.

Each fixture bundles a shift, canonical potentials, closed-form expected
values usable as golden checks, and (where the weights have a usable decay
law) a tail majorant that closes the loop-route bracket from above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .groups import ExtensionShift, FiniteTableGroup, FreeGroup, ZPowerGroup
from .potentials import alpha_farey_geometric, constant, first_symbol_negated, zero
from .shifts import full_shift, renewal_shift

INF = float("inf")

LOG2 = math.log(2.0)


@dataclass
class Fixture:
    name: str
    description: str
    expected: dict
    build: Callable = None
    notes: dict = field(default_factory=dict)


def farey_tail_majorant(cap: int) -> Callable[[float], float]:
    """Upper bound on the loop mass dropped beyond the cap for the
    geometric height on the renewal chain: the weight of the length-k loop
    is (k(k+1))^-beta <= k^-2beta, so the tail is at most the integral
    cap^(1-2beta)/(2beta-1), finite for beta > 1/2."""

    def log_tail(beta: float) -> float:
        if beta <= 0.5:
            return INF
        return (1.0 - 2.0 * beta) * math.log(cap) - math.log(2.0 * beta - 1.0)

    return log_tail


def unit_length_tail_majorant(cap: int, rate: Callable[[float], float] = None):
    """Exact geometric tail for weights exp(-beta * k): closes the bracket
    when the induced scaling is the loop length."""

    def log_tail(beta: float) -> float:
        if beta <= 0:
            return INF
        return -beta * (cap + 1) - math.log1p(-math.exp(-beta))

    return log_tail


def catalog() -> dict:
    """All built-in fixtures, keyed by name."""
    fx = {}
    fx["alpha-farey"] = Fixture(
        name="alpha-farey",
        description=(
            "renewal shift with the geometric potential of the harmonic "
            "alpha-Farey map: psi = log 2 on [1], log((n+1)/(n-1)) on [n]; "
            "one simple loop per length with induced value log(k(k+1))"
        ),
        expected={
            "loop_pressure_zero": 1.0,  # telescoping: sum 1/(k(k+1)) = 1
            "unit_scaling_pressure": LOG2,  # geometric series root
            "induced_psi": "log(k*(k+1))",
        },
        build=lambda: {
            "spec": renewal_shift(),
            "psi": alpha_farey_geometric(),
            "phi": zero(),
            "tail_majorant": farey_tail_majorant,
        },
    )
    fx["renewal-phi"] = Fixture(
        name="renewal-phi",
        description=(
            "renewal shift with phi = -(first symbol) and the geometric "
            "psi: the all-words and periodic-at-1 pressures coincide, "
            "while with phi = 0 the all-words pressure diverges"
        ),
        expected={
            "routes_agree": "pseudo-inverse(all words) == loop route(periodic@1)",
            "zero_phi_all_words": "+inf",
        },
        build=lambda: {
            "spec": renewal_shift(),
            "psi": alpha_farey_geometric(),
            "phi": first_symbol_negated(),
        },
    )
    fx["z-srw"] = Fixture(
        name="z-srw",
        description=(
            "simple random walk extension over Z: bridge words of length "
            "2n number binomial(2n, n), simple bridges 2*Catalan(n-1); "
            "both collections have pressure log 2 (amenable)"
        ),
        expected={
            "p_starting": LOG2,
            "p_bridge": LOG2,
            "bridge_counts": "binomial(2n, n)",
            "simple_bridge_counts": "(2/n) * binomial(2n-2, n-1)",
        },
        build=lambda: {"ext": ExtensionShift(ZPowerGroup(1), "plain")},
    )
    fx["free-srw"] = Fixture(
        name="free-srw",
        description=(
            "simple random walk extension over the rank-2 free group: "
            "starting words grow at log 4, bridges at log(2*sqrt(3)) "
            "(spectral radius sqrt(3)/2), so the gap stays open"
        ),
        expected={
            "p_starting": math.log(4.0),
            "p_bridge": math.log(2.0 * math.sqrt(3.0)),
            "gap": math.log(4.0) - math.log(2.0 * math.sqrt(3.0)),
        },
        build=lambda: {"ext": ExtensionShift(FreeGroup(2), "plain")},
    )
    fx["z2-table"] = Fixture(
        name="z2-table",
        description="two-element group from an explicit table (finite, amenable)",
        expected={"gap": 0.0},
        build=lambda: {
            "ext": ExtensionShift(
                FiniteTableGroup(["e", "a"], [[0, 1], [1, 0]], generators=["a"]),
                "plain",
            )
        },
    )
    fx["unit-suspension"] = Fixture(
        name="unit-suspension",
        description="full shift on two symbols under constant height 1",
        expected={"entropy": LOG2, "entropy_height_2": LOG2 / 2.0},
        build=lambda: {
            "spec": full_shift(2),
            "tau": constant(1.0),
        },
    )
    return fx


def list_fixtures() -> list:
    """Catalog entries as plain dictionaries (for reports and the CLI)."""
    out = []
    for f in catalog().values():
        out.append(
            {
                "name": f.name,
                "description": f.description,
                "expected": {
                    k: (v if isinstance(v, (int, float, str)) else str(v))
                    for k, v in f.expected.items()
                },
            }
        )
    return out
