"""Induced topological pressure on countable-state Markov shifts.

Pressure of a potential, measured in the orbit-sum time of a nonnegative
scaling potential, over a chosen collection of finite words.  Three
mutually cross-checking computational routes: window partition sums,
pseudo-inverse of the Perron-eigenvalue pressure on truncations, and the
loop-space (first-return) partition function.  Applications: Gurevich
pressure, amenability diagnostics for group extensions, and entropy and
pressure of special semi-flows.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    ModeError,
    PreconditionError,
    ResourceError,
    SignFlagError,
)
from .flows import FlowSpec, flow_pressure, savchenko_entropy
from .groups import (
    ExtensionShift,
    FiniteTableGroup,
    FreeGroup,
    GapReport,
    QuotientGroup,
    ZPowerGroup,
    irreducibility_report,
    pressure_gap,
)
from .loops import (
    InducedValues,
    LoopInventory,
    SimpleLoop,
    compose_counts,
    counted_inventory,
    enumerate_simple_loops,
    induce_potential,
    loop_pressure,
)
from .potentials import (
    BirkhoffSum,
    Potential,
    alpha_farey_geometric,
    birkhoff_sum,
    coboundary,
    combine,
    constant,
    first_symbol_negated,
    from_table,
    scale,
    zero,
)
from .pressure import (
    DivergenceCertificate,
    PressureResult,
    estimate_pressure_window,
    exhaustion_sequence,
    pseudo_inverse_pressure,
    solve_decreasing,
)
from .shifts import (
    ShiftSpec,
    Truncation,
    Word,
    WordCollection,
    all_words,
    bridges,
    custom_collection,
    enumerate_words,
    from_matrix,
    full_shift,
    is_admissible,
    periodic_at,
    periodic_words,
    renewal_shift,
    starting_in,
    truncate,
    truncate_range,
    word,
)
from .transfer import (
    EquilibriumMeasure,
    PressureFamily,
    TransferMatrix,
    equilibrium_measure,
    finite_pressure,
    variational_defect,
)

__version__ = "0.1.0"
