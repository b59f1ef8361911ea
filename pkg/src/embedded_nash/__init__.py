"""Embedded Nash problem for irreducible plane curve germs.

Resolution dual graphs, minimal m-separating refinements, essential, dlt and
contact m-valuations, m-log canonical thresholds and fractional intersection
multiplicities, with an independent power-series oracle.
"""

from .branch import DerivedInvariants, EuclidTrace, PlaneBranch, approximate_root, derive_invariants, euclid_trace, validate_branch
from .contact import (
    ContactComponent,
    FimMultiset,
    Location,
    classify,
    contact_components,
    fim_formula,
    fim_monotonicity_check,
    verify_inclusions,
)
from .graph import (
    DualGraph,
    GraphVertex,
    build_minimal_graph,
    contact_codim,
    divisor_label,
    dlt_set,
    essential_set,
    export_dot,
    lct_m,
    load_generic_graph,
    refine_m_separating,
    separating_graph,
    top_contact_set,
)
from .oracle import (
    ArcPair,
    BivariatePolynomial,
    TowerData,
    compute_tower,
    construct_arc,
    contact_order,
    cross_validate,
    defining_polynomial,
    fim_newton,
)
from .series import TruncSeries, series_arith, series_reversion, unit_divide

__version__ = "0.1.0"

__all__ = [
    "approximate_root",
    "ArcPair",
    "BivariatePolynomial",
    "build_minimal_graph",
    "classify",
    "compute_tower",
    "construct_arc",
    "contact_codim",
    "contact_components",
    "contact_order",
    "ContactComponent",
    "cross_validate",
    "defining_polynomial",
    "derive_invariants",
    "DerivedInvariants",
    "divisor_label",
    "dlt_set",
    "DualGraph",
    "essential_set",
    "euclid_trace",
    "EuclidTrace",
    "export_dot",
    "fim_formula",
    "fim_monotonicity_check",
    "fim_newton",
    "FimMultiset",
    "GraphVertex",
    "lct_m",
    "load_generic_graph",
    "Location",
    "PlaneBranch",
    "refine_m_separating",
    "separating_graph",
    "series_arith",
    "series_reversion",
    "top_contact_set",
    "TowerData",
    "TruncSeries",
    "unit_divide",
    "validate_branch",
    "verify_inclusions",
]
