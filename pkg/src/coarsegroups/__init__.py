"""Exact coarse geometry of discrete groups.

Weighted word metrics on a handful of group kinds, d-disjoint cover
certificates with exhaustive verification, an exact cover search on
finite balls, Smith normal form ranks and Hirsch-length bounds.
"""
from .abelian import (
    IntegerMatrix,
    SNFResult,
    asdim_abelian,
    rank_and_torsion,
    ses_additivity_check,
    smith_normal_form,
)
from .covers import (
    CoverCertificate,
    ExplicitFamily,
    IntervalFamily,
    ProductFamily,
    extend_cover_by_cosets,
    make_interval_cover,
    product_cover,
    verify_families,
)
from .groups import (
    DirectProduct,
    FiniteCyclic,
    Free,
    FreeAbelian,
    Heisenberg,
    Homomorphism,
    PresentedAbelian,
    RationalsTruncated,
)
from .metric import ExceedsCap, MetricContext, WeightFunction, ball, distance, norm
from .solvable import INF, SeriesSpec, asdim_bounds, countable_sup, hirsch_length
from .solver import MetricTable, exhaustive_cover_oracle, solve_min_diameter

__version__ = "0.1.0"

__all__ = [
    "IntegerMatrix",
    "SNFResult",
    "asdim_abelian",
    "rank_and_torsion",
    "ses_additivity_check",
    "smith_normal_form",
    "CoverCertificate",
    "ExplicitFamily",
    "IntervalFamily",
    "ProductFamily",
    "extend_cover_by_cosets",
    "make_interval_cover",
    "product_cover",
    "verify_families",
    "DirectProduct",
    "FiniteCyclic",
    "Free",
    "FreeAbelian",
    "Heisenberg",
    "Homomorphism",
    "PresentedAbelian",
    "RationalsTruncated",
    "ExceedsCap",
    "MetricContext",
    "WeightFunction",
    "ball",
    "distance",
    "norm",
    "INF",
    "SeriesSpec",
    "asdim_bounds",
    "countable_sup",
    "hirsch_length",
    "MetricTable",
    "exhaustive_cover_oracle",
    "solve_min_diameter",
]
