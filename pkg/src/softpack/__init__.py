"""softpack: densities and bounds for outer parallel domains of unit-ball packings."""

__version__ = "0.1.0"

from .core import (
    PAIRWISE_LIMIT,
    Inflation,
    IntersectionGraph,
    Packing,
    Regime,
    ValidationReport,
    classify_regime,
    contact_count,
    intersection_graph,
    lattice_patch,
    load_packing,
    rogers_limit,
    save_packing_csv,
    save_packing_json,
    validate_packing,
)
from .montecarlo import MCEstimate

__all__ = [
    "PAIRWISE_LIMIT",
    "Inflation",
    "IntersectionGraph",
    "MCEstimate",
    "Packing",
    "Regime",
    "ValidationReport",
    "classify_regime",
    "contact_count",
    "intersection_graph",
    "lattice_patch",
    "load_packing",
    "rogers_limit",
    "save_packing_csv",
    "save_packing_json",
    "validate_packing",
    "__version__",
]
