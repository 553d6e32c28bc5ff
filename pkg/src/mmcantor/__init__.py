"""Multi-model Cantor sets: dimension, measure, geometry and invariants."""

from .clone_structure import (BUNDLED, CloneAddress, CloneMapSpec, CloneStructure, DQuantity, Model, ValidationReport,
                              bundled, check_address, children, d_quantity, enumerate_level, load_structure,
                              subdivide, validate_structure)
from .dimension import DimensionResult, eigenvalue, eigenvalue_curve, solve_dimension
from .errors import AddressError, CapExceededError, ConvergenceError, NotIrreducibleError, StructureError
from .invariants import (Comparison, MassRatioMap, TruncatedClopenInvariant, Verdict, additivity_residuals,
                         clopen_invariant, compare_invariants, identity_pairing, mass_ratio, mass_ratio_spectrum,
                         mass_ratios)
from .measure import (MeasureReport, clone_measure, measure_lower_bounds, measure_report, measure_upper_bounds,
                      relative_measures, solve)
from .oracle import char_poly_root_2x2, exhaustive_subdivision_sum, moran_solve
from .spectral import (FrobeniusData, SpectralMatrix, build_matrix, frobenius, is_irreducible, power_limit,
                       power_structure, predict_subdivision, uniform_power_bound)

__version__ = "0.1.0"

__all__ = [
    "BUNDLED", "CloneAddress", "CloneMapSpec", "CloneStructure", "DQuantity", "Model", "ValidationReport",
    "bundled", "check_address", "children", "d_quantity", "enumerate_level", "load_structure", "subdivide",
    "validate_structure",
    "DimensionResult", "eigenvalue", "eigenvalue_curve", "solve_dimension",
    "AddressError", "CapExceededError", "ConvergenceError", "NotIrreducibleError", "StructureError",
    "Comparison", "MassRatioMap", "TruncatedClopenInvariant", "Verdict", "additivity_residuals",
    "clopen_invariant", "compare_invariants", "identity_pairing", "mass_ratio", "mass_ratio_spectrum", "mass_ratios",
    "MeasureReport", "clone_measure", "measure_lower_bounds", "measure_report", "measure_upper_bounds",
    "relative_measures", "solve",
    "char_poly_root_2x2", "exhaustive_subdivision_sum", "moran_solve",
    "FrobeniusData", "SpectralMatrix", "build_matrix", "frobenius", "is_irreducible", "power_limit",
    "power_structure", "predict_subdivision", "uniform_power_bound",
]
