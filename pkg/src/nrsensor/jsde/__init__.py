"""Joint sparse deconvolution and extrapolation (JSDE)."""

from .engine import reconstruct
from .model import (DegenerateAtomError, SparseModel, denominators_all, jsde_model,
                    numerators_all, projection_coefficient, select_basis, selection_scores,
                    weighted_energy)
from .operators import (BlockContext, JsdeParams, aggregate, basis_function,
                        context_from_area, distribute, frequency_prior, make_context,
                        prior_map, scan_coords, scan_index, weight_function)

__all__ = [
    "BlockContext", "DegenerateAtomError", "JsdeParams", "SparseModel", "aggregate",
    "basis_function", "context_from_area", "denominators_all", "distribute",
    "frequency_prior", "jsde_model", "make_context", "numerators_all", "prior_map",
    "projection_coefficient", "reconstruct", "scan_coords", "scan_index", "select_basis",
    "selection_scores", "weight_function", "weighted_energy",
]
