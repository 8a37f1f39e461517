"""Melnikov functions of the piecewise perturbed isochronous centers."""

from .basis import BasisFunction, basis_eval, basis_for, basis_metadata, tag_registry
from .centers import CENTERS, S1, S2, S3, S4, CenterSpec, get_center
from .coeffmap import (
    LinearMap,
    MelnikovExpansion,
    closed_form_eval,
    coefficient_map,
    jacobian,
    linear_coefficient_map,
    unit_perturbation,
)
from .perturbation import BLOCKS, PerturbationSpec, monomials, param_names
from .quadrature import half_integrals, melnikov_quadrature, melnikov_quadrature_array, monomial_integrals

__all__ = [
    "BLOCKS", "BasisFunction", "CENTERS", "CenterSpec", "LinearMap", "MelnikovExpansion",
    "PerturbationSpec", "S1", "S2", "S3", "S4", "basis_eval", "basis_for", "basis_metadata",
    "closed_form_eval", "coefficient_map", "get_center", "half_integrals", "jacobian",
    "linear_coefficient_map", "melnikov_quadrature", "melnikov_quadrature_array",
    "monomial_integrals", "monomials", "param_names", "tag_registry", "unit_perturbation",
]
