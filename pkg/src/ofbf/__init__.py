"""Operator fractional Brownian fields: symmetry groups, covariance and simulation."""

from .construct import build_ac, build_singular, recipe_for_range
from .groups import CompactGroup2, cyclic, dihedral, dstar1, intersect, o2, parse_group, so2
from .measures import atomic, constant, cyclic_slices, dihedral_slices, piecewise, pivot_measure, xi_lift
from .polar import PolarSystem, polar_decompose
from .sim import GridDesign, build_sampler, empirical_symmetry_test, sample
from .spectral import QuadratureConfig, covariance, fbm_spec, make_spec, oss_check
from .symmetry import classify, domain_of_measure, range_group, validate_pair

__all__ = [
    "CompactGroup2",
    "GridDesign",
    "PolarSystem",
    "QuadratureConfig",
    "atomic",
    "build_ac",
    "build_sampler",
    "build_singular",
    "classify",
    "constant",
    "covariance",
    "cyclic",
    "cyclic_slices",
    "dihedral",
    "dihedral_slices",
    "domain_of_measure",
    "dstar1",
    "empirical_symmetry_test",
    "fbm_spec",
    "intersect",
    "make_spec",
    "o2",
    "oss_check",
    "parse_group",
    "piecewise",
    "pivot_measure",
    "polar_decompose",
    "range_group",
    "recipe_for_range",
    "sample",
    "so2",
    "validate_pair",
    "xi_lift",
]
