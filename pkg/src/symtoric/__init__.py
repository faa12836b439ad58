"""Combinatorial certification of Einstein-Kähler metrics on symmetric toric Fano manifolds."""

from .catalog import FamilySpec, enumerate_smooth_fano_surfaces, family_fan, family_witnesses, lattice_equivalent, named_fan
from .certify import CertificationReport, certify, necessary_conditions
from .fan import Fan, ValidationReport, build_fan, validate_smooth_fano
from .lattice import UnimodularMap, fixed_subspace, smith_normal_form
from .polytope import Barycenter, FanoPolytope, barycenter, polytope_from_fan
from .symmetry import SymmetryGroup, SymmetryVerdict, fan_automorphisms, group_closure, is_symmetric, verify_subgroup

__all__ = [
    "Barycenter",
    "CertificationReport",
    "FamilySpec",
    "Fan",
    "FanoPolytope",
    "SymmetryGroup",
    "SymmetryVerdict",
    "UnimodularMap",
    "ValidationReport",
    "barycenter",
    "build_fan",
    "certify",
    "enumerate_smooth_fano_surfaces",
    "family_fan",
    "family_witnesses",
    "fan_automorphisms",
    "fixed_subspace",
    "group_closure",
    "is_symmetric",
    "lattice_equivalent",
    "named_fan",
    "necessary_conditions",
    "polytope_from_fan",
    "smith_normal_form",
    "validate_smooth_fano",
    "verify_subgroup",
]
