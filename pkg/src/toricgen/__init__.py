"""Smooth projective toric varieties with prescribed Milnor genus.

Fans and star subdivisions, a localization-based intersection engine,
closed-form genus formulas, generator recipes and the coprime-epsilon sweep.
"""
from .chow import DivisorMonomial, cohomology_presentation, euler_characteristic, intersection_number, milnor_genus
from .constructor import ConstructionPlan, construct, materialize, verify_plan
from .fan import FamilyParams, Fan, build_family_fan, facet_pairing_complete, is_regular, projective_space_fan, star_subdivide
from .genus import R, R_mod, edge_blowup_genus, family_genus, generator_target, point_blowup_delta

__version__ = "0.1.0"

__all__ = [
    "ConstructionPlan",
    "DivisorMonomial",
    "FamilyParams",
    "Fan",
    "R",
    "R_mod",
    "build_family_fan",
    "cohomology_presentation",
    "construct",
    "edge_blowup_genus",
    "euler_characteristic",
    "facet_pairing_complete",
    "family_genus",
    "generator_target",
    "intersection_number",
    "is_regular",
    "materialize",
    "milnor_genus",
    "point_blowup_delta",
    "projective_space_fan",
    "star_subdivide",
    "verify_plan",
]
