"""Oriented percolation, wet sets and the process-induced block fields"""

from twoscale.percolation.blocks import (
    InclusionReport,
    StableKind,
    estimate_eps,
    good_sites,
    inclusion_check,
    induced_field,
    is_good,
    neighbor_goodness,
    site_of_patch,
    stable_sites,
)
from twoscale.percolation.oriented import (
    CouplingReport,
    PercField,
    PercLattice,
    SurvivalCurve,
    TailEstimate,
    WetSets,
    extinction_tail,
    field_from_uniforms,
    iid_field,
    level_sites,
    restricted_coupling_check,
    sets_field,
    survival_curve,
    uniforms,
    wet_sets,
)

__all__ = [
    "CouplingReport",
    "InclusionReport",
    "PercField",
    "PercLattice",
    "StableKind",
    "SurvivalCurve",
    "TailEstimate",
    "WetSets",
    "estimate_eps",
    "extinction_tail",
    "field_from_uniforms",
    "good_sites",
    "iid_field",
    "inclusion_check",
    "induced_field",
    "is_good",
    "level_sites",
    "neighbor_goodness",
    "restricted_coupling_check",
    "sets_field",
    "site_of_patch",
    "stable_sites",
    "survival_curve",
    "uniforms",
    "wet_sets",
]
