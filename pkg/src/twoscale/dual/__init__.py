"""Dual trees, ancestor hierarchies, renewal points, type determination and repositioning"""

from twoscale.dual.ancestry import determine_type, determine_types
from twoscale.dual.labels import ROOT, Label
from twoscale.dual.renewal import (
    Liveness,
    RenewalPoint,
    RenewalSequence,
    center_subsequence,
    lives,
    liveness_disagreement,
    renewal_points,
)
from twoscale.dual.repositioning import (
    GuideLine,
    PathMode,
    Reposition,
    SelectedPathState,
    selected_path,
)
from twoscale.dual.tree import (
    Branch,
    DualTree,
    FirstAncestorPath,
    ancestor_hierarchy,
    build_dual_tree,
    common_ancestor,
    common_ancestor_by_search,
    first_ancestor_path,
    hierarchy_branches,
)

__all__ = [
    "ROOT",
    "Branch",
    "DualTree",
    "FirstAncestorPath",
    "GuideLine",
    "Label",
    "Liveness",
    "PathMode",
    "RenewalPoint",
    "RenewalSequence",
    "Reposition",
    "SelectedPathState",
    "ancestor_hierarchy",
    "build_dual_tree",
    "center_subsequence",
    "common_ancestor",
    "common_ancestor_by_search",
    "determine_type",
    "determine_types",
    "first_ancestor_path",
    "hierarchy_branches",
    "lives",
    "liveness_disagreement",
    "renewal_points",
    "selected_path",
]
