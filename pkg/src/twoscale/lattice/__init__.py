"""Two-scale graphs, the general H1/H2 framework and the mesoscopic scale hierarchy"""

from twoscale.lattice.general import (
    GeneralTwoScaleGraph,
    SeparationReport,
    check_scale_separation,
    from_two_scale_graph,
)
from twoscale.lattice.graph import (
    Boundary,
    LatticeSpec,
    TwoScaleGraph,
    build_two_scale_graph,
    center_of,
    crosses_hyperplane,
    patch_of,
)
from twoscale.lattice.hierarchy import ScaleHierarchy, block_length, make_hierarchy

__all__ = [
    "Boundary",
    "GeneralTwoScaleGraph",
    "LatticeSpec",
    "ScaleHierarchy",
    "SeparationReport",
    "TwoScaleGraph",
    "block_length",
    "build_two_scale_graph",
    "center_of",
    "check_scale_separation",
    "crosses_hyperplane",
    "from_two_scale_graph",
    "make_hierarchy",
    "patch_of",
]
