"""
Process-induced percolation fields: good sites and type-i stable sites
File: src/twoscale/percolation/blocks.py
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set

import numpy as np

from twoscale.config import HorizonError
from twoscale.lattice.graph import Boundary, TwoScaleGraph
from twoscale.lattice.hierarchy import ScaleHierarchy
from twoscale.percolation.oriented import PercLattice, PercField, Site, WetSets, sets_field
from twoscale.process.models import TYPE1, TYPE2, Configuration
from twoscale.process.simulation import Trajectory

logger = logging.getLogger(__name__)


class StableKind(str, Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"


def _patch_grid(cfg: Configuration, hierarchy: ScaleHierarchy) -> np.ndarray:
    size = hierarchy.N**hierarchy.d
    if cfg.states.shape[0] != size:
        raise ValueError(
            f"configuration has {cfg.states.shape[0]} sites, the hierarchy patch has {size}"
        )
    return cfg.states.reshape((hierarchy.N,) * hierarchy.d)


def is_good(grid: np.ndarray, hierarchy: ScaleHierarchy, z: Site) -> bool:
    """B_z minus the core holds no 1 and every D-box outside the core holds a 2"""
    box = grid[hierarchy.box_slices(z)]
    outside = np.ones(box.shape, dtype=np.bool_)
    core = hierarchy.core_slices()
    local = []
    for sl, c in zip(hierarchy.box_slices(z), core):
        lo = max(c.start, sl.start) - sl.start
        hi = min(c.stop, sl.stop) - sl.start
        local.append(slice(lo, max(lo, hi)))
    outside[tuple(local)] = False
    if np.any(box[outside] == TYPE1):
        return False
    return all(np.any(grid[sub] == TYPE2) for sub in hierarchy.sub_box_slices(z))


def good_sites(
    cfg: Configuration, hierarchy: ScaleHierarchy, level: Optional[int] = None
) -> Set[Site]:
    """Good sites z (with the parity of `level`, if given) of a patch configuration"""
    grid = _patch_grid(cfg, hierarchy)
    return {z for z in hierarchy.sites(level) if is_good(grid, hierarchy, z)}


def neighbor_goodness(
    cfg: Configuration, hierarchy: ScaleHierarchy, z: Optional[Site] = None
) -> Dict[Site, bool]:
    """Goodness of z +- e_i one block after (z, 0) was good"""
    z = z or (0,) * hierarchy.d
    grid = _patch_grid(cfg, hierarchy)
    r = (hierarchy.K - 1) // 2
    out = {}
    for axis in range(hierarchy.d):
        for step in (-1, 1):
            w = list(z)
            w[axis] += step
            if abs(w[axis]) > r:
                continue
            out[tuple(w)] = is_good(grid, hierarchy, tuple(w))
    return out


def estimate_eps(outcomes: Sequence[Dict[Site, bool]]) -> float:
    """1 - min over neighbor directions of the empirical goodness frequency"""
    if not outcomes:
        raise ValueError("no block outcomes to estimate from")
    keys = sorted(outcomes[0])
    if not keys:
        raise ValueError("the hierarchy has no neighboring boxes (K = 1)")
    freq = [np.mean([bool(o[k]) for o in outcomes]) for k in keys]
    return float(1.0 - min(freq))


def site_of_patch(graph: TwoScaleGraph, p: int, origin: Site) -> Site:
    z = graph.patch_coords[p] - np.asarray(origin, dtype=np.int64)
    if graph.spec.boundary is Boundary.PERIODIC:
        extent = graph.spec.extent
        z = (z + (extent - 1) // 2) % extent - (extent - 1) // 2
    return tuple(int(c) for c in z)


def stable_sites(
    run: Trajectory,
    graph: TwoScaleGraph,
    kind: StableKind,
    block: float,
    levels: int,
    K: Optional[int] = None,
    origin: Optional[Site] = None,
) -> List[Set[Site]]:
    """Type-i stable sites X_n for n = 0..levels.

    type1: the center of patch z holds a 1 at time n*block.
    type2: the center holds a 2 at least block/K time units in (n*block, (n+1)*block).
    """
    kind = StableKind(kind)
    origin = origin or (0,) * graph.spec.d
    if kind is StableKind.TYPE2 and (K is None or K < 1):
        raise ValueError("type 2 stability needs K >= 1")
    last = levels * block if kind is StableKind.TYPE1 else (levels + 1) * block
    if last > run.t_end + 1e-9 * max(1.0, run.t_end):
        raise HorizonError(f"stable sites up to level {levels} need the run to reach t={last}")

    out: List[Set[Site]] = []
    for n in range(levels + 1):
        level: Set[Site] = set()
        for p in range(graph.n_patches):
            z = site_of_patch(graph, p, origin)
            if (sum(z) + n) % 2 != 0:
                continue
            center = int(graph.center_of[p])
            if kind is StableKind.TYPE1:
                stable = run.state_at(center, n * block) == TYPE1
            else:
                held = run.occupation_time(center, n * block, block, TYPE2)
                stable = held >= block / K  # type: ignore[operator]
            if stable:
                level.add(z)
        out.append(level)
    logger.debug(f"{kind.value} stable sites: {[len(s) for s in out]}")
    return out


@dataclass
class InclusionReport:
    included: List[bool]
    first_violation: Optional[int]

    @property
    def holds(self) -> bool:
        return self.first_violation is None


def inclusion_check(wet: WetSets, sites: Sequence[Set[Site]]) -> InclusionReport:
    """Whether W_n is contained in X_n at every level"""
    if len(sites) != wet.levels + 1:
        raise ValueError(f"{len(sites)} site levels given for {wet.levels + 1} wet levels")
    included = [wet.sites(n) <= set(sites[n]) for n in range(wet.levels + 1)]
    first = next((n for n, ok in enumerate(included) if not ok), None)
    return InclusionReport(included=included, first_violation=first)


def induced_field(lattice: PercLattice, sites: Sequence[Set[Site]]) -> PercField:
    """Percolation field open exactly on the process-induced sites"""
    radius = max((max(abs(c) for c in z) for level in sites for z in level), default=0) + 1
    if lattice.half_width is not None:
        radius = max(radius, lattice.half_width + 1)
    return sets_field(lattice, sites, radius)
