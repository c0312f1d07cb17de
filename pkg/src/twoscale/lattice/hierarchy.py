"""
Mesoscopic scales of the block construction
File: src/twoscale/lattice/hierarchy.py

Points are given in centered coordinates u = x - (N - 1)/2 of the single-patch
window, so the patch is A0 = {-(N-1)/2, ..., (N-1)/2}^d. Boxes are
B_z = Lz + B_0 with B_0 = (-L/2, L/2)^d, the core B_* = (-L/6, L/6)^d, the
upper core B^* = (-L/3, L/3)^d, all intersected with the integer lattice.
"""
import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

Site = Tuple[int, ...]
Slices = Tuple[slice, ...]


def _open_interval_bound(length: float) -> int:
    """Largest integer u with |u| < length"""
    return int(math.ceil(length)) - 1


def block_length(K: int, c: float, cap: float) -> float:
    """Time block I_K = exp(cK), capped for desk-scale runs"""
    return float(min(math.exp(c * K), cap))


@dataclass(frozen=True)
class ScaleHierarchy:
    """Scales K, L with N = (K + 2)L and T = L^2"""

    K: int
    L: int
    d: int = 1
    sub_box_side: Optional[int] = None

    def __post_init__(self) -> None:
        for name, value in (("K", self.K), ("L", self.L)):
            if value < 1 or value % 2 == 0:
                raise ValueError(f"{name} must be an odd positive integer, got {value}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got d={self.d}")
        side = self.sub_box_side
        if side is None:
            side = max(1, int(round(self.L**0.1)))
        if side < 1 or side > self.L:
            raise ValueError(f"sub-box side must lie in [1, L], got {side}")
        object.__setattr__(self, "sub_box_side", side)

    @property
    def N(self) -> int:
        return (self.K + 2) * self.L

    @property
    def T(self) -> int:
        return self.L * self.L

    @property
    def offset(self) -> int:
        """Window index of the centered origin"""
        return (self.N - 1) // 2

    @property
    def core_radius(self) -> int:
        return _open_interval_bound(self.L / 6)

    @property
    def upper_core_radius(self) -> int:
        return _open_interval_bound(self.L / 3)

    @property
    def box_radius(self) -> int:
        return (self.L - 1) // 2

    @property
    def frontier(self) -> int:
        """sup-norm of the frontier boxes excluded from goodness"""
        return (self.K + 1) // 2

    def sites(self, level: Optional[int] = None) -> List[Site]:
        """Interior mesoscopic sites z with sup|z_i| <= (K - 1)/2, parity-filtered when a
        level is given"""
        r = (self.K - 1) // 2
        out = []
        for z in itertools.product(range(-r, r + 1), repeat=self.d):
            if level is None or (sum(z) + level) % 2 == 0:
                out.append(tuple(z))
        return out

    def _axis_range(self, center: int, radius: int) -> range:
        return range(center - radius, center + radius + 1)

    def box_points(self, z: Site) -> List[Site]:
        """B_z in centered coordinates"""
        axes = [self._axis_range(self.L * zi, self.box_radius) for zi in z]
        return [tuple(p) for p in itertools.product(*axes)]

    def core_points(self) -> List[Site]:
        """B_* in centered coordinates"""
        axes = [self._axis_range(0, self.core_radius)] * self.d
        return [tuple(p) for p in itertools.product(*axes)]

    def upper_core_corners(self) -> List[Site]:
        """Corners of the integer points of B^*"""
        r = self.upper_core_radius
        return [tuple(p) for p in itertools.product((-r, r), repeat=self.d)]

    def nearest_upper_core_corner(self, u: Site) -> Site:
        corners = self.upper_core_corners()
        dists = [sum((a - b) ** 2 for a, b in zip(u, c)) for c in corners]
        return corners[int(np.argmin(dists))]

    def box_slices(self, z: Site) -> Slices:
        """Window-index slices of B_z"""
        r = self.box_radius
        centers = [self.offset + self.L * zi for zi in z]
        return tuple(slice(c - r, c + r + 1) for c in centers)

    def core_slices(self) -> Slices:
        r = self.core_radius
        return tuple(slice(self.offset - r, self.offset + r + 1) for _ in range(self.d))

    def core_mask(self) -> np.ndarray:
        """Boolean window mask of B_*"""
        mask = np.zeros((self.N,) * self.d, dtype=np.bool_)
        mask[self.core_slices()] = True
        return mask

    def _axis_blocks(self, lo: int) -> List[Tuple[int, int]]:
        s = self.sub_box_side
        starts = list(range(0, self.L, s))
        blocks = [(lo + a, lo + min(a + s, self.L)) for a in starts]
        if len(blocks) > 1 and blocks[-1][1] - blocks[-1][0] < s:
            tail = blocks.pop()
            blocks[-1] = (blocks[-1][0], tail[1])
        return blocks

    def sub_box_slices(self, z: Site) -> List[Slices]:
        """D-boxes tiling B_z, dropping those that meet B_*"""
        box = self.box_slices(z)
        per_axis = [self._axis_blocks(sl.start) for sl in box]
        core = self.core_slices()
        out = []
        for blocks in itertools.product(*per_axis):
            meets_core = all(a < c.stop and c.start < b for (a, b), c in zip(blocks, core))
            if meets_core:
                continue
            out.append(tuple(slice(a, b) for a, b in blocks))
        return out

    def to_window(self, u: Site) -> Site:
        return tuple(c + self.offset for c in u)

    def to_centered(self, x: Site) -> Site:
        return tuple(c - self.offset for c in x)


def make_hierarchy(
    K: int, L: int, d: int = 1, sub_box_side: Optional[int] = None
) -> ScaleHierarchy:
    """Validated ScaleHierarchy for odd K and L"""
    return ScaleHierarchy(K=K, L=L, d=d, sub_box_side=sub_box_side)
