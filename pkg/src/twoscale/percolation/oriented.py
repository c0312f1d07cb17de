"""
Oriented site percolation, wet sets and the restricted coupling
File: src/twoscale/percolation/oriented.py

Sites (z, n) with z in Z^d and z1 + ... + zd + n even. The restricted lattice
G_K keeps sup_i |z_i| <= (K - 1)/2. Fields are dense boolean arrays indexed
[n, z + R] with R large enough that wet sets started inside the array never
reach its border. The i.i.d. field is open where a shared uniform is >= eps,
so fields at different eps built from the same uniforms are monotone.
"""
import itertools
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from twoscale.utils.seeding import SeedLike, make_rng

logger = logging.getLogger(__name__)

Site = Tuple[int, ...]


@dataclass(frozen=True)
class PercLattice:
    """G (K is None) or the restricted lattice G_K"""

    d: int = 1
    K: Optional[int] = None

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got d={self.d}")
        if self.K is not None and (self.K < 1 or self.K % 2 == 0):
            raise ValueError(f"K must be an odd positive integer, got {self.K}")

    @property
    def half_width(self) -> Optional[int]:
        return None if self.K is None else (self.K - 1) // 2

    def contains(self, z: Sequence[int], n: int) -> bool:
        if n < 0 or (sum(z) + n) % 2 != 0:
            return False
        r = self.half_width
        return r is None or all(abs(c) <= r for c in z)

    def restricted(self, K: int) -> "PercLattice":
        return PercLattice(d=self.d, K=K)

    def radius_for(self, levels: int, start_radius: int = 0) -> int:
        """Array radius keeping wet sets of `levels` steps off the border"""
        r = levels + start_radius + 1
        if self.half_width is not None:
            r = min(r, self.half_width + 1)
        return r

    def site_mask(self, levels: int, radius: int) -> np.ndarray:
        """Boolean array marking the lattice sites on [0, levels] x [-R, R]^d"""
        axis = np.arange(-radius, radius + 1)
        grids = np.meshgrid(*([axis] * self.d), indexing="ij")
        total = sum(grids)
        mask = np.empty((levels + 1,) + total.shape, dtype=np.bool_)
        for n in range(levels + 1):
            mask[n] = (total + n) % 2 == 0
        if self.half_width is not None:
            inside = np.ones(total.shape, dtype=np.bool_)
            for g in grids:
                inside &= np.abs(g) <= self.half_width
            mask &= inside
        return mask


@dataclass
class PercField:
    """Open/closed states of the lattice sites on [0, levels]"""

    lattice: PercLattice
    open: np.ndarray
    radius: int
    source: str = "iid"
    eps: Optional[float] = None

    @property
    def levels(self) -> int:
        return int(self.open.shape[0] - 1)

    def is_open(self, z: Sequence[int], n: int) -> bool:
        if not self.lattice.contains(z, n) or n > self.levels:
            return False
        if any(abs(c) > self.radius for c in z):
            raise ValueError(f"site {tuple(z)} outside the stored field radius {self.radius}")
        return bool(self.open[(n,) + tuple(c + self.radius for c in z)])

    def dump(self, path: Path) -> Path:
        """Write the perc.tsv field dump: z-coords, level, open flag"""
        mask = self.lattice.site_mask(self.levels, self.radius)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for idx in zip(*np.nonzero(mask)):
                z = ",".join(str(int(c) - self.radius) for c in idx[1:])
                handle.write(f"{z}\t{int(idx[0])}\t{int(self.open[idx])}\n")
        return Path(path)


def uniforms(d: int, levels: int, radius: int, seed: SeedLike) -> np.ndarray:
    """Shared uniforms behind monotone-coupled fields"""
    rng = make_rng(seed)
    return rng.random((levels + 1,) + (2 * radius + 1,) * d)


def field_from_uniforms(lattice: PercLattice, u: np.ndarray, eps: float) -> PercField:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    levels = u.shape[0] - 1
    radius = (u.shape[1] - 1) // 2
    mask = lattice.site_mask(levels, radius)
    return PercField(lattice=lattice, open=(u >= eps) & mask, radius=radius, source="iid", eps=eps)


def iid_field(
    lattice: PercLattice,
    eps: float,
    levels: int,
    seed: SeedLike,
    radius: Optional[int] = None,
) -> PercField:
    """Independent Bernoulli(1 - eps) site states"""
    if radius is None:
        radius = lattice.radius_for(levels)
    return field_from_uniforms(lattice, uniforms(lattice.d, levels, radius, seed), eps)


def sets_field(lattice: PercLattice, sites: Sequence[Iterable[Site]], radius: int) -> PercField:
    """Field that is open exactly on the given per-level site sets"""
    levels = len(sites) - 1
    mask = lattice.site_mask(levels, radius)
    open_ = np.zeros_like(mask)
    for n, level in enumerate(sites):
        for z in level:
            if any(abs(c) > radius for c in z):
                raise ValueError(f"site {tuple(z)} outside radius {radius}")
            open_[(n,) + tuple(c + radius for c in z)] = True
    return PercField(lattice=lattice, open=open_ & mask, radius=radius, source="induced")


@dataclass
class WetSets:
    """W_n for n = 0..levels and the extinction level, None when alive at the horizon"""

    lattice: PercLattice
    wet: np.ndarray
    radius: int
    extinction_level: Optional[int] = None
    sizes: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def levels(self) -> int:
        return int(self.wet.shape[0] - 1)

    @property
    def survived(self) -> bool:
        return self.extinction_level is None

    def sites(self, n: int) -> Set[Site]:
        idx = np.nonzero(self.wet[n])
        return {tuple(int(c) - self.radius for c in pt) for pt in zip(*idx)}

    def all_sites(self) -> List[Set[Site]]:
        return [self.sites(n) for n in range(self.levels + 1)]


def _spread(level: np.ndarray) -> np.ndarray:
    """Sites one unit step from a marked site along some axis"""
    out = np.zeros_like(level)
    for axis in range(level.ndim):
        head = [slice(None)] * level.ndim
        tail = [slice(None)] * level.ndim
        head[axis] = slice(1, None)
        tail[axis] = slice(None, -1)
        out[tuple(head)] |= level[tuple(tail)]
        out[tuple(tail)] |= level[tuple(head)]
    return out


def wet_sets(perc_field: PercField, W0: Iterable[Site], levels: Optional[int] = None) -> WetSets:
    """One-step recursion W_{n+1} = (neighbors of W_n) intersected with open sites"""
    lattice = perc_field.lattice
    levels = perc_field.levels if levels is None else int(levels)
    if levels > perc_field.levels:
        raise ValueError(f"field has {perc_field.levels} levels, {levels} requested")
    start = np.zeros(perc_field.open.shape[1:], dtype=np.bool_)
    for z in W0:
        z = tuple(int(c) for c in z)
        if len(z) != lattice.d:
            raise ValueError(f"site {z} does not match dimension {lattice.d}")
        if sum(z) % 2 != 0:
            raise ValueError(f"site {z} violates the level-0 parity constraint")
        if not lattice.contains(z, 0) or any(abs(c) >= perc_field.radius for c in z):
            raise ValueError(f"site {z} is not a level-0 site of the stored field")
        start[tuple(c + perc_field.radius for c in z)] = True

    wet = np.zeros((levels + 1,) + start.shape, dtype=np.bool_)
    wet[0] = start & perc_field.open[0]
    extinction = None
    for n in range(levels):
        if not wet[n].any():
            extinction = n
            break
        wet[n + 1] = _spread(wet[n]) & perc_field.open[n + 1]
    if extinction is None and not wet[levels].any():
        extinction = levels
    sizes = wet.reshape(levels + 1, -1).sum(axis=1).astype(np.int64)
    return WetSets(
        lattice=lattice, wet=wet, radius=perc_field.radius, extinction_level=extinction, sizes=sizes
    )


@dataclass
class CouplingReport:
    """Unrestricted vs restricted wet sets from {0} on shared site states"""

    levels: int
    first_difference: Optional[int]
    touches_frontier: bool
    dominated: bool

    @property
    def differs(self) -> bool:
        return self.first_difference is not None

    @property
    def implication_holds(self) -> bool:
        """Any difference forces the restricted set onto the outermost sites of G_K"""
        return not self.differs or self.touches_frontier


def restricted_coupling_check(
    eps: float, K: int, levels: int, seed: SeedLike, d: int = 1
) -> CouplingReport:
    full = PercLattice(d=d)
    restricted = full.restricted(K)
    radius = full.radius_for(levels)
    u = uniforms(d, levels, radius, seed)
    w = wet_sets(field_from_uniforms(full, u, eps), [(0,) * d])
    wk = wet_sets(field_from_uniforms(restricted, u, eps), [(0,) * d])

    differ = np.nonzero((w.wet != wk.wet).reshape(levels + 1, -1).any(axis=1))[0]
    r = restricted.half_width
    axis = np.abs(np.arange(-radius, radius + 1))
    sup = np.zeros(w.wet.shape[1:], dtype=np.int64)
    for k in range(d):
        shape = [1] * d
        shape[k] = -1
        sup = np.maximum(sup, axis.reshape(shape))
    frontier = sup == r
    touches = bool((wk.wet & frontier).any())
    dominated = bool(not (wk.wet & ~w.wet).any())
    return CouplingReport(
        levels=levels,
        first_difference=int(differ[0]) if differ.size else None,
        touches_frontier=touches,
        dominated=dominated,
    )


@dataclass
class SurvivalCurve:
    eps: float
    levels: int
    n_fields: int
    alive: np.ndarray
    extinction_levels: List[Optional[int]]

    @property
    def survival(self) -> np.ndarray:
        """Fraction of fields with W_n nonempty, per level n"""
        return self.alive / max(self.n_fields, 1)


def survival_curve(
    lattice: PercLattice, eps: float, levels: int, n_fields: int, seed: SeedLike
) -> SurvivalCurve:
    """Survival of W_n from {0} over independent i.i.d. fields"""
    rng = make_rng(seed)
    alive = np.zeros(levels + 1, dtype=np.int64)
    extinctions: List[Optional[int]] = []
    origin = (0,) * lattice.d
    for _ in range(n_fields):
        wet = wet_sets(iid_field(lattice, eps, levels, rng), [origin])
        alive += wet.sizes > 0
        extinctions.append(wet.extinction_level)
    return SurvivalCurve(
        eps=eps, levels=levels, n_fields=n_fields, alive=alive, extinction_levels=extinctions
    )


@dataclass
class TailEstimate:
    """P(m < extinction level <= horizon) per m and its log-linear slope"""

    m: np.ndarray
    probability: np.ndarray
    decided: int
    slope: Optional[float]


def extinction_tail(curve: SurvivalCurve, m_values: Sequence[int]) -> TailEstimate:
    """Tail of the extinction level from decided realizations only"""
    decided = np.asarray([e for e in curve.extinction_levels if e is not None], dtype=np.int64)
    m = np.asarray(sorted(int(v) for v in m_values), dtype=np.int64)
    total = max(curve.n_fields, 1)
    prob = np.asarray([(decided > v).sum() / total for v in m], dtype=np.float64)
    slope = None
    positive = prob > 0
    if positive.sum() >= 2:
        slope = float(np.polyfit(m[positive], np.log(prob[positive]), 1)[0])
    return TailEstimate(m=m, probability=prob, decided=int(decided.size), slope=slope)


def level_sites(lattice: PercLattice, n: int, radius: int) -> List[Site]:
    """All lattice sites of level n within sup-radius `radius`"""
    out = []
    for z in itertools.product(range(-radius, radius + 1), repeat=lattice.d):
        if lattice.contains(z, n):
            out.append(tuple(z))
    return out
