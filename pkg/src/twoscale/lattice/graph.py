"""
Two-scale graphs: N-cube patches cut by hyperplanes, long edges between centers
File: src/twoscale/lattice/graph.py

Vertices of a finite window are the integer points {0, ..., extent*N - 1}^d,
stored by row-major index. Patch z covers the coordinates zN .. zN + N - 1 on
each axis and its center is zN + (N - 1)/2. A short edge (x, x + e_i) stays
inside a patch exactly when (x_i + 1) % N != 0, which is the discrete form of
"does not cross a hyperplane x_i = N/2 + jN" once coordinates are centered.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

Coords = Tuple[int, ...]
Point = Union[int, Sequence[int]]


class Boundary(str, Enum):
    """Window boundary handling"""

    PERIODIC = "periodic"
    KILLING = "killing"


@dataclass(frozen=True)
class LatticeSpec:
    """Dimension, patch size, patches per axis and boundary of a window"""

    d: int
    N: int
    extent: int
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got d={self.d}")
        if self.N < 1 or self.N % 2 == 0:
            raise ValueError(f"patch size N must be an odd positive integer, got N={self.N}")
        if self.extent < 1:
            raise ValueError(f"extent must be >= 1, got extent={self.extent}")
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    @property
    def side(self) -> int:
        return self.N * self.extent

    @property
    def n_vertices(self) -> int:
        return self.side**self.d

    @property
    def n_patches(self) -> int:
        return self.extent**self.d

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LatticeSpec":
        """Create a LatticeSpec from a dictionary"""
        return cls(
            d=int(data.get("d", 2)),
            N=int(data.get("N", 3)),
            extent=int(data.get("extent", 1)),
            boundary=Boundary(data.get("boundary", Boundary.PERIODIC.value)),
        )


def _as_coords(point: Point, d: int) -> Coords:
    if isinstance(point, (int, np.integer)):
        if d != 1:
            raise ValueError(f"scalar point given for a d={d} lattice")
        return (int(point),)
    coords = tuple(int(c) for c in point)
    if len(coords) != d:
        raise ValueError(f"expected {d} coordinates, got {coords}")
    return coords


def _unwrap(coords: Coords, scalar: bool) -> Point:
    return coords[0] if scalar else coords


def patch_of(x: Point, spec: LatticeSpec) -> Point:
    """Patch coordinate z of vertex x"""
    coords = _as_coords(x, spec.d)
    if spec.boundary is Boundary.PERIODIC:
        coords = tuple(c % spec.side for c in coords)
    elif any(c < 0 or c >= spec.side for c in coords):
        raise ValueError(f"vertex {coords} outside the killing window of side {spec.side}")
    return _unwrap(tuple(c // spec.N for c in coords), isinstance(x, (int, np.integer)))


def center_of(z: Point, spec: LatticeSpec) -> Point:
    """Center vertex of patch z"""
    coords = _as_coords(z, spec.d)
    if spec.boundary is Boundary.PERIODIC:
        coords = tuple(c % spec.extent for c in coords)
    elif any(c < 0 or c >= spec.extent for c in coords):
        raise ValueError(f"patch {coords} outside the killing window of extent {spec.extent}")
    half = (spec.N - 1) // 2
    return _unwrap(tuple(c * spec.N + half for c in coords), isinstance(z, (int, np.integer)))


def crosses_hyperplane(x: Coords, y: Coords, N: int) -> bool:
    """Whether the segment between two lattice neighbors meets a patch boundary"""
    for a, b in zip(x, y):
        if a != b:
            lo = min(a, b)
            return (lo + 1) % N == 0
    return False


def _csr(src: np.ndarray, dst: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    order = np.argsort(src, kind="stable")
    counts = np.bincount(src, minlength=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, dst[order].astype(np.int64)


class TwoScaleGraph:
    """Index-based two-scale graph with CSR adjacency for both edge classes.

    Long adjacency keeps multiplicity: on a periodic window with two patches
    per axis a center reaches the same neighbor through both directions.
    """

    def __init__(self, spec: LatticeSpec):
        self.spec = spec
        d, N, side = spec.d, spec.N, spec.side
        shape = (side,) * d
        n = spec.n_vertices

        self.shape = shape
        self.coords = np.indices(shape).reshape(d, -1).T.astype(np.int64)
        patch_coords = self.coords // N
        self.patch_of = np.ravel_multi_index(tuple(patch_coords.T), (spec.extent,) * d).astype(
            np.int64
        )
        self.patch_coords = np.indices((spec.extent,) * d).reshape(d, -1).T.astype(np.int64)
        center_coords = self.patch_coords * N + (N - 1) // 2
        self.center_of = np.ravel_multi_index(tuple(center_coords.T), shape).astype(np.int64)
        self.is_center = np.zeros(n, dtype=np.bool_)
        self.is_center[self.center_of] = True

        index = np.arange(n, dtype=np.int64).reshape(shape)
        src_blocks: List[np.ndarray] = []
        dst_blocks: List[np.ndarray] = []
        for axis in range(d):
            inside = (self.coords[:, axis] + 1) % N != 0
            up = np.roll(index, -1, axis=axis).reshape(-1)
            a = np.nonzero(inside)[0]
            src_blocks += [a, up[a]]
            dst_blocks += [up[a], a]
        short_src = np.concatenate(src_blocks) if src_blocks else np.zeros(0, np.int64)
        short_dst = np.concatenate(dst_blocks) if dst_blocks else np.zeros(0, np.int64)
        self.short_ptr, self.short_idx = _csr(short_src, short_dst, n)

        long_src: List[int] = []
        long_dst: List[int] = []
        for p, z in enumerate(self.patch_coords):
            for axis in range(d):
                for step in (-1, 1):
                    w = z.copy()
                    w[axis] += step
                    if spec.boundary is Boundary.PERIODIC:
                        w[axis] %= spec.extent
                    elif w[axis] < 0 or w[axis] >= spec.extent:
                        continue
                    q = int(np.ravel_multi_index(tuple(w), (spec.extent,) * d))
                    if q == p:
                        continue
                    long_src.append(int(self.center_of[p]))
                    long_dst.append(int(self.center_of[q]))
        self.long_ptr, self.long_idx = _csr(
            np.asarray(long_src, dtype=np.int64), np.asarray(long_dst, dtype=np.int64), n
        )

        # patch members, one row per patch
        self.patch_members = np.argsort(self.patch_of, kind="stable").reshape(spec.n_patches, -1)
        logger.debug(
            f"Built two-scale graph d={d} N={N} extent={spec.extent} "
            f"({n} vertices, {self.n_short_edges} short, {self.n_long_edges} long edges)"
        )

    @property
    def n_vertices(self) -> int:
        return self.spec.n_vertices

    @property
    def n_patches(self) -> int:
        return self.spec.n_patches

    @property
    def n_short_edges(self) -> int:
        return int(self.short_idx.shape[0] // 2)

    @property
    def n_long_edges(self) -> int:
        return int(self.long_idx.shape[0] // 2)

    @property
    def centers(self) -> np.ndarray:
        return self.center_of

    def index(self, point: Point) -> int:
        """Vertex index of a coordinate tuple (periodic windows wrap)"""
        coords = _as_coords(point, self.spec.d)
        if self.spec.boundary is Boundary.PERIODIC:
            coords = tuple(c % self.spec.side for c in coords)
        elif any(c < 0 or c >= self.spec.side for c in coords):
            raise ValueError(f"vertex {coords} outside the window")
        return int(np.ravel_multi_index(coords, self.shape))

    def coords_of(self, v: int) -> Coords:
        return tuple(int(c) for c in self.coords[v])

    def short_neighbors(self, v: int) -> np.ndarray:
        return self.short_idx[self.short_ptr[v] : self.short_ptr[v + 1]]

    def long_neighbors(self, v: int) -> np.ndarray:
        return self.long_idx[self.long_ptr[v] : self.long_ptr[v + 1]]

    def patch_center(self, v: int) -> int:
        return int(self.center_of[self.patch_of[v]])

    def directed_edges(self) -> Tuple[np.ndarray, np.ndarray]:
        """All directed edge slots (short then long) as (source, target) arrays"""
        n = self.n_vertices
        short_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.short_ptr))
        long_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.long_ptr))
        return (
            np.concatenate([short_src, long_src]),
            np.concatenate([self.short_idx, self.long_idx]),
        )

    def edges(self) -> Iterator[Tuple[int, int, str]]:
        """Undirected edges (with multiplicity) as (x, y, 'S'|'L'), x < y"""
        classes = (("S", self.short_ptr, self.short_idx), ("L", self.long_ptr, self.long_idx))
        for kind, ptr, idx in classes:
            for v in range(self.n_vertices):
                for w in idx[ptr[v] : ptr[v + 1]]:
                    if v < w:
                        yield v, int(w), kind

    def minimal_image(self, delta: np.ndarray) -> np.ndarray:
        """Wrap coordinate differences into (-side/2, side/2] on periodic windows"""
        delta = np.asarray(delta, dtype=np.int64)
        if self.spec.boundary is Boundary.KILLING:
            return delta
        side = self.spec.side
        return (delta + (side - 1) // 2) % side - (side - 1) // 2

    def grid(self, states: np.ndarray) -> np.ndarray:
        """Reshape a state vector onto the window shape"""
        return np.asarray(states).reshape(self.shape)


def build_two_scale_graph(spec: LatticeSpec) -> TwoScaleGraph:
    """Construct the two-scale graph described by spec"""
    return TwoScaleGraph(spec)
