"""
Harris graphical representation: Poisson arrows, death marks and dots
File: src/twoscale/graphical/events.py

Marks live in parallel numpy arrays sorted by (time, source vertex, kind).
Unequal birth or death rates are split into marks usable by both types at the
smaller rate and marks labeled for the advantaged type at the difference.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np

from twoscale.lattice.graph import TwoScaleGraph
from twoscale.process.models import Labeling, ModelParams, Variant
from twoscale.utils.seeding import SeedLike, make_rng

logger = logging.getLogger(__name__)

ARROW, DEATH, DOT = 0, 1, 2
BOTH, ONLY1, ONLY2 = 0, 1, 2

KIND_CODES = {ARROW: "A", DEATH: "D", DOT: "O"}
LABEL_CODES = {BOTH: "B", ONLY1: "1", ONLY2: "2"}


@dataclass(frozen=True)
class SpaceTimePoint:
    """Vertex x at real time t"""

    x: int
    t: float


@dataclass
class EventLog:
    """Time-sorted marks over the window (t_lo, t_hi] with a per-vertex index
    of the marks that can change each vertex"""

    graph: TwoScaleGraph
    params: ModelParams
    t_lo: float
    t_hi: float
    times: np.ndarray
    kind: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    label: np.ndarray

    def __post_init__(self) -> None:
        order = np.lexsort((self.kind, self.src, self.times))
        for name in ("times", "kind", "src", "dst", "label"):
            setattr(self, name, np.ascontiguousarray(getattr(self, name)[order]))
        target = np.where(self.kind == ARROW, self.dst, self.src)
        self.target = target
        by_target = np.argsort(target, kind="stable")
        counts = np.bincount(target, minlength=self.graph.n_vertices)
        self.into_ptr = np.zeros(self.graph.n_vertices + 1, dtype=np.int64)
        np.cumsum(counts, out=self.into_ptr[1:])
        self.into_idx = by_target.astype(np.int64)

    def __len__(self) -> int:
        return int(self.times.shape[0])

    @property
    def modified(self) -> bool:
        return self.params.variant is Variant.MODIFIED

    def marks_into(self, v: int) -> np.ndarray:
        """Indices of marks that can change v, in time order"""
        return self.into_idx[self.into_ptr[v] : self.into_ptr[v + 1]]

    def count_into_before(self, v: int, t: float, inclusive: bool = False) -> int:
        """Number of marks into v with time < t (or <= t when inclusive)"""
        times = self.times[self.marks_into(v)]
        return int(np.searchsorted(times, t, side="right" if inclusive else "left"))

    def window_slice(self, lo: float, hi: float) -> Tuple[int, int]:
        """Index range of marks with lo <= time <= hi"""
        return (
            int(np.searchsorted(self.times, lo, side="left")),
            int(np.searchsorted(self.times, hi, side="right")),
        )

    def check_point(self, p: SpaceTimePoint) -> None:
        if not 0 <= p.x < self.graph.n_vertices:
            raise ValueError(f"vertex {p.x} is not in the graph")
        if p.t < self.t_lo or p.t > self.t_hi:
            raise ValueError(f"time {p.t} outside the event window ({self.t_lo}, {self.t_hi})")

    def relabeled(self, mapping: dict) -> "EventLog":
        """Copy with arrow labels mapped, e.g. {BOTH: ONLY2, ONLY2: BOTH}"""
        label = self.label.copy()
        arrows = self.kind == ARROW
        for old, new in mapping.items():
            label[arrows & (self.label == old)] = new
        return EventLog(
            graph=self.graph,
            params=self.params,
            t_lo=self.t_lo,
            t_hi=self.t_hi,
            times=self.times.copy(),
            kind=self.kind.copy(),
            src=self.src.copy(),
            dst=self.dst.copy(),
            label=label,
        )

    def dump(self, path: Path) -> Path:
        """Write the events.tsv debug dump"""
        coords = self.graph.coords
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for i in range(len(self)):
                src = ",".join(str(int(c)) for c in coords[self.src[i]])
                dst = "-" if self.dst[i] < 0 else ",".join(str(int(c)) for c in coords[self.dst[i]])
                handle.write(
                    f"{self.times[i]:.10g}\t{KIND_CODES[int(self.kind[i])]}\t{src}\t{dst}\t"
                    f"{LABEL_CODES[int(self.label[i])]}\n"
                )
        return Path(path)


def _split(rate1: float, rate2: float, labeling: Labeling, what: str) -> List[Tuple[float, int]]:
    """(rate, label) channels realizing per-type rates rate1 and rate2"""
    if labeling is Labeling.EXACT and rate2 < rate1:
        raise ValueError(
            f"exact labeling needs the type-2 {what} rate >= the type-1 rate, got {rate2} < {rate1}"
        )
    shared = min(rate1, rate2)
    channels = [(shared, BOTH)]
    if rate2 > rate1:
        channels.append((rate2 - rate1, ONLY2))
    elif rate1 > rate2:
        channels.append((rate1 - rate2, ONLY1))
    return channels


def generate_events(
    graph: TwoScaleGraph, params: ModelParams, window: Tuple[float, float], seed: SeedLike
) -> EventLog:
    """Sample the graphical representation on a window"""
    params.check_graph(graph)
    t_lo, t_hi = float(window[0]), float(window[1])
    if t_hi < t_lo:
        raise ValueError(f"empty window ({t_lo}, {t_hi})")
    rng = make_rng(seed)
    length = t_hi - t_lo
    n = graph.n_vertices

    short_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(graph.short_ptr))
    long_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(graph.long_ptr))
    vertices = np.arange(n, dtype=np.int64)
    no_dst = np.full(n, -1, dtype=np.int64)

    channels = []
    for rate, lab in _split(params.beta1, params.beta2, params.labeling, "short birth"):
        channels.append((short_src, graph.short_idx, ARROW, lab, rate))
    if params.variant is Variant.MODIFIED:
        channels.append((long_src, graph.long_idx, ARROW, ONLY2, params.B2))
    else:
        for rate, lab in _split(params.B1, params.B2, params.labeling, "long birth"):
            channels.append((long_src, graph.long_idx, ARROW, lab, rate))
    for rate, lab in _split(params.delta1, params.delta2, Labeling.GENERALIZED, "death"):
        channels.append((vertices, no_dst, DEATH, lab, rate))

    spont = params.spontaneous_rate(graph.spec.d)
    if params.variant is Variant.FINITE_VOLUME:
        center = graph.center_of[:1]
        channels.append((center, np.full(1, -1, dtype=np.int64), DOT, BOTH, spont))
    elif params.variant is Variant.MODIFIED:
        centers = graph.center_of
        channels.append((centers, np.full(centers.shape[0], -1, dtype=np.int64), DOT, BOTH, spont))

    times, kinds, srcs, dsts, labels = [], [], [], [], []
    for src, dst, kind, lab, rate in channels:
        if rate <= 0 or src.shape[0] == 0:
            continue
        counts = rng.poisson(rate * length, size=src.shape[0])
        total = int(counts.sum())
        times.append(rng.uniform(t_lo, t_hi, size=total))
        srcs.append(np.repeat(src, counts))
        dsts.append(np.repeat(dst, counts))
        kinds.append(np.full(total, kind, dtype=np.int8))
        labels.append(np.full(total, lab, dtype=np.int8))

    def _cat(parts: list, dtype) -> np.ndarray:
        return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype=dtype)

    log = EventLog(
        graph=graph,
        params=params,
        t_lo=t_lo,
        t_hi=t_hi,
        times=_cat(times, np.float64),
        kind=_cat(kinds, np.int8),
        src=_cat(srcs, np.int64),
        dst=_cat(dsts, np.int64),
        label=_cat(labels, np.int8),
    )
    logger.debug(f"generated {len(log)} marks on ({t_lo}, {t_hi}]")
    return log
