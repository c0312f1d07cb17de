"""
Selected dual path steered toward a target by repositioning
File: src/twoscale/dual/repositioning.py

The selected path follows the first ancestor. At a renewal point reached
through a 2-arrow it may jump to the second ancestor B of the hierarchy, if B
lives. While the path is farther than m from the guide line through the start
and the target, it jumps when B is closer to the line. Otherwise it jumps when
B is closer to the target. After a jump the dual tree is rebuilt from B.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from twoscale.config import Config
from twoscale.dual.renewal import Liveness, lives, renewal_points
from twoscale.dual.tree import build_dual_tree, first_ancestor_path, hierarchy_branches
from twoscale.graphical.events import EventLog, SpaceTimePoint
from twoscale.lattice.graph import Point, TwoScaleGraph
from twoscale.lattice.hierarchy import ScaleHierarchy

logger = logging.getLogger(__name__)


class PathMode(str, Enum):
    DIRECT = "direct"
    CORNER_THEN_CENTER = "corner_then_center"


@dataclass(frozen=True)
class Reposition:
    s: float
    from_vertex: int
    to_vertex: int
    rule: str


@dataclass
class GuideLine:
    """Line through `origin` and `target` in window coordinates"""

    origin: np.ndarray
    target: np.ndarray

    def _delta(self, graph: TwoScaleGraph, q: np.ndarray, ref: np.ndarray) -> np.ndarray:
        return graph.minimal_image(np.asarray(q) - ref).astype(np.float64)

    def distance_to_line(self, graph: TwoScaleGraph, q: np.ndarray) -> float:
        direction = self._delta(graph, self.target, self.origin)
        rel = self._delta(graph, q, self.origin)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            return float(np.linalg.norm(rel))
        unit = direction / norm
        return float(np.linalg.norm(rel - np.dot(rel, unit) * unit))

    def distance_to_target(self, graph: TwoScaleGraph, q: np.ndarray) -> float:
        return float(np.linalg.norm(self._delta(graph, q, self.target)))


@dataclass
class SelectedPathState:
    """Trace of the selected path from (x, T)"""

    start: SpaceTimePoint
    m: float
    mode: PathMode
    starts: List[float] = field(default_factory=list)
    vertices: List[int] = field(default_factory=list)
    repositions: List[Reposition] = field(default_factory=list)
    targets: List[Tuple[float, Tuple[int, ...]]] = field(default_factory=list)
    end: float = 0.0
    extinct: bool = False

    @property
    def target(self) -> Tuple[int, ...]:
        return self.targets[-1][1]

    @property
    def final_vertex(self) -> int:
        return self.vertices[-1]

    def vertex_at(self, s: float) -> Optional[int]:
        if s < 0 or s > self.end or (s == self.end and self.extinct):
            return None
        k = int(np.searchsorted(np.asarray(self.starts), s, side="right") - 1)
        return self.vertices[k]

    def _extend(self, s: float, vertex: int) -> None:
        if self.vertices and self.vertices[-1] == vertex:
            return
        self.starts.append(s)
        self.vertices.append(vertex)


def _resolve(graph: TwoScaleGraph, point: Point) -> int:
    if isinstance(point, (int, np.integer)):
        return int(point)
    return graph.index(point)


def selected_path(
    x: Point,
    y: Optional[Sequence[int]],
    m: float,
    log: EventLog,
    mode: PathMode = PathMode.DIRECT,
    t: Optional[float] = None,
    liveness: Liveness = Liveness.HORIZON,
    horizon: Optional[float] = None,
    hierarchy: Optional[ScaleHierarchy] = None,
) -> SelectedPathState:
    """Run the repositioning rules from (x, t) toward y.

    In corner_then_center mode y is replaced by the nearest corner of the
    upper core B^*; once the path is within sqrt(L)/4 of it the target
    becomes the center of the neighboring box, and the path stops at real
    time sqrt(L).
    """
    mode = PathMode(mode)
    liveness = Liveness(liveness)
    if not log.params.equal_deaths:
        raise ValueError("the selected path needs equal death rates")
    if liveness is Liveness.HORIZON and horizon is None:
        horizon = float(Config.DEFAULT_DUAL_HORIZON)
    graph = log.graph
    t = log.t_hi if t is None else float(t)
    v0 = _resolve(graph, x)
    origin = np.asarray(graph.coords_of(v0), dtype=np.int64)

    stop_real = log.t_lo
    final_target = None
    switch_radius = 0.0
    if mode is PathMode.CORNER_THEN_CENTER:
        if hierarchy is None or hierarchy.N != graph.spec.N:
            raise ValueError("corner_then_center mode needs the matching scale hierarchy")
        corner = hierarchy.nearest_upper_core_corner(hierarchy.to_centered(tuple(origin)))
        y = hierarchy.to_window(corner)
        final_target = hierarchy.to_window((hierarchy.L,) + (0,) * (graph.spec.d - 1))
        switch_radius = math.sqrt(hierarchy.L) / 4
        stop_real = log.t_lo + math.sqrt(hierarchy.L)
    if y is None:
        raise ValueError("a target point is needed in direct mode")
    if len(y) != graph.spec.d:
        raise ValueError(f"target {tuple(y)} does not match dimension {graph.spec.d}")

    line = GuideLine(origin=origin, target=np.asarray(y, dtype=np.int64))
    state = SelectedPathState(start=SpaceTimePoint(v0, t), m=float(m), mode=mode)
    state.targets.append((0.0, tuple(int(c) for c in y)))
    state._extend(0.0, v0)

    point = SpaceTimePoint(v0, t)
    s0 = 0.0
    while True:
        depth = max(point.t - stop_real, 0.0)
        tree = build_dual_tree(point, log, depth)
        path = first_ancestor_path(tree)
        seq = renewal_points(tree, liveness, horizon)
        jump = None
        for pt in seq.points[1:]:
            a_pos = np.asarray(pt.position)
            if final_target is not None and line.distance_to_target(graph, a_pos) < switch_radius:
                line = GuideLine(origin=a_pos, target=np.asarray(final_target, dtype=np.int64))
                state.targets.append((s0 + pt.tau, tuple(final_target)))
                final_target = None
            if not pt.two_arrow:
                continue
            ranked = hierarchy_branches(tree, pt.tau)
            if len(ranked) < 2:
                continue
            second = ranked[1]
            if not lives(SpaceTimePoint(second.vertex, point.t - pt.tau), log, liveness, horizon):
                continue
            b_pos = graph.coords[second.vertex]
            if line.distance_to_line(graph, a_pos) > m:
                rule = "line"
                better = line.distance_to_line(graph, b_pos) < line.distance_to_line(graph, a_pos)
            else:
                rule = "target"
                better = line.distance_to_target(graph, b_pos) < line.distance_to_target(
                    graph, a_pos
                )
            if better:
                jump = (pt, second, rule)
                break

        if jump is None:
            for s, vertex in zip(path.starts, path.vertices):
                state._extend(s0 + float(s), int(vertex))
            state.end = s0 + path.end
            state.extinct = path.extinct
            break

        pt, second, rule = jump
        for s, vertex in zip(path.starts, path.vertices):
            if s < pt.tau:
                state._extend(s0 + float(s), int(vertex))
        s0 += pt.tau
        state.repositions.append(Reposition(s0, pt.vertex, second.vertex, rule))
        state._extend(s0, second.vertex)
        point = SpaceTimePoint(second.vertex, point.t - pt.tau)

    logger.debug(
        f"selected path from ({v0}, {t}): {len(state.repositions)} repositions, "
        f"end vertex {state.final_vertex} at dual time {state.end:.4g}"
    )
    return state
