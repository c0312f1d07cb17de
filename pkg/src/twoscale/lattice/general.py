"""
General two-scale framework: a microscopic graph H1, a mesoscopic graph H2
and the separation-of-scales predicate
File: src/twoscale/lattice/general.py

Path lengths in condition 1 count vertices, so a patch of side N always holds
a path of length N through its center. Distances in condition 2 count edges
and vertices in different H1 components are infinitely far apart.
"""
import logging
from dataclasses import dataclass, field
from typing import Hashable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from twoscale.lattice.graph import TwoScaleGraph

logger = logging.getLogger(__name__)


@dataclass
class GeneralTwoScaleGraph:
    """Pair of graphs on nested vertex sets with disjoint edge sets"""

    H1: nx.Graph
    H2: nx.Graph
    N: int
    path: List[Hashable] = field(default_factory=list)

    def __post_init__(self) -> None:
        missing = set(self.H2.nodes) - set(self.H1.nodes)
        if missing:
            raise ValueError(f"V2 must be a subset of V1, extra vertices: {sorted(missing)[:5]}")
        shared = [e for e in self.H2.edges if self.H1.has_edge(*e)]
        if shared:
            raise ValueError(f"E1 and E2 must be disjoint, shared edges: {shared[:5]}")


@dataclass
class SeparationReport:
    """Outcome of check_scale_separation"""

    ok: bool
    short_paths: List[Hashable] = field(default_factory=list)
    close_pairs: List[Tuple[Hashable, Hashable, int]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def from_two_scale_graph(graph: TwoScaleGraph) -> GeneralTwoScaleGraph:
    """View a lattice two-scale graph in the general framework.

    The designated path runs through the centers of the patches along the
    first axis.
    """
    H1 = nx.Graph()
    H1.add_nodes_from(range(graph.n_vertices))
    H2 = nx.Graph()
    H2.add_nodes_from(int(c) for c in graph.center_of)
    for x, y, kind in graph.edges():
        (H1 if kind == "S" else H2).add_edge(x, y)

    extent = graph.spec.extent
    path = []
    for k in range(extent):
        z = (k,) + (0,) * (graph.spec.d - 1)
        path.append(int(graph.center_of[_patch_index(z, extent)]))
    return GeneralTwoScaleGraph(H1=H1, H2=H2, N=graph.spec.N, path=path)


def _patch_index(z: Tuple[int, ...], extent: int) -> int:
    index = 0
    for c in z:
        index = index * extent + c
    return index


def _validate_path(g: GeneralTwoScaleGraph, path: Sequence[Hashable]) -> None:
    if not path:
        raise ValueError("designated H2 path is empty")
    if len(set(path)) != len(path):
        raise ValueError("designated H2 path is not self-avoiding")
    for v in path:
        if v not in g.H2:
            raise ValueError(f"path vertex {v!r} is not in V2")
    for a, b in zip(path, path[1:]):
        if not g.H2.has_edge(a, b):
            raise ValueError(f"path step {a!r} -> {b!r} is not an H2 edge")


def _on_long_path(H1: nx.Graph, v: Hashable, N: int, budget: int) -> bool:
    """Whether some self-avoiding H1 path with at least N vertices contains v"""
    if N <= 1:
        return True
    component = nx.node_connected_component(H1, v)
    if len(component) < N:
        return False

    # enumerate simple arms out of v, then look for two disjoint ones
    arms: List[Set[Hashable]] = []
    stack: List[Tuple[Hashable, List[Hashable]]] = [(v, [])]
    explored = 0
    while stack:
        node, arm = stack.pop()
        explored += 1
        if len(arm) + 1 >= N:
            return True
        if arm:
            arms.append(set(arm))
        if explored > budget:
            logger.warning(f"path search budget exhausted at vertex {v!r}; accepting")
            return True
        visited = set(arm)
        visited.add(v)
        for w in H1.neighbors(node):
            if w not in visited:
                stack.append((w, arm + [w]))

    arms.sort(key=len, reverse=True)
    for i, a in enumerate(arms):
        for b in arms[i + 1 :]:
            if len(a) + len(b) + 1 < N:
                break
            if a.isdisjoint(b):
                return True
    return False


def check_scale_separation(
    g: GeneralTwoScaleGraph,
    N: Optional[int] = None,
    path: Optional[Sequence[Hashable]] = None,
    budget: int = 100_000,
) -> SeparationReport:
    """Test both separation-of-scales conditions on a finite graph pair"""
    N = g.N if N is None else N
    path = list(g.path if path is None else path)
    _validate_path(g, path)

    report = SeparationReport(ok=True)
    for v in path:
        if not _on_long_path(g.H1, v, N, budget):
            report.short_paths.append(v)

    V2 = set(g.H2.nodes)
    for v in sorted(V2, key=repr):
        if N <= 1:
            break
        lengths = nx.single_source_shortest_path_length(g.H1, v, cutoff=N - 1)
        for w, dist in lengths.items():
            if w != v and w in V2 and repr(v) < repr(w):
                report.close_pairs.append((v, w, dist))

    report.ok = not report.short_paths and not report.close_pairs
    if not report.ok:
        logger.info(
            f"Scale separation fails for N={N}: {len(report.short_paths)} short-path vertices, "
            f"{len(report.close_pairs)} close pairs"
        )
    return report
