"""
Dual tree with the label function, ancestor hierarchy and first-ancestor path
File: src/twoscale/dual/tree.py

The tree is grown by a backward scan of the event log from (x, T). Dual time
s = T - t. A death mark at a member vertex ends its branch; an arrow whose
target is a member and whose source is not yet a member starts a child branch
at the source. The child of a branch with label l is labeled l + (m,), m being
its rank among that branch's children in order of discovery.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from twoscale.config import HorizonError
from twoscale.dual.labels import ROOT, Label
from twoscale.graphical.events import ARROW, DEATH, EventLog, SpaceTimePoint

logger = logging.getLogger(__name__)


@dataclass
class Branch:
    """Membership interval [birth_s, death_s) of one vertex in the dual process"""

    id: int
    vertex: int
    birth_s: float
    death_s: float
    parent: int
    label: Label
    via: int = -1
    n_children: int = 0

    def alive_at(self, s: float) -> bool:
        return self.birth_s <= s < self.death_s


@dataclass
class DualTree:
    root: SpaceTimePoint
    depth: float
    log: EventLog
    branches: List[Branch] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.branches)

    @property
    def t_bottom(self) -> float:
        """Real time reached by the bottom of the tree"""
        return self.root.t - self.depth

    def real_time(self, s: float) -> float:
        return self.root.t - s

    def alive(self, s: float) -> List[Branch]:
        if s < 0 or s > self.depth:
            raise HorizonError(f"dual time {s} outside the tree depth [0, {self.depth}]")
        return [b for b in self.branches if b.alive_at(s)]

    def extinction_s(self) -> Optional[float]:
        """Dual time at which every branch is dead, None if the tree reaches its depth"""
        if any(math.isinf(b.death_s) for b in self.branches):
            return None
        return max(b.death_s for b in self.branches)

    def by_label(self) -> Dict[Label, Branch]:
        return {b.label: b for b in self.branches}

    def lineage(self, branch_id: int) -> List[int]:
        """Branch ids from branch_id up to the root"""
        out = [branch_id]
        while self.branches[out[-1]].parent >= 0:
            out.append(self.branches[out[-1]].parent)
        return out

    def generation(self, branch_id: int) -> int:
        """Number of arrows between the root and a branch"""
        return len(self.lineage(branch_id)) - 1

    def dump(self, path: Path) -> Path:
        """Write the dualtree.tsv debug dump"""
        coords = self.log.graph.coords
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            for b in self.branches:
                vertex = ",".join(str(int(c)) for c in coords[b.vertex])
                death = "inf" if math.isinf(b.death_s) else f"{b.death_s:.10g}"
                handle.write(f"{vertex}\t{b.birth_s:.10g}\t{death}\t{b.parent}\t{b.label}\n")
        return Path(path)


def build_dual_tree(p: SpaceTimePoint, log: EventLog, depth: Optional[float] = None) -> DualTree:
    """Dual tree from p down to dual time `depth` (default: the bottom of the log)"""
    if not log.params.equal_deaths:
        raise ValueError(
            f"dual trees need equal death rates, got delta1={log.params.delta1} "
            f"delta2={log.params.delta2}"
        )
    log.check_point(p)
    if depth is None:
        depth = p.t - log.t_lo
    if depth < 0 or p.t - depth < log.t_lo - 1e-12:
        raise HorizonError(f"tree depth {depth} from t={p.t} leaves the window at {log.t_lo}")

    tree = DualTree(root=p, depth=float(depth), log=log)
    tree.branches.append(
        Branch(id=0, vertex=p.x, birth_s=0.0, death_s=math.inf, parent=-1, label=ROOT)
    )
    live: Dict[int, int] = {p.x: 0}
    lo, hi = log.window_slice(p.t - depth, p.t)
    for i in range(hi - 1, lo - 1, -1):
        if not live:
            break
        k = log.kind[i]
        s = p.t - float(log.times[i])
        if k == DEATH:
            bid = live.pop(int(log.src[i]), None)
            if bid is not None:
                tree.branches[bid].death_s = s
        elif k == ARROW:
            target = live.get(int(log.dst[i]))
            source = int(log.src[i])
            if target is None or source in live:
                continue
            parent = tree.branches[target]
            parent.n_children += 1
            child = Branch(
                id=len(tree.branches),
                vertex=source,
                birth_s=s,
                death_s=math.inf,
                parent=parent.id,
                label=parent.label.child(parent.n_children),
                via=int(log.label[i]),
            )
            tree.branches.append(child)
            live[source] = child.id
    logger.debug(f"dual tree from ({p.x}, {p.t}): {len(tree)} branches, depth {depth}")
    return tree


def ancestor_hierarchy(tree: DualTree, s: float) -> List[int]:
    """Vertices alive at dual time s, from the largest label down"""
    return [b.vertex for b in hierarchy_branches(tree, s)]


def hierarchy_branches(tree: DualTree, s: float) -> List[Branch]:
    return sorted(tree.alive(s), key=lambda b: b.label, reverse=True)


@dataclass
class FirstAncestorPath:
    """Piecewise-constant first ancestor: segment k holds branches[k] on
    [starts[k], starts[k + 1]), the last one up to `end`"""

    starts: np.ndarray
    branches: List[int]
    vertices: np.ndarray
    end: float
    extinct: bool

    def segment_at(self, s: float) -> Optional[int]:
        if s < 0 or s > self.end or (s == self.end and self.extinct):
            return None
        return int(np.searchsorted(self.starts, s, side="right") - 1)

    def vertex_at(self, s: float) -> Optional[int]:
        k = self.segment_at(s)
        return None if k is None else int(self.vertices[k])

    def jumps(self) -> List[Tuple[float, int, int]]:
        """(dual time, branch id, vertex) of every jump of the path"""
        return [
            (float(self.starts[k]), self.branches[k], int(self.vertices[k]))
            for k in range(1, len(self.branches))
        ]


def first_ancestor_path(tree: DualTree) -> FirstAncestorPath:
    """Follow the largest live label backward in time.

    New branches always carry labels below their parent, so the first
    ancestor only changes when it dies.
    """
    deaths = sorted((b.death_s, b.id) for b in tree.branches if not math.isinf(b.death_s))
    starts = [0.0]
    current = 0
    path = [current]
    extinct = False
    end = tree.depth
    for s, bid in deaths:
        if bid != current:
            continue
        alive = [b for b in tree.branches if b.birth_s <= s < b.death_s]
        if not alive:
            extinct = True
            end = s
            break
        current = max(alive, key=lambda b: b.label).id
        starts.append(s)
        path.append(current)
    return FirstAncestorPath(
        starts=np.asarray(starts, dtype=np.float64),
        branches=path,
        vertices=np.asarray([tree.branches[b].vertex for b in path], dtype=np.int64),
        end=end,
        extinct=extinct,
    )


def common_ancestor(tree: DualTree, a: int, b: int) -> Branch:
    """Most recent common ancestor branch of branches a and b, by common label prefix"""
    prefix = tree.branches[a].label.common_prefix(tree.branches[b].label)
    return tree.by_label()[prefix]


def common_ancestor_by_search(tree: DualTree, a: int, b: int) -> Branch:
    """Most recent common ancestor found by walking parent links"""
    seen = set(tree.lineage(a))
    for bid in tree.lineage(b):
        if bid in seen:
            return tree.branches[bid]
    return tree.branches[0]
