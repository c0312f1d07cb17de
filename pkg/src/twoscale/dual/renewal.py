"""
Renewal points of the first-ancestor path and the patch-center subsequence
File: src/twoscale/dual/renewal.py

A jump target (X, tau) of the first-ancestor path is a renewal point when the
dual process started from (X, T - tau) is alive long enough: for a horizon of
S dual time units (horizon mode) or down to real time 0 (finite_volume mode).
Infinite survival cannot be observed in a finite window, so horizon mode is a
truncated test and the sequence is flagged once S no longer fits.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from twoscale.config import HorizonError
from twoscale.dual.labels import Label
from twoscale.dual.tree import DualTree, first_ancestor_path
from twoscale.graphical.events import ONLY2, EventLog, SpaceTimePoint
from twoscale.graphical.replay import dual_survives

logger = logging.getLogger(__name__)


class Liveness(str, Enum):
    HORIZON = "horizon"
    FINITE_VOLUME = "finite_volume"


@dataclass(frozen=True)
class RenewalPoint:
    vertex: int
    tau: float
    position: Tuple[int, ...]
    branch: int = 0
    label: Label = Label()
    two_arrow: bool = False


@dataclass
class RenewalSequence:
    """(X_n, tau_n), n >= 0, starting with the root (x, 0)"""

    points: List[RenewalPoint] = field(default_factory=list)
    liveness: Liveness = Liveness.HORIZON
    horizon: Optional[float] = None
    truncated: bool = False
    root_lives: bool = True

    def __len__(self) -> int:
        return len(self.points)

    @property
    def taus(self) -> np.ndarray:
        return np.asarray([pt.tau for pt in self.points], dtype=np.float64)

    @property
    def positions(self) -> np.ndarray:
        return np.asarray([pt.position for pt in self.points], dtype=np.int64)

    def gaps(self) -> np.ndarray:
        """tau_{n+1} - tau_n"""
        return np.diff(self.taus)


def lives(
    point: SpaceTimePoint, log: EventLog, liveness: Liveness, horizon: Optional[float] = None
) -> Optional[bool]:
    """Liveness test in force; None when the horizon does not fit in the window"""
    if liveness is Liveness.FINITE_VOLUME:
        return dual_survives(point, point.t - log.t_lo, log)
    if horizon is None or horizon <= 0:
        raise ValueError(f"horizon liveness needs a positive horizon, got {horizon}")
    if point.t - horizon < log.t_lo - 1e-12:
        return None
    return dual_survives(point, horizon, log)


def _check_liveness(log: EventLog, liveness: Liveness) -> None:
    if liveness is Liveness.FINITE_VOLUME and log.t_lo != 0.0:
        raise HorizonError(
            f"finite_volume liveness needs the event window to start at time 0, got {log.t_lo}"
        )


def renewal_points(
    tree: DualTree,
    liveness: Liveness = Liveness.HORIZON,
    horizon: Optional[float] = None,
) -> RenewalSequence:
    """Jump targets of the first-ancestor path that pass the liveness test"""
    liveness = Liveness(liveness)
    log = tree.log
    _check_liveness(log, liveness)
    graph = log.graph
    root = tree.root
    seq = RenewalSequence(liveness=liveness, horizon=horizon)
    seq.points.append(RenewalPoint(vertex=root.x, tau=0.0, position=graph.coords_of(root.x)))
    verdict = lives(root, log, liveness, horizon)
    seq.root_lives = bool(verdict)
    if verdict is None:
        seq.truncated = True
        return seq

    for s, bid, vertex in first_ancestor_path(tree).jumps():
        verdict = lives(SpaceTimePoint(vertex, root.t - s), log, liveness, horizon)
        if verdict is None:
            seq.truncated = True
            break
        if verdict:
            branch = tree.branches[bid]
            seq.points.append(
                RenewalPoint(
                    vertex=vertex,
                    tau=s,
                    position=graph.coords_of(vertex),
                    branch=bid,
                    label=branch.label,
                    two_arrow=branch.via == ONLY2,
                )
            )
    logger.debug(
        f"{len(seq) - 1} renewal points from ({root.x}, {root.t}) "
        f"({liveness.value}, truncated={seq.truncated})"
    )
    return seq


def center_subsequence(
    seq: RenewalSequence, N: int, origin: Sequence[int] = ()
) -> List[RenewalPoint]:
    """Renewal points n >= 1 whose position lies in origin + N Z^d.

    On a window graph the patch centers sit at origin (N - 1)/2.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    out = []
    for pt in seq.points[1:]:
        shift = tuple(origin) or (0,) * len(pt.position)
        if all((c - o) % N == 0 for c, o in zip(pt.position, shift)):
            out.append(pt)
    return out


def liveness_disagreement(tree: DualTree, horizon: float) -> Tuple[int, int]:
    """(candidates, disagreements) between horizon S and 2S classifications
    of the first-ancestor jump targets decidable under 2S"""
    log = tree.log
    root = tree.root
    candidates = [(0.0, root.x)] + [(s, v) for s, _, v in first_ancestor_path(tree).jumps()]
    n = 0
    differ = 0
    for s, vertex in candidates:
        point = SpaceTimePoint(vertex, root.t - s)
        long_verdict = lives(point, log, Liveness.HORIZON, 2 * horizon)
        if long_verdict is None:
            break
        n += 1
        differ += int(bool(lives(point, log, Liveness.HORIZON, horizon)) != long_verdict)
    return n, differ
