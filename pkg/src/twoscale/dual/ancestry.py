"""
Type of a space-time point from its ancestors
File: src/twoscale/dual/ancestry.py

The type at (x, T) is read off the ancestor hierarchy without a forward run.
The walk tries candidates in priority order. The vertex's own past comes
first, and it wins when no death mark hit x. Otherwise the marks that landed
on x after its last death are tried in real-time order (the deepest branch
first): a dot gives a 1; an arrow gives the type of its source just before
the arrow, when that type is nonzero and the arrow label admits it. A rejected
candidate drops its whole subtree, and the next ancestor is tried. When every
candidate fails the site is empty.

This is not a walk over a built DualTree. Each candidate arrow opens the
subtree of the branch born through it, and its source state is a sub-query
answered by the same rules. The recursion visits the ancestors in the same
order as the tree rules and returns the same type; tests check it against
forward replay. The state of a source just before an arrow depends only on
the marks into that source up to then, so sub-queries are memoized on
(vertex, number of marks into it) and resolved with an explicit stack.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np

from twoscale.graphical.events import ARROW, BOTH, DEATH, DOT, EventLog, SpaceTimePoint
from twoscale.process.models import TYPE1, Configuration

logger = logging.getLogger(__name__)

Query = Tuple[int, int]


class _Frame:
    """Pending query: candidate marks of one vertex and a cursor into them"""

    __slots__ = ("candidates", "cursor", "own")

    def __init__(self, candidates: np.ndarray, own: int):
        self.candidates = candidates
        self.cursor = 0
        self.own = own


def _open_frame(log: EventLog, init: np.ndarray, v: int, k: int) -> _Frame:
    marks = log.marks_into(v)[:k]
    deaths = np.nonzero(log.kind[marks] == DEATH)[0]
    if deaths.size == 0:
        return _Frame(marks, int(init[v]))
    return _Frame(marks[deaths[-1] + 1 :], 0)


def _query(log: EventLog, v: int, before: int) -> Query:
    """Memo key for the state of v just before the mark with global index `before`"""
    return v, int(np.searchsorted(log.marks_into(v), before))


def determine_type(p: SpaceTimePoint, log: EventLog, init: Configuration) -> int:
    """Type at (x, t) of the process started from `init` at log.t_lo"""
    params = log.params
    if not params.equal_deaths:
        raise ValueError(
            f"type determination needs equal death rates, got delta1={params.delta1} "
            f"delta2={params.delta2}"
        )
    if log.modified:
        raise ValueError("type determination does not cover the modified process")
    log.check_point(p)
    init.check_graph(log.graph)
    states = init.states

    _, hi = log.window_slice(log.t_lo, p.t)
    top = _query(log, p.x, hi)
    memo: Dict[Query, int] = {}
    frames: Dict[Query, _Frame] = {}
    stack: List[Query] = [top]
    while stack:
        key = stack[-1]
        if key in memo:
            stack.pop()
            continue
        frame = frames.get(key)
        if frame is None:
            frame = _open_frame(log, states, *key)
            frames[key] = frame
            if frame.own != 0:
                memo[key] = frame.own
                del frames[key]
                continue

        result = None
        pending = None
        while frame.cursor < frame.candidates.shape[0]:
            i = int(frame.candidates[frame.cursor])
            kind = log.kind[i]
            if kind == DOT:
                result = TYPE1
                break
            if kind == ARROW:
                sub = _query(log, int(log.src[i]), i)
                if sub not in memo:
                    pending = sub
                    break
                value = memo[sub]
                lab = log.label[i]
                if value != 0 and (lab == BOTH or lab == value):
                    result = value
                    break
            frame.cursor += 1
        if pending is not None:
            stack.append(pending)
            continue
        memo[key] = 0 if result is None else int(result)
        del frames[key]

    logger.debug(f"type at ({p.x}, {p.t}) resolved with {len(memo)} sub-queries")
    return memo[top]


def determine_types(
    points: List[SpaceTimePoint], log: EventLog, init: Configuration
) -> np.ndarray:
    return np.asarray([determine_type(p, log, init) for p in points], dtype=np.int8)
