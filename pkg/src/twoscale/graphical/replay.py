"""
Forward replay of an event log and backward dual-set queries
File: src/twoscale/graphical/replay.py
"""
import logging
from typing import Optional, Sequence, Set, Union

import numpy as np
from numba import njit

from twoscale.config import HorizonError
from twoscale.graphical.events import ARROW, BOTH, DEATH, EventLog, SpaceTimePoint
from twoscale.process.kernel import grow, patch_counts
from twoscale.process.models import Configuration
from twoscale.process.simulation import Trajectory

logger = logging.getLogger(__name__)


@njit
def _replay_kernel(marks, states, modified, patch_of, n_patches, sample_times, watched):
    times, kind, src, dst, label = marks
    count2 = patch_counts(states, patch_of, n_patches)
    n_samples = sample_times.shape[0]
    snaps = np.empty((n_samples, states.shape[0]), dtype=np.int8)
    d_t = np.empty(256, dtype=np.float64)
    d_v = np.empty(256, dtype=np.int64)
    d_s = np.empty(256, dtype=np.int64)
    n_d = 0
    k = 0
    applied = 0
    for i in range(times.shape[0]):
        t = times[i]
        while k < n_samples and sample_times[k] < t:
            snaps[k, :] = states
            k += 1
        lab = label[i]
        if kind[i] == ARROW:
            x = src[i]
            y = dst[i]
            sx = states[x]
            if sx == 0 or states[y] != 0:
                continue
            if lab != BOTH and lab != sx:
                continue
            if modified and sx == 2 and patch_of[x] != patch_of[y] and count2[patch_of[y]] > 0:
                continue
            v = y
            new = sx
        elif kind[i] == DEATH:
            v = src[i]
            sv = states[v]
            if sv == 0 or (lab != BOTH and lab != sv):
                continue
            new = 0
        else:
            v = src[i]
            if states[v] != 0:
                continue
            new = 1

        old = states[v]
        if old == 2:
            count2[patch_of[v]] -= 1
        if new == 2:
            count2[patch_of[v]] += 1
        states[v] = new
        applied += 1
        if watched[v]:
            if n_d == d_t.shape[0]:
                d_t = grow(d_t)
                d_v = grow(d_v)
                d_s = grow(d_s)
            d_t[n_d] = t
            d_v[n_d] = v
            d_s[n_d] = new
            n_d += 1

    while k < n_samples:
        snaps[k, :] = states
        k += 1
    return snaps, d_t[:n_d], d_v[:n_d], d_s[:n_d], applied


def replay(
    init: Configuration,
    log: EventLog,
    watch: Union[None, bool, Sequence[int]] = None,
    sample_times: Sequence[float] = (),
) -> Trajectory:
    """Apply the marks of `log` in time order starting from `init` at log.t_lo.

    An arrow x -> y copies the type of x onto an empty y when its label admits
    that type; a death mark empties x when its label admits the type at x; a
    dot turns an empty site into a 1. In the modified variant, a type-2 arrow
    between patches only lands while the target patch holds no 2.
    """
    graph = log.graph
    init.check_graph(graph)
    times = np.asarray(sorted(float(t) for t in sample_times), dtype=np.float64)
    if times.size and (times[0] < log.t_lo or times[-1] > log.t_hi):
        raise HorizonError(f"sample times must lie in [{log.t_lo}, {log.t_hi}]")

    watched = np.zeros(graph.n_vertices, dtype=np.bool_)
    if watch is True:
        watched[:] = True
    elif watch is not None and watch is not False:
        watched[np.asarray(list(watch), dtype=np.int64)] = True

    states = init.states.copy()
    snaps, d_t, d_v, d_s, applied = _replay_kernel(
        (log.times, log.kind, log.src, log.dst, log.label),
        states,
        log.modified,
        graph.patch_of,
        graph.n_patches,
        times,
        watched,
    )
    return Trajectory(
        initial=init.states.copy(),
        final=states,
        t_start=log.t_lo,
        t_end=log.t_hi,
        sample_times=times,
        snapshots=snaps,
        watched=watched,
        change_times=d_t,
        change_vertices=d_v,
        change_states=d_s.astype(np.int8),
        n_events=int(applied),
    )


def state_at(init: Configuration, log: EventLog, t: float) -> np.ndarray:
    """Configuration at real time t obtained by replay"""
    return replay(init, log, sample_times=[t]).snapshots[0]


def dual_set(p: SpaceTimePoint, s: float, log: EventLog) -> Set[int]:
    """Vertices y with a dual path from (x, t) to (y, t - s).

    Labels and dots are ignored; a death mark removes its vertex and an arrow
    into the set adds its source.
    """
    log.check_point(p)
    if s < 0 or p.t - s < log.t_lo - 1e-12:
        raise HorizonError(f"dual time {s} from t={p.t} leaves the window starting at {log.t_lo}")
    members = {p.x}
    lo, hi = log.window_slice(p.t - s, p.t)
    kind, src, dst = log.kind, log.src, log.dst
    for i in range(hi - 1, lo - 1, -1):
        k = kind[i]
        if k == DEATH:
            members.discard(int(src[i]))
            if not members:
                break
        elif k == ARROW and int(dst[i]) in members:
            members.add(int(src[i]))
    return members


def dual_survives(p: SpaceTimePoint, depth: float, log: EventLog) -> bool:
    """Whether the dual process from p is nonempty for every dual time up to depth"""
    if p.t - depth < log.t_lo - 1e-12:
        raise HorizonError(f"survival depth {depth} from t={p.t} leaves the window")
    return bool(dual_set(p, depth, log))


def dual_extinction_time(p: SpaceTimePoint, log: EventLog) -> Optional[float]:
    """Dual time at which the dual process from p dies, None if it reaches t_lo"""
    log.check_point(p)
    members = {p.x}
    lo, hi = log.window_slice(log.t_lo, p.t)
    for i in range(hi - 1, lo - 1, -1):
        k = log.kind[i]
        if k == DEATH:
            members.discard(int(log.src[i]))
            if not members:
                return float(p.t - log.times[i])
        elif k == ARROW and int(log.dst[i]) in members:
            members.add(int(log.src[i]))
    return None
