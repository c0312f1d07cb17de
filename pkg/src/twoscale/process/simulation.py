"""
Exact simulation of the two-scale process and trajectory bookkeeping
File: src/twoscale/process/simulation.py
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from twoscale.config import HorizonError
from twoscale.lattice.graph import Point, TwoScaleGraph
from twoscale.lattice.hierarchy import ScaleHierarchy
from twoscale.process.kernel import (
    gillespie_kernel,
    pack_model,
    pack_topology,
    patch_counts,
    vertex_rates,
)
from twoscale.process.models import (
    EMPTY,
    TYPE1,
    TYPE2,
    Configuration,
    InitKind,
    InitSpec,
    ModelParams,
)
from twoscale.process.snapshots import read_snapshot
from twoscale.utils.seeding import SeedLike, kernel_seed, make_rng

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """Piecewise-constant path: initial states, sampled snapshots and the
    state changes of the watched vertices"""

    initial: np.ndarray
    final: np.ndarray
    t_start: float
    t_end: float
    sample_times: np.ndarray
    snapshots: np.ndarray
    watched: np.ndarray
    change_times: np.ndarray
    change_vertices: np.ndarray
    change_states: np.ndarray
    n_events: int = 0
    extinction_time: Optional[float] = None
    invasion_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    clearing_times: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def snapshot(self, t: float) -> Configuration:
        """Configuration at one of the requested sample times"""
        hits = np.nonzero(np.isclose(self.sample_times, t, rtol=0.0, atol=1e-12))[0]
        if hits.size == 0:
            raise KeyError(f"time {t} was not sampled")
        return Configuration(self.snapshots[hits[0]].copy(), float(t))

    def history(self, v: int) -> Tuple[np.ndarray, np.ndarray]:
        """Jump times (starting with t_start) and states of watched vertex v"""
        if not self.watched[v]:
            raise ValueError(f"vertex {v} was not watched during the run")
        mask = self.change_vertices == v
        times = np.concatenate([[self.t_start], self.change_times[mask]])
        states = np.concatenate([[self.initial[v]], self.change_states[mask]]).astype(np.int8)
        return times, states

    def state_at(self, v: int, t: float) -> int:
        self._check_window(t, t)
        times, states = self.history(v)
        return int(states[np.searchsorted(times, t, side="right") - 1])

    def occupation_time(self, v: int, start: float, length: float, state: int) -> float:
        """Lebesgue measure of {t in (start, start + length) : state of v is `state`}"""
        end = start + length
        self._check_window(start, end)
        times, states = self.history(v)
        edges = np.concatenate([times, [np.inf]])
        overlap = np.minimum(edges[1:], end) - np.maximum(edges[:-1], start)
        return float(np.sum(np.clip(overlap, 0.0, None)[states == state]))

    def _check_window(self, start: float, end: float) -> None:
        tol = 1e-9 * max(1.0, abs(self.t_end))
        if start < self.t_start - tol or end > self.t_end + tol or end < start:
            raise HorizonError(
                f"window ({start}, {end}) outside the simulated range "
                f"({self.t_start}, {self.t_end})"
            )


def _resolve_point(graph: TwoScaleGraph, point: Point) -> int:
    """Vertex index of an index or a coordinate tuple"""
    if isinstance(point, (int, np.integer)):
        return int(point)
    return graph.index(point)


def initial_configuration(
    spec: InitSpec,
    graph: TwoScaleGraph,
    seed: SeedLike = 0,
    hierarchy: Optional[ScaleHierarchy] = None,
) -> Configuration:
    """Materialize an InitSpec on a graph"""
    n = graph.n_vertices
    kind = spec.kind
    if kind is InitKind.PRODUCT:
        rng = make_rng(seed)
        states = rng.choice(3, size=n, p=[spec.p0, spec.p1, spec.p2]).astype(np.int8)
    elif kind is InitKind.SINGLE2_AT_CENTER:
        z = spec.patch or (0,) * graph.spec.d
        if len(z) != graph.spec.d:
            raise ValueError(f"patch {z} does not match dimension {graph.spec.d}")
        states = np.zeros(n, dtype=np.int8)
        states[graph.index(tuple(c * graph.spec.N + (graph.spec.N - 1) // 2 for c in z))] = TYPE2
    elif kind is InitKind.ALL1_EXCEPT:
        fill = TYPE2 if spec.fill is None else spec.fill
        states = np.full(n, TYPE1, dtype=np.int8)
        for point in spec.vertices:
            states[graph.index(point)] = fill
    elif kind is InitKind.EXPLICIT:
        states, _ = read_snapshot(spec.path)
        if states.shape[0] != n:
            raise ValueError(f"snapshot {spec.path} has {states.shape[0]} sites, graph has {n}")
    elif kind is InitKind.GOOD_BLOCK:
        if hierarchy is None or hierarchy.N != graph.spec.N or graph.spec.extent != 1:
            raise ValueError("good_block initial configuration needs the matching scale hierarchy")
        fill = TYPE1 if spec.fill is None else spec.fill
        grid = np.full(graph.shape, fill, dtype=np.int8)
        z = spec.patch or (0,) * graph.spec.d
        grid[hierarchy.box_slices(z)] = EMPTY
        for box in hierarchy.sub_box_slices(z):
            middle = tuple((sl.start + sl.stop - 1) // 2 for sl in box)
            grid[middle] = TYPE2
        states = grid.reshape(-1)
    else:
        raise ValueError(f"unsupported initial configuration kind {kind}")
    return Configuration(states, 0.0)


def transition_rates(
    x: Point, cfg: Configuration, params: ModelParams, graph: TwoScaleGraph
) -> Tuple[float, float, float]:
    """(rate_to_1, rate_to_2, rate_to_0) of vertex x in configuration cfg"""
    params.check_graph(graph)
    cfg.check_graph(graph)
    v = _resolve_point(graph, x)
    count2 = patch_counts(cfg.states, graph.patch_of, graph.n_patches)
    r1, r2, r0 = vertex_rates(
        v, cfg.states, count2, pack_topology(graph), pack_model(params, graph)
    )
    return float(r1), float(r2), float(r0)


def _watch_mask(graph: TwoScaleGraph, watch: Union[None, bool, Sequence[int]]) -> np.ndarray:
    mask = np.zeros(graph.n_vertices, dtype=np.bool_)
    if watch is True:
        mask[:] = True
    elif watch is not None and watch is not False:
        mask[np.asarray(list(watch), dtype=np.int64)] = True
    return mask


def run_gillespie(
    init: Union[InitSpec, Configuration],
    params: ModelParams,
    graph: TwoScaleGraph,
    t_max: float,
    seed: SeedLike,
    sample_times: Sequence[float] = (),
    watch: Union[None, bool, Sequence[int]] = None,
    stop_type: int = 0,
    watch_patch: int = -1,
    hierarchy: Optional[ScaleHierarchy] = None,
) -> Trajectory:
    """Exact next-event realization of the process up to t_max.

    The same seed gives the same trajectory. With `stop_type` set, the run
    halts when that type goes extinct and the trajectory ends there.
    """
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    params.check_graph(graph)
    rng = make_rng(seed)
    if isinstance(init, Configuration):
        cfg = init.copy()
    else:
        cfg = initial_configuration(init, graph, rng, hierarchy)
    cfg.check_graph(graph)

    times = np.asarray(sorted(float(t) for t in sample_times), dtype=np.float64)
    if times.size and (times[0] < 0 or times[-1] > t_max):
        raise ValueError(f"sample times must lie in [0, {t_max}]")
    if stop_type not in (0, TYPE1, TYPE2):
        raise ValueError(f"stop_type must be 0, 1 or 2, got {stop_type}")

    initial = cfg.states.copy()
    states = cfg.states.copy()
    watched = _watch_mask(graph, watch)
    snaps, d_t, d_v, d_s, f_t, f_up, n_events, stop_time = gillespie_kernel(
        states,
        pack_topology(graph),
        pack_model(params, graph),
        float(t_max),
        times,
        watched,
        int(watch_patch),
        int(stop_type),
        kernel_seed(rng),
    )
    stopped = stop_time >= 0.0
    t_end = float(stop_time) if stopped else float(t_max)
    logger.debug(
        f"gillespie run: {n_events} events, t_end={t_end:.4g}, "
        f"extinction={'yes' if stopped else 'no'}"
    )
    return Trajectory(
        initial=initial,
        final=states,
        t_start=0.0,
        t_end=t_end,
        sample_times=times,
        snapshots=snaps,
        watched=watched,
        change_times=d_t,
        change_vertices=d_v,
        change_states=d_s.astype(np.int8),
        n_events=int(n_events),
        extinction_time=float(stop_time) if stopped else None,
        invasion_times=f_t[f_up > 0],
        clearing_times=f_t[f_up < 0],
    )


def occupation_time(
    source,
    x: Point,
    window: Tuple[float, float],
    state: int,
    init: Optional[Configuration] = None,
    graph: Optional[TwoScaleGraph] = None,
) -> float:
    """Time spent by vertex x in `state` during window = (s, s + len).

    `source` is a Trajectory, or an EventLog together with the initial
    configuration it is replayed from.
    """
    from twoscale.graphical.events import EventLog
    from twoscale.graphical.replay import replay

    start, end = float(window[0]), float(window[1])
    if isinstance(source, EventLog):
        if init is None:
            raise ValueError("occupation time from an event log needs the initial configuration")
        v = _resolve_point(source.graph, x)
        source = replay(init, source, watch=[v])
    elif graph is not None:
        v = _resolve_point(graph, x)
    else:
        v = int(x)  # type: ignore[arg-type]
    return source.occupation_time(v, start, end - start, state)
