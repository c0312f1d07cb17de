"""
Replicate fan-out
File: src/twoscale/experiments/runner.py

Replicate i always receives the i-th child of the run seed, and results come
back in replicate order, so aggregates do not depend on the worker count.
"""
import concurrent.futures
import logging
from functools import lru_cache
from typing import Any, Callable, List, Sequence, TypeVar

import numpy as np

from twoscale.lattice.graph import Boundary, LatticeSpec, TwoScaleGraph, build_two_scale_graph
from twoscale.utils.seeding import spawn_seeds

logger = logging.getLogger(__name__)

T = TypeVar("T")


@lru_cache(maxsize=16)
def cached_graph(spec: LatticeSpec) -> TwoScaleGraph:
    """Graphs are reused across replicates within one process"""
    return build_two_scale_graph(spec)


def _call(job: tuple) -> Any:
    fn, index, seed, payload = job
    return fn(index, seed, payload)


def run_replicates(
    fn: Callable[[int, np.random.SeedSequence, Any], T],
    payload: Any,
    n: int,
    seed: Any,
    threads: int = 1,
) -> List[T]:
    """Run fn(index, child_seed, payload) for n replicates.

    fn and payload must be picklable when threads > 1.
    """
    seeds = spawn_seeds(seed, n)
    jobs = [(fn, i, s, payload) for i, s in enumerate(seeds)]
    if threads <= 1 or n <= 1:
        return [_call(job) for job in jobs]
    logger.debug(f"dispatching {n} replicates to {threads} workers")
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as exe:
        return list(exe.map(_call, jobs))


def grid_seeds(seed: Any, points: Sequence[Any]) -> List[np.random.SeedSequence]:
    """One child seed per grid point, in grid order"""
    return spawn_seeds(seed, len(points))


def single_patch_spec(d: int, N: int) -> LatticeSpec:
    """One-patch window with killing boundary, the finite-volume setting"""
    return LatticeSpec(d=d, N=N, extent=1, boundary=Boundary.KILLING)


def patch_index(graph: TwoScaleGraph, z: Sequence[int]) -> int:
    """Row-major index of patch z, wrapped on periodic windows"""
    extent = graph.spec.extent
    return int(np.ravel_multi_index(tuple(int(c) % extent for c in z), (extent,) * graph.spec.d))
