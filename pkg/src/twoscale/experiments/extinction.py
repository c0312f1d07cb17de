"""
extinction: type-2 extinction times in a single finite-volume patch
File: src/twoscale/experiments/extinction.py
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from twoscale.config import Config
from twoscale.experiments.outputs import RunSummary, write_csv
from twoscale.experiments.runconfig import RunConfig
from twoscale.experiments.runner import cached_graph, run_replicates, single_patch_spec
from twoscale.process.models import TYPE2, InitKind, InitSpec
from twoscale.process.simulation import run_gillespie
from twoscale.utils.seeding import spawn_seeds

logger = logging.getLogger(__name__)

TIMES_HEADER = ["N", "K", "replicate", "tau", "censored"]
SUMMARY_HEADER = [
    "N",
    "K",
    "replicates",
    "censored",
    "q10",
    "q25",
    "median",
    "q75",
    "q90",
    "mean",
    "quick_fraction",
    "middle_fraction",
    "long_fraction",
    "long_median",
    "branching_extinction",
]


@dataclass
class ExtinctionStats:
    """Quantiles and the quick/long split of one patch size"""

    N: int
    K: Optional[int]
    taus: np.ndarray
    censored: np.ndarray
    quick_cutoff: float
    long_cutoff: float

    @property
    def quantiles(self) -> np.ndarray:
        return np.quantile(self.taus, [0.1, 0.25, 0.5, 0.75, 0.9])

    @property
    def quick_fraction(self) -> float:
        return float(np.mean(self.taus < self.quick_cutoff))

    @property
    def long_fraction(self) -> float:
        return float(np.mean(self.taus >= self.long_cutoff))

    @property
    def middle_fraction(self) -> float:
        return 1.0 - self.quick_fraction - self.long_fraction

    @property
    def long_median(self) -> Optional[float]:
        upper = self.taus[self.taus >= self.long_cutoff]
        return float(np.median(upper)) if upper.size else None


def branching_extinction(beta2: float, delta2: float, d: int) -> float:
    """Extinction probability of the branching process dominating one 2's lineage"""
    birth = 2.0 * d * beta2
    return 1.0 if birth <= delta2 else delta2 / birth


def _replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> Optional[float]:
    spec, params, init, t_max = payload
    run = run_gillespie(init, params, cached_graph(spec), t_max, seed, stop_type=TYPE2)
    return run.extinction_time


def patch_sizes(config: RunConfig) -> List[tuple]:
    """(N, K) pairs from exp.N_grid or from exp.K_grid at fixed exp.L"""
    if config.has("N_grid"):
        return [(N, None) for N in config.knob_ints("N_grid")]
    L = config.knob_int("L")
    return [((K + 2) * L, K) for K in config.knob_ints("K_grid")]


def run_extinction(config: RunConfig, out_dir: Path) -> RunSummary:
    """Replicate extinction times per patch size from a single 2 at the center"""
    params = config.params
    d = config.graph.d
    if "init.kind" in config.flat:
        init = config.init
    else:
        init = InitSpec(kind=InitKind.SINGLE2_AT_CENTER)
    quick = config.knob_float("quick_cutoff", Config.DEFAULT_QUICK_CUTOFF)
    long_ = config.knob_float("long_cutoff", Config.DEFAULT_LONG_CUTOFF)
    sizes = patch_sizes(config)
    seeds = spawn_seeds(config.seed, len(sizes))
    bound = branching_extinction(params.beta2, params.delta2, d)

    summary = RunSummary.for_config(config)
    time_rows: List[tuple] = []
    stat_rows: List[tuple] = []
    medians = []
    for (N, K), seed in zip(sizes, seeds):
        spec = single_patch_spec(d, N)
        print(f"🔄 N={N}: {config.replicates} replicates...")
        taus = run_replicates(
            _replicate, (spec, params, init, config.t_max), config.replicates, seed, config.threads
        )
        censored = np.asarray([t is None for t in taus])
        values = np.asarray([config.t_max if t is None else t for t in taus], dtype=np.float64)
        for rep, (tau, cens) in enumerate(zip(values, censored)):
            time_rows.append((N, K, rep, tau, bool(cens)))
        stats = ExtinctionStats(N, K, values, censored, quick, long_)
        stat_rows.append(
            (N, K, values.size, int(censored.sum()))
            + tuple(stats.quantiles)
            + (
                float(values.mean()),
                stats.quick_fraction,
                stats.middle_fraction,
                stats.long_fraction,
                stats.long_median,
                bound,
            )
        )
        medians.append(stats.long_median)
        logger.info(
            f"extinction N={N}: median {stats.quantiles[2]:.4g}, "
            f"quick {stats.quick_fraction:.3f}, long {stats.long_fraction:.3f}"
        )

    summary.add_file(
        write_csv(out_dir / "extinction_times.csv", config, TIMES_HEADER, time_rows), out_dir
    )
    summary.add_file(
        write_csv(out_dir / "extinction_summary.csv", config, SUMMARY_HEADER, stat_rows), out_dir
    )
    known = [m for m in medians if m is not None]
    summary.metrics = {
        "patch_sizes": [N for N, _ in sizes],
        "long_medians": medians,
        "long_median_increasing": bool(all(a < b for a, b in zip(known, known[1:]))),
        "max_middle_fraction": max(row[11] for row in stat_rows),
        "branching_extinction": bound,
    }
    return summary
