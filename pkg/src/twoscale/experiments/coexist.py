"""
coexist: persistence of both types over an (N, delta1) grid
File: src/twoscale/experiments/coexist.py

A replicate counts as coexisting when both types are present at t_max/2 and
at t_max. N = 1 is always run as the control, where the two-scale process is
the plain multitype contact process.
"""
import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from twoscale.experiments.outputs import RunSummary, write_csv
from twoscale.experiments.runconfig import RunConfig
from twoscale.experiments.runner import cached_graph, run_replicates
from twoscale.lattice.graph import LatticeSpec
from twoscale.process.models import TYPE1, TYPE2, InitKind, InitSpec, ModelParams, Variant
from twoscale.process.simulation import run_gillespie
from twoscale.utils.seeding import spawn_seeds

logger = logging.getLogger(__name__)

RUNS_HEADER = [
    "N",
    "delta1",
    "replicate",
    "n1_mid",
    "n2_mid",
    "n1_end",
    "n2_end",
    "density1_end",
    "density2_end",
    "density2_initial",
    "both_present",
]
SUMMARY_HEADER = [
    "N",
    "delta1",
    "replicates",
    "both_fraction",
    "mid_both_fraction",
    "mean_density1",
    "mean_density2",
    "type2_halved_fraction",
]
SWEEP_HEADER = ["beta", "replicates", "survived", "survival_fraction"]


def _replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> Tuple[int, ...]:
    spec, params, init, t_max = payload
    graph = cached_graph(spec)
    run = run_gillespie(init, params, graph, t_max, seed, sample_times=[t_max / 2, t_max])
    mid, end = run.snapshots
    return (
        int(np.count_nonzero(mid == TYPE1)),
        int(np.count_nonzero(mid == TYPE2)),
        int(np.count_nonzero(end == TYPE1)),
        int(np.count_nonzero(end == TYPE2)),
        int(np.count_nonzero(run.initial == TYPE2)),
    )


def _survival_replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> bool:
    spec, params, t_max = payload
    init = InitSpec(kind=InitKind.SINGLE2_AT_CENTER)
    run = run_gillespie(init, params, cached_graph(spec), t_max, seed, stop_type=TYPE2)
    return run.extinction_time is None


def one_type_params(beta: float, delta: float) -> ModelParams:
    """Basic contact process on the mesoscopic lattice, carried by type 2 on N = 1"""
    return ModelParams(
        B1=0.0, B2=beta, beta1=0.0, beta2=0.0, delta1=delta, delta2=delta, variant=Variant.PLAIN
    )


def survival_sweep(config: RunConfig, seed: np.random.SeedSequence) -> List[tuple]:
    """Survival fraction of the one-type process from a single site per beta"""
    spec = LatticeSpec(d=config.graph.d, N=1, extent=config.graph.extent * config.graph.N)
    betas = config.knob_floats("beta_grid")
    rows = []
    for beta, child in zip(betas, spawn_seeds(seed, len(betas))):
        params = one_type_params(beta, config.params.delta2)
        alive = run_replicates(
            _survival_replicate,
            (spec, params, config.t_max),
            config.replicates,
            child,
            config.threads,
        )
        rows.append((beta, len(alive), sum(alive), sum(alive) / len(alive)))
        logger.info(f"coexist sweep beta={beta}: survival {rows[-1][3]:.3f}")
    return rows


def run_coexist(config: RunConfig, out_dir: Path) -> RunSummary:
    """Both-types persistence per (N, delta1), with the N = 1 control"""
    grid_N = config.knob_ints("N_grid")
    if 1 not in grid_N:
        grid_N = [1] + grid_N
    deltas = config.knob_floats("delta1_grid", [config.params.delta1])
    points = [(N, delta1) for N in grid_N for delta1 in deltas]
    seeds = spawn_seeds(config.seed, len(points) + 1)

    summary = RunSummary.for_config(config)
    run_rows: List[tuple] = []
    stat_rows: List[tuple] = []
    for (N, delta1), seed in zip(points, seeds):
        spec = LatticeSpec(
            d=config.graph.d, N=N, extent=config.graph.extent, boundary=config.graph.boundary
        )
        params = config.params.with_rates(delta1=delta1)
        print(f"🔄 N={N} delta1={delta1}: {config.replicates} replicates...")
        results = run_replicates(
            _replicate,
            (spec, params, config.init, config.t_max),
            config.replicates,
            seed,
            config.threads,
        )
        n = spec.n_vertices
        both = []
        mid_both = []
        halved = []
        dens1 = []
        dens2 = []
        for rep, (n1_mid, n2_mid, n1_end, n2_end, n2_init) in enumerate(results):
            present = n1_mid > 0 and n2_mid > 0 and n1_end > 0 and n2_end > 0
            counts = (n1_mid, n2_mid, n1_end, n2_end)
            densities = (n1_end / n, n2_end / n, n2_init / n)
            run_rows.append((N, delta1, rep) + counts + densities + (present,))
            both.append(present)
            mid_both.append(n1_mid > 0 and n2_mid > 0)
            halved.append(n2_end < 0.5 * n2_init)
            dens1.append(n1_end / n)
            dens2.append(n2_end / n)
        stat_rows.append(
            (
                N,
                delta1,
                len(results),
                float(np.mean(both)),
                float(np.mean(mid_both)),
                float(np.mean(dens1)),
                float(np.mean(dens2)),
                float(np.mean(halved)),
            )
        )
        logger.info(f"coexist N={N} delta1={delta1}: both present in {stat_rows[-1][3]:.3f}")

    runs_csv = write_csv(out_dir / "coexist_runs.csv", config, RUNS_HEADER, run_rows)
    summary.add_file(runs_csv, out_dir)
    summary.add_file(write_csv(out_dir / "coexist.csv", config, SUMMARY_HEADER, stat_rows), out_dir)
    summary.metrics = {
        "points": [{"N": r[0], "delta1": r[1], "both_fraction": r[3]} for r in stat_rows],
        "control_type2_halved": [r[7] for r in stat_rows if r[0] == 1],
    }
    if config.has("beta_grid"):
        sweep = survival_sweep(config, seeds[-1])
        summary.add_file(write_csv(out_dir / "survival.csv", config, SWEEP_HEADER, sweep), out_dir)
        summary.metrics["survival_sweep"] = {str(r[0]): r[3] for r in sweep}
    return summary
