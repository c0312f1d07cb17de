"""
perc: oriented site percolation survival, extinction tails and restricted coupling
File: src/twoscale/experiments/perc.py

Every eps of the grid reuses the same field seeds, so the fields of one
realization are nested and the survival frequency is monotone in 1 - eps
realization by realization.
"""
import logging
from pathlib import Path
from typing import List

import numpy as np

from twoscale.config import Config
from twoscale.experiments.outputs import RunSummary, write_csv
from twoscale.experiments.runconfig import RunConfig
from twoscale.experiments.runner import run_replicates
from twoscale.percolation.oriented import (
    PercLattice,
    extinction_tail,
    iid_field,
    restricted_coupling_check,
    survival_curve,
)
from twoscale.utils.seeding import make_rng, spawn_seeds

logger = logging.getLogger(__name__)

SURVIVAL_HEADER = ["eps", "level", "survival"]
SUMMARY_HEADER = ["eps", "fields", "final_survival", "decided", "tail_slope"]
TAIL_HEADER = ["eps", "m", "probability"]
COUPLING_HEADER = [
    "eps",
    "replicate",
    "first_difference",
    "touches_frontier",
    "dominated",
    "implication_holds",
]


def _coupling_replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> tuple:
    eps, K, levels, d = payload
    report = restricted_coupling_check(eps, K, levels, seed, d=d)
    return (
        report.first_difference,
        report.touches_frontier,
        report.dominated,
        report.implication_holds,
    )


def run_perc(config: RunConfig, out_dir: Path) -> RunSummary:
    """Survival curves, extinction tails and G_K coupling checks over an eps grid"""
    d = config.graph.d
    lattice = PercLattice(d=d)
    if config.has("eps_grid"):
        eps_grid = config.knob_floats("eps_grid")
    else:
        eps_grid = [config.knob_float("eps")]
    levels = config.knob_int("levels", Config.DEFAULT_PERC_LEVELS)
    m_grid = config.knob_ints("m_grid", list(Config.DEFAULT_TAIL_M))
    field_seed, coupling_seed = spawn_seeds(config.seed, 2)
    coupling_seeds = spawn_seeds(coupling_seed, len(eps_grid))

    summary = RunSummary.for_config(config)
    survival_rows: List[tuple] = []
    summary_rows: List[tuple] = []
    tail_rows: List[tuple] = []
    coupling_rows: List[tuple] = []
    final = []
    for k, eps in enumerate(eps_grid):
        print(f"🔄 eps={eps}: {config.replicates} fields x {levels} levels...")
        curve = survival_curve(lattice, eps, levels, config.replicates, field_seed)
        tail = extinction_tail(curve, m_grid)
        for n, value in enumerate(curve.survival):
            survival_rows.append((eps, n, value))
        for m, prob in zip(tail.m, tail.probability):
            tail_rows.append((eps, m, prob))
        summary_rows.append((eps, curve.n_fields, curve.survival[-1], tail.decided, tail.slope))
        final.append(float(curve.survival[-1]))
        logger.info(f"perc eps={eps}: survival {final[-1]:.3f}, tail slope {tail.slope}")

        if config.has("K"):
            reports = run_replicates(
                _coupling_replicate,
                (eps, config.knob_int("K"), levels, d),
                config.replicates,
                coupling_seeds[k],
                config.threads,
            )
            for rep, report in enumerate(reports):
                coupling_rows.append((eps, rep) + tuple(report))

    for name, header, rows in (
        ("perc_survival.csv", SURVIVAL_HEADER, survival_rows),
        ("perc_summary.csv", SUMMARY_HEADER, summary_rows),
        ("perc_tail.csv", TAIL_HEADER, tail_rows),
    ):
        summary.add_file(write_csv(out_dir / name, config, header, rows), out_dir)
    if coupling_rows:
        summary.add_file(
            write_csv(out_dir / "perc_coupling.csv", config, COUPLING_HEADER, coupling_rows),
            out_dir,
        )
    if config.knob_bool("dump"):
        first = iid_field(lattice, eps_grid[0], levels, make_rng(field_seed))
        path = first.dump(out_dir / "perc.tsv")
        summary.add_file(path, out_dir)

    order = np.argsort(eps_grid)
    by_openness = [final[i] for i in order[::-1]]
    summary.metrics = {
        "eps_grid": eps_grid,
        "levels": levels,
        "final_survival": final,
        "monotone_in_openness": bool(all(a <= b for a, b in zip(by_openness, by_openness[1:]))),
        "tail_slopes": [row[4] for row in summary_rows],
    }
    if coupling_rows:
        summary.metrics["coupling_implication"] = float(np.mean([r[5] for r in coupling_rows]))
        summary.metrics["coupling_domination"] = float(np.mean([r[4] for r in coupling_rows]))
    return summary
