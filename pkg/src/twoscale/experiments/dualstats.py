"""
dualstats: renewal structure of dual trees
File: src/twoscale/experiments/dualstats.py

Each tree is built from the center of patch 0 at the top of a fresh event
window. Renewal gaps, the spatial increments of the renewal points and of
their center subsequence are pooled over trees and compared between the two
halves of the tree list and against trees rooted one patch over.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from twoscale.config import Config
from twoscale.dual.ancestry import determine_type
from twoscale.dual.renewal import (
    Liveness,
    center_subsequence,
    liveness_disagreement,
    renewal_points,
)
from twoscale.dual.repositioning import selected_path
from twoscale.dual.tree import build_dual_tree
from twoscale.experiments.outputs import RunSummary, write_csv
from twoscale.experiments.runconfig import RunConfig
from twoscale.experiments.runner import cached_graph, run_replicates
from twoscale.graphical.events import EventLog, SpaceTimePoint, generate_events
from twoscale.graphical.replay import dual_set, state_at
from twoscale.lattice.graph import TwoScaleGraph
from twoscale.process.models import Variant
from twoscale.process.simulation import initial_configuration
from twoscale.utils.seeding import make_rng

logger = logging.getLogger(__name__)

TREES_HEADER = [
    "tree",
    "n_renewals",
    "n_centers",
    "truncated",
    "root_lives",
    "extinction_s",
    "n_branches",
    "root_type",
    "replay_type",
    "n_repositions",
    "horizon_candidates",
    "horizon_disagreements",
]
RENEWAL_HEADER = ["tree", "n", "tau", "site", "center", "two_arrow"]
RADIUS_HEADER = ["s", "mean_radius", "alive_fraction"]


def _increments(graph: TwoScaleGraph, taus: np.ndarray, positions: np.ndarray) -> tuple:
    """Time gaps and first-axis displacements between consecutive points"""
    if len(taus) < 2:
        return np.zeros(0), np.zeros(0, dtype=np.int64)
    steps = graph.minimal_image(np.diff(positions, axis=0))
    return np.diff(taus), steps[:, 0]


def _radius(graph: TwoScaleGraph, p: SpaceTimePoint, s: float, log: EventLog) -> Optional[int]:
    members = dual_set(p, s, log)
    if not members:
        return None
    delta = graph.minimal_image(graph.coords[sorted(members)] - graph.coords[p.x])
    return int(np.abs(delta).max())


def _renewal_stats(p: SpaceTimePoint, log: EventLog, liveness: Liveness, horizon: float):
    graph = log.graph
    tree = build_dual_tree(p, log)
    seq = renewal_points(tree, liveness, horizon)
    origin = graph.coords_of(int(graph.center_of[0]))
    centers = center_subsequence(seq, graph.spec.N, origin)
    return tree, seq, centers


def _replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> Dict[str, Any]:
    spec, params, init, window, horizon, liveness, m, radius_times, dump_dir = payload
    graph = cached_graph(spec)
    rng = make_rng(seed)
    log = generate_events(graph, params, (0.0, window), rng)
    x0 = int(graph.center_of[0])
    p = SpaceTimePoint(x0, window)
    tree, seq, centers = _renewal_stats(p, log, liveness, horizon)

    gaps, steps = _increments(graph, seq.taus, seq.positions)
    center_taus = np.asarray([0.0] + [pt.tau for pt in centers])
    center_pos = np.asarray([seq.points[0].position] + [pt.position for pt in centers])
    y_gaps, y_steps = _increments(graph, center_taus, center_pos)

    start = initial_configuration(init, graph, rng)
    root_type = determine_type(p, log, start)
    replay_type = int(state_at(start, log, window)[x0])

    shifted_gaps = np.zeros(0)
    if graph.n_patches > 1:
        q = SpaceTimePoint(int(graph.center_of[1]), window)
        _, shifted, _ = _renewal_stats(q, log, liveness, horizon)
        shifted_gaps = shifted.gaps()

    candidates, differ = (0, 0)
    if liveness is Liveness.HORIZON:
        candidates, differ = liveness_disagreement(tree, horizon)

    target = graph.coords_of(int(graph.center_of[-1]) if graph.n_patches > 1 else 0)
    path = selected_path(x0, target, m, log, liveness=liveness, horizon=horizon)

    radii = [_radius(graph, p, s, log) for s in radius_times]

    if dump_dir is not None and index == 0:
        log.dump(Path(dump_dir) / "events.tsv")
        tree.dump(Path(dump_dir) / "dualtree.tsv")

    return {
        "seq": seq,
        "center_ids": {pt.branch for pt in centers},
        "gaps": gaps,
        "steps": steps,
        "y_gaps": y_gaps,
        "y_steps": y_steps,
        "n_centers": len(centers),
        "extinction_s": tree.extinction_s(),
        "n_branches": len(tree),
        "root_type": root_type,
        "replay_type": replay_type,
        "shifted_gaps": shifted_gaps,
        "candidates": candidates,
        "differ": differ,
        "n_repositions": len(path.repositions),
        "radii": radii,
    }


def _ks(a: np.ndarray, b: np.ndarray) -> Tuple[Optional[float], Optional[float]]:
    if a.size == 0 or b.size == 0:
        return None, None
    result = stats.ks_2samp(a, b)
    return float(result.statistic), float(result.pvalue)


def split_half_ks(per_tree: List[np.ndarray]) -> Tuple[Optional[float], Optional[float]]:
    """KS test between increments pooled over the first and second half of the trees"""
    half = len(per_tree) // 2
    if half == 0:
        return None, None
    first = np.concatenate(per_tree[:half])
    second = np.concatenate(per_tree[half:])
    return _ks(first, second)


def lag_one_correlation(per_tree: List[np.ndarray]) -> Tuple[Optional[float], int]:
    """Correlation of consecutive increments within trees and the number of pairs"""
    lead = [g[:-1] for g in per_tree if g.size > 1]
    follow = [g[1:] for g in per_tree if g.size > 1]
    if not lead:
        return None, 0
    a = np.concatenate(lead)
    b = np.concatenate(follow)
    if a.size < 3 or np.std(a) == 0 or np.std(b) == 0:
        return None, int(a.size)
    return float(np.corrcoef(a, b)[0, 1]), int(a.size)


def run_dualstats(config: RunConfig, out_dir: Path) -> RunSummary:
    """Renewal gaps, increments and dual growth over independent trees"""
    graph = cached_graph(config.graph)
    params = config.params
    liveness = (
        Liveness.FINITE_VOLUME if params.variant is Variant.FINITE_VOLUME else Liveness.HORIZON
    )
    window = config.knob_float("window", Config.DEFAULT_DUAL_WINDOW)
    horizon = config.knob_float("horizon", Config.DEFAULT_DUAL_HORIZON)
    m = config.knob_float("m", Config.DEFAULT_REPOSITION_M)
    n_trees = config.knob_int("n_trees", config.replicates)
    radius_times = tuple(
        float(s) for s in np.linspace(0.0, window, Config.DEFAULT_RADIUS_POINTS + 1)[1:]
    )
    dump_dir = str(out_dir) if config.knob_bool("dump") else None
    payload = (
        config.graph,
        params,
        config.init,
        window,
        horizon,
        liveness,
        m,
        radius_times,
        dump_dir,
    )
    print(f"🔄 Building {n_trees} dual trees ({liveness.value} liveness, window {window})...")
    results = run_replicates(_replicate, payload, n_trees, config.seed, config.threads)

    summary = RunSummary.for_config(config)
    tree_rows = []
    renewal_rows = []
    for i, r in enumerate(results):
        seq = r["seq"]
        tree_rows.append(
            (
                i,
                len(seq) - 1,
                r["n_centers"],
                seq.truncated,
                seq.root_lives,
                r["extinction_s"],
                r["n_branches"],
                r["root_type"],
                r["replay_type"],
                r["n_repositions"],
                r["candidates"],
                r["differ"],
            )
        )
        for n, pt in enumerate(seq.points):
            site = ",".join(str(c) for c in pt.position)
            center = n > 0 and pt.branch in r["center_ids"]
            renewal_rows.append((i, n, pt.tau, site, center, pt.two_arrow))

    radius_rows = []
    mean_radius = []
    for k, s in enumerate(radius_times):
        values = [r["radii"][k] for r in results if r["radii"][k] is not None]
        mean = float(np.mean(values)) if values else None
        radius_rows.append((s, mean, len(values) / len(results)))
        mean_radius.append(mean)
    for name, header, rows in (
        ("dual_trees.csv", TREES_HEADER, tree_rows),
        ("renewals.csv", RENEWAL_HEADER, renewal_rows),
        ("dual_radius.csv", RADIUS_HEADER, radius_rows),
    ):
        summary.add_file(write_csv(out_dir / name, config, header, rows), out_dir)
    if dump_dir is not None:
        summary.add_file(out_dir / "events.tsv", out_dir)
        summary.add_file(out_dir / "dualtree.tsv", out_dir)

    gaps = [r["gaps"] for r in results]
    y_gaps = [r["y_gaps"] for r in results]
    lag, pairs = lag_one_correlation(gaps)
    known = [(s, v) for s, v in zip(radius_times, mean_radius) if v is not None]
    slope = float(np.polyfit(*zip(*known), 1)[0]) if len(known) >= 2 else None
    translated = _ks(np.concatenate(gaps), np.concatenate([r["shifted_gaps"] for r in results]))
    candidates = sum(r["candidates"] for r in results)
    disagreement = sum(r["differ"] for r in results) / candidates if candidates else None
    summary.metrics = {
        "trees": n_trees,
        "liveness": liveness.value,
        "mean_renewals": float(np.mean([len(r["seq"]) - 1 for r in results])),
        "sigma_split_ks": split_half_ks(gaps),
        "x_step_split_ks": split_half_ks([r["steps"].astype(float) for r in results]),
        "y_split_ks": split_half_ks(y_gaps),
        "y_step_split_ks": split_half_ks([r["y_steps"].astype(float) for r in results]),
        "lag1_correlation": lag,
        "lag1_pairs": pairs,
        "lag1_three_sigma": 3.0 / np.sqrt(pairs) if pairs else None,
        "radius_slope": slope,
        "translation_ks": translated,
        "horizon_disagreement": disagreement,
        "type_oracle_agreement": float(
            np.mean([r["root_type"] == r["replay_type"] for r in results])
        ),
        "degenerate_filter": config.graph.N == 1,
    }
    logger.info(
        f"dualstats: {n_trees} trees, sigma split KS {summary.metrics['sigma_split_ks']}, "
        f"radius slope {slope}"
    )
    return summary
