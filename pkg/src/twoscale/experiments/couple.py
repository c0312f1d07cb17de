"""
couple: block goodness, inclusion in the induced percolation and invasion statistics
File: src/twoscale/experiments/couple.py

finite_volume configs estimate the one-block goodness probabilities on a
single patch of side (K + 2)L for each L. Paired runs then set the good sites
of several blocks against an i.i.d. field at the estimated eps. modified
configs record the invasion attempts into the patch next to the origin and the
type-2 occupation of the centers.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from twoscale.config import Config, ConfigError, HorizonError
from twoscale.experiments.outputs import RunSummary, write_csv
from twoscale.experiments.runconfig import RunConfig
from twoscale.experiments.runner import (
    cached_graph,
    patch_index,
    run_replicates,
    single_patch_spec,
)
from twoscale.lattice.hierarchy import ScaleHierarchy, block_length, make_hierarchy
from twoscale.percolation.blocks import (
    StableKind,
    estimate_eps,
    good_sites,
    inclusion_check,
    induced_field,
    is_good,
    neighbor_goodness,
    site_of_patch,
    stable_sites,
)
from twoscale.percolation.oriented import (
    PercLattice,
    Site,
    iid_field,
    survival_curve,
    wet_sets,
)
from twoscale.process.models import TYPE2, InitKind, InitSpec, Variant
from twoscale.process.simulation import Trajectory, run_gillespie
from twoscale.utils.seeding import make_rng, spawn_seeds

logger = logging.getLogger(__name__)

GOODNESS_HEADER = ["L", "N", "geometry", "replicates", "good", "probability", "ci_low", "ci_high"]
INCLUSION_HEADER = ["replicate", "level", "n_wet", "n_induced", "n_good", "included"]
SURVIVAL_HEADER = ["level", "induced_survival", "iid_survival"]
INVASION_HEADER = ["replicate", "attempt", "r", "s", "duration", "censored", "success"]
OCCUPATION_HEADER = ["replicate", "block", "site", "fraction", "threshold", "stable"]


def _unit(d: int, k: int = 1) -> Site:
    return (k,) + (0,) * (d - 1)


def geometries(hierarchy: ScaleHierarchy) -> List[Tuple[str, Site, Site]]:
    """(name, z1, z2): into the origin, out of the origin, away from the origin"""
    d = hierarchy.d
    r = (hierarchy.K - 1) // 2
    out = [
        ("to_origin", _unit(d), (0,) * d),
        ("from_origin", (0,) * d, _unit(d)),
        ("off_origin", _unit(d), _unit(d, 2)),
    ]
    return [g for g in out if all(abs(c) <= r for c in g[1] + g[2])]


def _good_block(z: Site, fill: Optional[int]) -> InitSpec:
    return InitSpec(kind=InitKind.GOOD_BLOCK, patch=z, fill=fill)


def _goodness_replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> dict:
    spec, params, hierarchy, fill, geoms = payload
    graph = cached_graph(spec)
    rng = make_rng(seed)
    T = float(hierarchy.T)
    out: Dict[str, object] = {}
    for name, z1, z2 in geoms:
        run = run_gillespie(
            _good_block(z1, fill), params, graph, T, rng, sample_times=[T], hierarchy=hierarchy
        )
        cfg = run.snapshot(T)
        if z1 == (0,) * hierarchy.d:
            out["neighbors"] = neighbor_goodness(cfg, hierarchy)
        out[name] = is_good(graph.grid(cfg.states), hierarchy, z2)
    return out


@dataclass
class InclusionOutcome:
    """One paired run: the process-induced good sites against an i.i.d. field at eps_hat"""

    wet_sizes: List[int]
    induced_sizes: List[int]
    good_counts: List[int]
    included: List[bool]


def _inclusion_replicate(
    index: int, seed: np.random.SeedSequence, payload: tuple
) -> InclusionOutcome:
    spec, params, hierarchy, fill, levels, eps_hat = payload
    graph = cached_graph(spec)
    process_seed, field_seed = spawn_seeds(seed, 2)
    T = float(hierarchy.T)
    times = [n * T for n in range(levels + 1)]
    origin = (0,) * hierarchy.d
    run = run_gillespie(
        _good_block(origin, fill),
        params,
        graph,
        times[-1],
        process_seed,
        sample_times=times,
        hierarchy=hierarchy,
    )
    sites = [good_sites(run.snapshot(t), hierarchy, level=n) for n, t in enumerate(times)]
    lattice = PercLattice(d=hierarchy.d, K=hierarchy.K)
    wet = wet_sets(iid_field(lattice, eps_hat, levels, field_seed), [origin])
    induced = wet_sets(induced_field(lattice, sites), [origin])
    return InclusionOutcome(
        wet_sizes=[int(s) for s in wet.sizes],
        induced_sizes=[int(s) for s in induced.sizes],
        good_counts=[len(s) for s in sites],
        included=inclusion_check(wet, sites).included,
    )


def inclusion_frequency(outcomes: Sequence[InclusionOutcome], levels: int) -> List[float]:
    """Fraction of paired runs with W_n contained in X_n, per level n"""
    if not outcomes:
        return [float("nan")] * (levels + 1)
    return [float(np.mean([o.included[n] for o in outcomes])) for n in range(levels + 1)]


def _proportion(k: int, n: int) -> Tuple[float, float, float]:
    if n == 0:
        return float("nan"), float("nan"), float("nan")
    ci = stats.binomtest(k, n).proportion_ci(confidence_level=0.95)
    return k / n, float(ci.low), float(ci.high)


def run_goodness(config: RunConfig, out_dir: Path, summary: RunSummary) -> None:
    d = config.graph.d
    K = config.knob_int("K")
    L_grid = config.knob_ints("L_grid") if config.has("L_grid") else [config.knob_int("L")]
    side = config.knob_int("sub_box_side") if config.has("sub_box_side") else None
    fill = config.init.fill
    seeds = spawn_seeds(config.seed, len(L_grid) + 2)

    rows: List[tuple] = []
    last_neighbors: List[Dict[Site, bool]] = []
    trend: Dict[str, List[float]] = {}
    for L, seed in zip(L_grid, seeds):
        hierarchy = make_hierarchy(K, L, d, side)
        spec = single_patch_spec(d, hierarchy.N)
        geoms = geometries(hierarchy)
        print(f"🔄 L={L} (N={hierarchy.N}, T={hierarchy.T}): {config.replicates} replicates...")
        outcomes = run_replicates(
            _goodness_replicate,
            (spec, config.params, hierarchy, fill, geoms),
            config.replicates,
            seed,
            config.threads,
        )
        for name, _, _ in geoms:
            good = sum(bool(o[name]) for o in outcomes)
            p, lo, hi = _proportion(good, len(outcomes))
            rows.append((L, hierarchy.N, name, len(outcomes), good, p, lo, hi))
            trend.setdefault(name, []).append(p)
        last_neighbors = [o["neighbors"] for o in outcomes if "neighbors" in o]
        logger.info(f"couple L={L}: " + ", ".join(f"{r[2]}={r[5]:.3f}" for r in rows[-3:]))
    summary.add_file(write_csv(out_dir / "goodness.csv", config, GOODNESS_HEADER, rows), out_dir)

    eps_hat = estimate_eps(last_neighbors)
    hierarchy = make_hierarchy(K, L_grid[-1], d, side)
    max_levels = int(config.t_max // hierarchy.T)
    if max_levels < 1:
        raise HorizonError(
            f"t_max={config.t_max} is shorter than one block T = L^2 = {hierarchy.T}"
        )
    levels = min(config.knob_int("levels", Config.DEFAULT_COUPLE_LEVELS), max_levels)
    print(f"🔄 Inclusion check over {levels} blocks, eps estimate {eps_hat:.4f}...")
    results: List[InclusionOutcome] = run_replicates(
        _inclusion_replicate,
        (single_patch_spec(d, hierarchy.N), config.params, hierarchy, fill, levels, eps_hat),
        config.replicates,
        seeds[-2],
        config.threads,
    )
    inclusion_rows = []
    induced_alive = np.zeros(levels + 1)
    for rep, outcome in enumerate(results):
        for n in range(levels + 1):
            inclusion_rows.append(
                (
                    rep,
                    n,
                    outcome.wet_sizes[n],
                    outcome.induced_sizes[n],
                    outcome.good_counts[n],
                    outcome.included[n],
                )
            )
        induced_alive += np.asarray(outcome.induced_sizes) > 0
    summary.add_file(
        write_csv(out_dir / "inclusion.csv", config, INCLUSION_HEADER, inclusion_rows), out_dir
    )
    frequency = inclusion_frequency(results, levels)
    logger.info(f"couple inclusion frequency per level: {frequency}")

    curve = survival_curve(PercLattice(d=d, K=K), eps_hat, levels, config.replicates, seeds[-1])
    induced = induced_alive / len(results)
    survival_rows = [(n, induced[n], curve.survival[n]) for n in range(levels + 1)]
    summary.add_file(
        write_csv(out_dir / "couple_survival.csv", config, SURVIVAL_HEADER, survival_rows),
        out_dir,
    )
    summary.metrics.update(
        {
            "K": K,
            "L_grid": L_grid,
            "goodness_trend": trend,
            "eps_hat": eps_hat,
            "inclusion_levels": levels,
            "inclusion_frequency": frequency,
            "inclusion_all_levels": float(np.mean([all(o.included) for o in results])),
        }
    )


@dataclass
class InvasionRecord:
    """Attempts into one patch: r_i, s_i and the first successful invasion"""

    starts: List[float] = field(default_factory=list)
    ends: List[float] = field(default_factory=list)
    censored: List[bool] = field(default_factory=list)
    threshold: float = 0.0

    def successes(self) -> List[bool]:
        return [s - r > self.threshold for r, s in zip(self.starts, self.ends)]

    @property
    def first_success(self) -> Optional[int]:
        """M, counted from 1"""
        return next((i + 1 for i, ok in enumerate(self.successes()) if ok), None)

    @property
    def sigma(self) -> Optional[float]:
        m = self.first_success
        return None if m is None else self.starts[m - 1]


def invasion_attempts(run: Trajectory, initially_void: bool, threshold: float) -> InvasionRecord:
    """Pair the void-to-occupied flips of the watched patch with the following clearings"""
    record = InvasionRecord(threshold=threshold)
    ups = list(run.invasion_times)
    downs = list(run.clearing_times)
    if not initially_void and downs:
        downs = downs[1:]
    for i, r in enumerate(ups):
        if i < len(downs):
            record.starts.append(float(r))
            record.ends.append(float(downs[i]))
            record.censored.append(False)
        else:
            record.starts.append(float(r))
            record.ends.append(float(run.t_end))
            record.censored.append(True)
    return record


def _invasion_replicate(index: int, seed: np.random.SeedSequence, payload: tuple) -> tuple:
    spec, params, init, t_max, target, origin, K, block, levels = payload
    graph = cached_graph(spec)
    run = run_gillespie(init, params, graph, t_max, seed, watch=graph.center_of, watch_patch=target)
    members = graph.patch_members[target]
    void = not np.any(run.initial[members] == TYPE2)
    record = invasion_attempts(run, void, 3.0 * block)
    type2 = stable_sites(run, graph, StableKind.TYPE2, block, levels, K=K, origin=origin)
    type1 = stable_sites(run, graph, StableKind.TYPE1, block, levels, origin=origin)
    fractions = []
    for p in (patch_index(graph, origin), target):
        z = site_of_patch(graph, p, origin)
        center = int(graph.center_of[p])
        for n in range(levels + 1):
            held = run.occupation_time(center, n * block, block, TYPE2)
            stable = z in type2[n] if (sum(z) + n) % 2 == 0 else None
            fractions.append((n, z, held / block, stable))
    return record, fractions, [len(s) for s in type1], [len(s) for s in type2]


def run_invasion(config: RunConfig, out_dir: Path, summary: RunSummary) -> None:
    graph = cached_graph(config.graph)
    if graph.n_patches < 2:
        raise ConfigError("invasion statistics need at least two patches (graph.extent >= 2)")
    K = config.knob_int("K")
    c = config.knob_float("c", Config.DEFAULT_BLOCK_C)
    cap = config.knob_float("cap", Config.DEFAULT_BLOCK_CAP)
    block = block_length(K, c, cap)
    levels = int(config.t_max // block) - 1
    if levels < 0:
        raise HorizonError(f"t_max={config.t_max} is shorter than one time block I_K={block:.4g}")
    origin = config.init.patch or (0,) * graph.spec.d
    target = patch_index(graph, (origin[0] + 1,) + tuple(origin[1:]))
    payload = (
        config.graph,
        config.params,
        config.init,
        config.t_max,
        target,
        origin,
        K,
        block,
        levels,
    )
    print(f"🔄 Invasion statistics: I_K={block:.4g}, {levels + 1} blocks...")
    results = run_replicates(
        _invasion_replicate, payload, config.replicates, config.seed, config.threads
    )

    invasion_rows = []
    occupation_rows = []
    sigmas: List[Optional[float]] = []
    attempts = 0
    successes = 0
    type1_counts = []
    for rep, (record, fractions, n_type1, _) in enumerate(results):
        flags = record.successes()
        attempts_of = zip(record.starts, record.ends, record.censored, flags)
        for i, (r, s, cens, ok) in enumerate(attempts_of):
            invasion_rows.append((rep, i + 1, r, s, s - r, cens, ok))
        attempts += len(flags)
        successes += sum(flags)
        sigmas.append(record.sigma)
        for n, z, fraction, stable in fractions:
            site = ",".join(str(v) for v in z)
            occupation_rows.append((rep, n, site, fraction, 1.0 / K, stable))
        type1_counts.append(np.mean(n_type1))
    summary.add_file(
        write_csv(out_dir / "invasions.csv", config, INVASION_HEADER, invasion_rows), out_dir
    )
    summary.add_file(
        write_csv(out_dir / "occupation.csv", config, OCCUPATION_HEADER, occupation_rows), out_dir
    )
    known = [s for s in sigmas if s is not None]
    summary.metrics.update(
        {
            "K": K,
            "block_length": block,
            "attempts": attempts,
            "successful_attempts": successes,
            "success_fraction": successes / attempts if attempts else None,
            "sigma": sigmas,
            "mean_sigma": float(np.mean(known)) if known else None,
            "mean_center_fraction": float(np.mean([r[3] for r in occupation_rows])),
            "occupation_threshold": 1.0 / K,
            "mean_type1_stable": float(np.mean(type1_counts)),
        }
    )


def run_couple(config: RunConfig, out_dir: Path) -> RunSummary:
    """Goodness and inclusion for finite_volume configs, invasions for modified ones"""
    summary = RunSummary.for_config(config)
    variant = config.params.variant
    if variant is Variant.FINITE_VOLUME:
        run_goodness(config, out_dir, summary)
    elif variant is Variant.MODIFIED:
        run_invasion(config, out_dir, summary)
    else:
        raise ConfigError("couple runs need params.variant = finite_volume or modified")
    return summary
