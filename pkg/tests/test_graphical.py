"""
Tests for the graphical representation, replay and dual sets
File: tests/test_graphical.py
Run with: python -m pytest tests/test_graphical.py -v
"""
import pytest
from pathlib import Path
import sys

import numpy as np
from scipy import stats

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from twoscale.config import HorizonError
from twoscale.graphical import (
    ARROW,
    BOTH,
    DEATH,
    DOT,
    ONLY1,
    ONLY2,
    EventLog,
    SpaceTimePoint,
    dual_extinction_time,
    dual_set,
    dual_survives,
    generate_events,
    replay,
    state_at,
)
from twoscale.lattice import LatticeSpec, build_two_scale_graph
from twoscale.process import (
    Configuration,
    InitKind,
    InitSpec,
    Labeling,
    ModelParams,
    Variant,
    initial_configuration,
    run_gillespie,
)


def make_log(graph, params, marks, t_hi):
    """EventLog from (time, kind, src, dst, label) tuples"""
    rows = list(zip(*marks)) if marks else [[]] * 5
    return EventLog(
        graph=graph,
        params=params,
        t_lo=0.0,
        t_hi=t_hi,
        times=np.asarray(rows[0], dtype=np.float64),
        kind=np.asarray(rows[1], dtype=np.int8),
        src=np.asarray(rows[2], dtype=np.int64),
        dst=np.asarray(rows[3], dtype=np.int64),
        label=np.asarray(rows[4], dtype=np.int8),
    )


@pytest.fixture
def segment():
    return build_two_scale_graph(LatticeSpec(d=1, N=5, extent=1))


class TestReplay:
    """Test forward replay of hand-built logs"""

    def test_labels_gate_arrows_and_deaths(self, segment):
        marks = [
            (1.0, ARROW, 0, 1, ONLY1),
            (2.0, ARROW, 0, 1, ONLY2),
            (3.0, ARROW, 1, 2, BOTH),
            (4.0, DEATH, 0, -1, ONLY1),
            (5.0, DEATH, 1, -1, BOTH),
        ]
        log = make_log(segment, ModelParams(), marks, 6.0)
        init = Configuration(np.array([2, 0, 0, 0, 0]))
        assert state_at(init, log, 1.5).tolist() == [2, 0, 0, 0, 0]
        assert state_at(init, log, 2.5).tolist() == [2, 2, 0, 0, 0]
        assert replay(init, log).final.tolist() == [2, 0, 2, 0, 0]

    def test_arrows_need_empty_targets(self, segment):
        marks = [(1.0, ARROW, 0, 1, BOTH)]
        log = make_log(segment, ModelParams(), marks, 2.0)
        init = Configuration(np.array([2, 1, 0, 0, 0]))
        assert replay(init, log).final.tolist() == [2, 1, 0, 0, 0]

    def test_dots_only_fill_empty_sites(self, segment):
        marks = [(1.0, DOT, 2, -1, BOTH), (2.0, DOT, 3, -1, BOTH)]
        log = make_log(segment, ModelParams(), marks, 3.0)
        init = Configuration(np.array([0, 0, 0, 2, 0]))
        assert replay(init, log).final.tolist() == [0, 0, 1, 2, 0]

    def test_modified_long_twos_wait_for_a_clear_patch(self):
        ring = build_two_scale_graph(LatticeSpec(d=1, N=3, extent=3))
        marks = [
            (1.0, ARROW, 1, 4, ONLY2),
            (2.0, DEATH, 3, -1, BOTH),
            (3.0, ARROW, 1, 4, ONLY2),
        ]
        log = make_log(ring, ModelParams(variant=Variant.MODIFIED), marks, 4.0)
        init = np.zeros(9, dtype=np.int8)
        init[[1, 3]] = 2
        run = replay(Configuration(init), log, watch=[4])
        times, states = run.history(4)
        assert times.tolist() == [0.0, 3.0]
        assert states.tolist() == [0, 2]

    def test_sample_times_inside_window(self, segment):
        log = make_log(segment, ModelParams(), [], 1.0)
        with pytest.raises(HorizonError):
            replay(Configuration.empty(segment), log, sample_times=[2.0])


class TestDualSets:
    """Test backward dual-set queries"""

    @pytest.fixture
    def log(self, segment):
        marks = [
            (0.5, DEATH, 2, -1, BOTH),
            (1.0, ARROW, 1, 2, BOTH),
            (2.0, ARROW, 0, 1, BOTH),
        ]
        return make_log(segment, ModelParams(), marks, 3.0)

    def test_dual_set_grows_through_arrows(self, log):
        p = SpaceTimePoint(2, 3.0)
        assert dual_set(p, 0.0, log) == {2}
        assert dual_set(p, 1.5, log) == {2}
        assert dual_set(p, 2.0, log) == {1, 2}
        assert dual_set(p, 3.0, log) == {1}

    def test_dual_extinction(self, segment, log):
        p = SpaceTimePoint(2, 3.0)
        assert dual_extinction_time(p, log) is None
        assert dual_survives(p, 3.0, log)

        marks = [(0.2, DEATH, 1, -1, BOTH)] + [
            (float(t), int(k), int(s), int(d), int(b))
            for t, k, s, d, b in zip(log.times, log.kind, log.src, log.dst, log.label)
        ]
        dying = make_log(segment, ModelParams(), marks, 3.0)
        assert dual_extinction_time(p, dying) == pytest.approx(2.8)
        assert not dual_survives(p, 3.0, dying)

    def test_dual_time_outside_window(self, log):
        with pytest.raises(HorizonError):
            dual_set(SpaceTimePoint(2, 3.0), 3.5, log)
        with pytest.raises(ValueError):
            dual_set(SpaceTimePoint(9, 1.0), 0.5, log)


class TestGeneratedEvents:
    """Test sampled logs against occupancy duality and their mark rates"""

    @pytest.fixture
    def ring(self):
        return build_two_scale_graph(LatticeSpec(d=1, N=5, extent=3))

    def test_same_seed_same_log(self, ring):
        a = generate_events(ring, ModelParams(), (0.0, 2.0), 6)
        b = generate_events(ring, ModelParams(), (0.0, 2.0), 6)
        assert np.array_equal(a.times, b.times)
        assert np.array_equal(a.src, b.src)

    def test_occupancy_duality(self, ring):
        params = ModelParams()
        log = generate_events(ring, params, (0.0, 3.0), 17)
        init = initial_configuration(InitSpec(p0=0.5, p1=0.25, p2=0.25), ring, 3)
        occupied = set(np.nonzero(init.states)[0].tolist())
        final = replay(init, log).final
        for x in range(ring.n_vertices):
            ancestors = dual_set(SpaceTimePoint(x, 3.0), 3.0, log)
            assert (final[x] != 0) == bool(ancestors & occupied)

    def test_occupancy_is_monotone(self, ring):
        log = generate_events(ring, ModelParams(), (0.0, 3.0), 21)
        small = initial_configuration(InitSpec(kind=InitKind.SINGLE2_AT_CENTER), ring)
        large = initial_configuration(InitSpec(kind=InitKind.ALL1_EXCEPT), ring)
        a = replay(small, log).final != 0
        b = replay(large, log).final != 0
        assert not (a & ~b).any()

    def test_unequal_rates_split_into_labels(self, ring):
        params = ModelParams(beta1=1.0, beta2=3.0)
        log = generate_events(ring, params, (0.0, 5.0), 2)
        short = (log.kind == ARROW) & ~ring.is_center[log.src]
        assert (log.label[short] == ONLY2).any()
        assert not (log.label[short] == ONLY1).any()

    def test_exact_labeling_needs_type2_advantage(self, ring):
        params = ModelParams(beta1=3.0, beta2=1.0, labeling=Labeling.EXACT)
        with pytest.raises(ValueError):
            generate_events(ring, params, (0.0, 1.0), 0)

    def test_modified_dots_at_rate_2d_B1(self):
        ring = build_two_scale_graph(LatticeSpec(d=1, N=3, extent=3))
        log = generate_events(ring, ModelParams(variant=Variant.MODIFIED), (0.0, 100.0), 9)
        dots = log.kind == DOT
        assert set(log.src[dots].tolist()) <= set(ring.center_of.tolist())
        # mean 3 centers x rate 2 x 100, sd about 24.5
        assert 480 < int(dots.sum()) < 720

    def test_dump(self, ring, tmp_path):
        log = generate_events(ring, ModelParams(), (0.0, 0.5), 1)
        lines = log.dump(tmp_path / "events.tsv").read_text().splitlines()
        assert len(lines) == len(log)
        assert all(len(line.split("\t")) == 5 for line in lines)


class TestMarkCounts:
    """Per-channel Poisson counts match rate x edges x window length"""

    WINDOW = 5.0
    SEEDS = 60

    @pytest.fixture
    def ring(self):
        return build_two_scale_graph(LatticeSpec(d=1, N=5, extent=3))

    @staticmethod
    def channel_counts(ring, log):
        arrows = log.kind == ARROW
        same_patch = np.zeros(len(log), dtype=np.bool_)
        same_patch[arrows] = ring.patch_of[log.src[arrows]] == ring.patch_of[log.dst[arrows]]
        groups = {
            "short": arrows & same_patch,
            "long": arrows & ~same_patch,
            "death": log.kind == DEATH,
        }
        return {
            (name, lab): int((mask & (log.label == lab)).sum())
            for name, mask in groups.items()
            for lab in (BOTH, ONLY1, ONLY2)
        }

    def test_counts_per_channel(self, ring):
        params = ModelParams(B1=2.0, B2=0.5, beta1=1.0, beta2=3.0, delta1=1.0, delta2=2.0)
        n_short = ring.short_idx.shape[0]
        n_long = ring.long_idx.shape[0]
        n = ring.n_vertices
        expected = {
            ("short", BOTH): 1.0 * n_short,
            ("short", ONLY1): 0.0,
            ("short", ONLY2): 2.0 * n_short,
            ("long", BOTH): 0.5 * n_long,
            ("long", ONLY1): 1.5 * n_long,
            ("long", ONLY2): 0.0,
            ("death", BOTH): 1.0 * n,
            ("death", ONLY1): 0.0,
            ("death", ONLY2): 1.0 * n,
        }
        samples = {key: [] for key in expected}
        for seed in range(self.SEEDS):
            log = generate_events(ring, params, (0.0, self.WINDOW), seed)
            for key, count in self.channel_counts(ring, log).items():
                samples[key].append(count)

        for key, rate in expected.items():
            x = np.asarray(samples[key], dtype=np.float64)
            mu = rate * self.WINDOW
            if mu == 0.0:
                assert x.sum() == 0, key
                continue
            z = (x.sum() - mu * self.SEEDS) / np.sqrt(mu * self.SEEDS)
            assert abs(z) < 4.0, key
            # variance equals the mean for Poisson counts
            dispersion = ((x - x.mean()) ** 2).sum() / x.mean()
            p = stats.chi2.sf(dispersion, self.SEEDS - 1)
            assert 1e-4 < p < 1 - 1e-4, key

    def test_times_uniform_on_window(self, ring):
        log = generate_events(ring, ModelParams(), (2.0, 7.0), 3)
        assert log.times.min() >= 2.0
        assert log.times.max() <= 7.0
        assert stats.kstest((log.times - 2.0) / 5.0, "uniform").pvalue > 1e-4


class TestKernelAgreement:
    """Gillespie runs and replayed graphical representations have the same law"""

    RUNS = 300
    T = 1.5

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "params",
        [
            ModelParams(B1=0.5, B2=1.5, beta1=1.0, beta2=2.0, delta1=1.0, delta2=0.7),
            ModelParams(B1=0.5, B2=2.0, beta1=1.0, beta2=1.5, variant=Variant.MODIFIED),
        ],
        ids=["plain", "modified"],
    )
    def test_type_counts_agree(self, params):
        graph = build_two_scale_graph(LatticeSpec(d=1, N=3, extent=3))
        init = initial_configuration(InitSpec(p0=0.4, p1=0.3, p2=0.3), graph, 5)
        direct = np.zeros((self.RUNS, 3))
        replayed = np.zeros((self.RUNS, 3))
        for seed in range(self.RUNS):
            run = run_gillespie(init, params, graph, self.T, seed)
            direct[seed] = np.bincount(run.final, minlength=3)
            log = generate_events(graph, params, (0.0, self.T), 10_000 + seed)
            replayed[seed] = np.bincount(state_at(init, log, self.T), minlength=3)
        for state in (1, 2):
            result = stats.ks_2samp(direct[:, state], replayed[:, state])
            assert result.pvalue > 1e-3, state


# Standalone test function for quick verification
def test_graphical_standalone():
    """Quick standalone test"""
    print("\n" + "=" * 70)
    print("🧪 Testing Graphical Representation")
    print("=" * 70 + "\n")

    graph = build_two_scale_graph(LatticeSpec(d=2, N=3, extent=3))
    log = generate_events(graph, ModelParams(), (0.0, 1.0), 42)
    print(f"📊 {len(log)} marks on {graph.n_vertices} sites over one time unit")
    print(f"  • Arrows: {int((log.kind == ARROW).sum())}")
    print(f"  • Deaths: {int((log.kind == DEATH).sum())}")
    assert len(log) > 0

    print("\n" + "=" * 70)
    print("✅ All tests completed successfully!")
    print("=" * 70 + "\n")
