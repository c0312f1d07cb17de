"""
Tests for rates, initial configurations and exact simulation
File: tests/test_dynamics.py
Run with: python -m pytest tests/test_dynamics.py -v
"""
import itertools
import pytest
from pathlib import Path
import sys

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from twoscale.config import HorizonError
from twoscale.lattice import LatticeSpec, build_two_scale_graph, make_hierarchy
from twoscale.process import (
    TYPE1,
    TYPE2,
    Configuration,
    InitKind,
    InitSpec,
    ModelParams,
    Variant,
    initial_configuration,
    occupation_time,
    read_snapshot,
    run_gillespie,
    transition_rates,
    write_snapshot,
)

RATES = dict(B1=2.0, B2=3.0, beta1=5.0, beta2=7.0, delta1=11.0, delta2=13.0)


@pytest.fixture
def ring():
    """Three patches of three sites on a periodic line, centers 1, 4, 7"""
    return build_two_scale_graph(LatticeSpec(d=1, N=3, extent=3))


@pytest.fixture
def ring_states():
    states = np.zeros(9, dtype=np.int8)
    states[0] = TYPE1
    states[2] = TYPE2
    states[4] = TYPE1
    states[7] = TYPE2
    return states


class TestRates:
    """Test the transition rates of each variant"""

    def test_plain_rates(self, ring, ring_states):
        cfg = Configuration(ring_states)
        params = ModelParams(**RATES)
        assert transition_rates(1, cfg, params, ring) == (7.0, 10.0, 0.0)
        assert transition_rates(0, cfg, params, ring) == (0.0, 0.0, 11.0)
        assert transition_rates(2, cfg, params, ring) == (0.0, 0.0, 13.0)

    def test_short_births_stop_at_patch_boundary(self, ring, ring_states):
        # site 2 holds a 2 but sits across the hyperplane from site 3
        cfg = Configuration(ring_states)
        assert transition_rates(3, cfg, ModelParams(**RATES), ring) == (5.0, 0.0, 0.0)

    def test_modified_blocks_long_twos_into_occupied_patch(self, ring, ring_states):
        params = ModelParams(**RATES, variant=Variant.MODIFIED)
        r1, r2, _ = transition_rates(1, Configuration(ring_states), params, ring)
        # 5 from the short 1, 4 spontaneous, no long 1-births
        assert r1 == 9.0
        # the 2 at site 2 shares patch 0, so only the short 2-birth remains
        assert r2 == 7.0

    def test_modified_admits_long_twos_into_clear_patch(self, ring, ring_states):
        ring_states[2] = 0
        params = ModelParams(**RATES, variant=Variant.MODIFIED)
        assert transition_rates(1, Configuration(ring_states), params, ring) == (9.0, 3.0, 0.0)

    def test_finite_volume_spontaneous_center(self):
        graph = build_two_scale_graph(LatticeSpec(d=1, N=5, extent=1, boundary="killing"))
        params = ModelParams(**RATES, variant=Variant.FINITE_VOLUME)
        cfg = Configuration.empty(graph)
        assert transition_rates(2, cfg, params, graph) == (4.0, 0.0, 0.0)
        assert transition_rates(0, cfg, params, graph) == (0.0, 0.0, 0.0)

    def test_finite_volume_needs_single_killing_patch(self, ring):
        params = ModelParams(variant=Variant.FINITE_VOLUME)
        with pytest.raises(ValueError):
            transition_rates(1, Configuration.empty(ring), params, ring)

    @staticmethod
    def multitype_rates(state, neighbor_states):
        """Multitype contact process: births at B_i per occupied neighbor, deaths at delta_i"""
        if state == TYPE1:
            return (0.0, 0.0, RATES["delta1"])
        if state == TYPE2:
            return (0.0, 0.0, RATES["delta2"])
        n1 = sum(1 for s in neighbor_states if s == TYPE1)
        n2 = sum(1 for s in neighbor_states if s == TYPE2)
        return (RATES["B1"] * n1, RATES["B2"] * n2, 0.0)

    def test_single_site_patches_on_a_cycle(self):
        cycle = build_two_scale_graph(LatticeSpec(d=1, N=1, extent=4))
        assert cycle.short_idx.shape[0] == 0
        params = ModelParams(**RATES)
        for states in itertools.product((0, 1, 2), repeat=4):
            cfg = Configuration(np.asarray(states, dtype=np.int8))
            for v in range(4):
                around = (states[(v - 1) % 4], states[(v + 1) % 4])
                expected = self.multitype_rates(states[v], around)
                assert transition_rates(v, cfg, params, cycle) == expected, (states, v)

    def test_single_site_patches_on_a_torus(self):
        torus = build_two_scale_graph(LatticeSpec(d=2, N=1, extent=3))
        params = ModelParams(**RATES)
        v = torus.index((1, 1))
        around = [torus.index(c) for c in ((0, 1), (2, 1), (1, 0), (1, 2))]
        for local in itertools.product((0, 1, 2), repeat=5):
            states = np.zeros(9, dtype=np.int8)
            states[[v] + around] = local
            expected = self.multitype_rates(local[0], local[1:])
            assert transition_rates(v, Configuration(states), params, torus) == expected

    def test_invalid_rates(self):
        with pytest.raises(ValueError):
            ModelParams(beta1=-1.0)
        with pytest.raises(ValueError):
            ModelParams(delta2=float("inf"))


class TestInitialConfigurations:
    """Test the initial-condition families"""

    def test_single2_at_center(self, ring):
        cfg = initial_configuration(InitSpec(kind=InitKind.SINGLE2_AT_CENTER, patch=(1,)), ring)
        assert cfg.counts() == (8, 0, 1)
        assert cfg.states[4] == TYPE2

    def test_all1_except(self, ring):
        spec = InitSpec(kind=InitKind.ALL1_EXCEPT, vertices=((0,), (5,)))
        cfg = initial_configuration(spec, ring)
        assert cfg.counts() == (0, 7, 2)

    def test_product_is_seeded(self, ring):
        spec = InitSpec(kind=InitKind.PRODUCT, p0=0.2, p1=0.4, p2=0.4)
        a = initial_configuration(spec, ring, seed=5)
        b = initial_configuration(spec, ring, seed=5)
        assert np.array_equal(a.states, b.states)

    def test_bad_product_weights(self):
        with pytest.raises(ValueError):
            InitSpec(kind=InitKind.PRODUCT, p0=0.5, p1=0.5, p2=0.5)

    def test_good_block(self):
        hierarchy = make_hierarchy(K=3, L=5)
        graph = build_two_scale_graph(LatticeSpec(d=1, N=25, extent=1, boundary="killing"))
        cfg = initial_configuration(InitSpec(kind=InitKind.GOOD_BLOCK), graph, 0, hierarchy)
        expected = np.full(25, TYPE1, dtype=np.int8)
        expected[10:15] = 0
        expected[[10, 11, 13, 14]] = TYPE2
        assert np.array_equal(cfg.states, expected)

    def test_good_block_needs_hierarchy(self, ring):
        with pytest.raises(ValueError):
            initial_configuration(InitSpec(kind=InitKind.GOOD_BLOCK), ring)

    def test_explicit_from_snapshot(self, tmp_path):
        graph = build_two_scale_graph(LatticeSpec(d=2, N=3, extent=1))
        states = np.zeros(9, dtype=np.int8)
        states[[1, 5]] = [TYPE1, TYPE2]
        path = write_snapshot(tmp_path / "s.txt", graph, states, 2.5, 9, "abc")
        loaded, fields = read_snapshot(path)
        assert np.array_equal(loaded, states)
        assert fields["t"] == "2.5"
        assert fields["config"] == "abc"
        cfg = initial_configuration(InitSpec(kind=InitKind.EXPLICIT, path=str(path)), graph)
        assert np.array_equal(cfg.states, states)

    def test_malformed_snapshot(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("TSCP v1 w=3 h=3 t=0 seed=0 config=\n...\n..\n")
        with pytest.raises(ValueError):
            read_snapshot(path)


class TestGillespie:
    """Test exact simulation"""

    def test_same_seed_same_trajectory(self, ring):
        init = InitSpec(kind=InitKind.PRODUCT, p0=0.4, p1=0.3, p2=0.3)
        params = ModelParams()
        a = run_gillespie(init, params, ring, 5.0, 11, sample_times=(1.0, 2.0))
        b = run_gillespie(init, params, ring, 5.0, 11, sample_times=(1.0, 2.0))
        assert a.n_events == b.n_events
        assert np.array_equal(a.final, b.final)
        assert np.array_equal(a.snapshots, b.snapshots)

    def test_empty_is_absorbing_without_spontaneous_births(self, ring):
        init = InitSpec(kind=InitKind.PRODUCT, p0=1.0, p1=0.0, p2=0.0)
        run = run_gillespie(init, ModelParams(), ring, 10.0, 1)
        assert run.n_events == 0
        assert not run.final.any()

    def test_modified_creates_ones_but_never_twos(self, ring):
        init = InitSpec(kind=InitKind.PRODUCT, p0=1.0, p1=0.0, p2=0.0)
        params = ModelParams(variant=Variant.MODIFIED)
        run = run_gillespie(init, params, ring, 5.0, 3, sample_times=(2.5, 5.0))
        assert run.n_events > 0
        assert not (run.snapshots == TYPE2).any()

    def test_short_edges_stay_inside_patches(self, ring):
        init = InitSpec(kind=InitKind.SINGLE2_AT_CENTER)
        params = ModelParams(B1=0.0, B2=0.0, delta1=0.0, delta2=0.0)
        run = run_gillespie(init, params, ring, 10.0, 4)
        assert not run.final[ring.patch_of != 0].any()
        assert run.final[1] == TYPE2

    def test_stop_on_extinction(self, ring):
        init = InitSpec(kind=InitKind.SINGLE2_AT_CENTER)
        params = ModelParams(beta2=0.0, B2=0.0, delta2=5.0)
        run = run_gillespie(init, params, ring, 1000.0, 2, stop_type=TYPE2)
        assert run.extinction_time is not None
        assert run.t_end == run.extinction_time
        assert not (run.final == TYPE2).any()

    def test_sample_times_checked(self, ring):
        with pytest.raises(ValueError):
            run_gillespie(InitSpec(), ModelParams(), ring, 1.0, 0, sample_times=(2.0,))
        with pytest.raises(ValueError):
            run_gillespie(InitSpec(), ModelParams(), ring, 0.0, 0)

    def test_watched_histories(self, ring):
        run = run_gillespie(
            InitSpec(), ModelParams(), ring, 4.0, 8, sample_times=(4.0,), watch=True
        )
        total = sum(run.occupation_time(4, 0.0, 4.0, s) for s in (0, 1, 2))
        assert total == pytest.approx(4.0)
        assert run.state_at(4, 4.0) == run.snapshot(4.0).states[4]
        assert occupation_time(run, 4, (0.0, 4.0), 0) == run.occupation_time(4, 0.0, 4.0, 0)
        with pytest.raises(KeyError):
            run.snapshot(1.0)
        with pytest.raises(HorizonError):
            run.state_at(4, 5.0)


# Standalone test function for quick verification
def test_dynamics_standalone():
    """Quick standalone test"""
    print("\n" + "=" * 70)
    print("🧪 Testing Two-Scale Dynamics")
    print("=" * 70 + "\n")

    graph = build_two_scale_graph(LatticeSpec(d=2, N=5, extent=3))
    run = run_gillespie(InitSpec(), ModelParams(), graph, 2.0, 42, sample_times=(2.0,))
    n0, n1, n2 = run.snapshot(2.0).counts()
    print(f"📊 After t=2 on {graph.n_vertices} sites: {run.n_events} events")
    print(f"  • Empty: {n0}")
    print(f"  • Type 1: {n1}")
    print(f"  • Type 2: {n2}")
    assert n0 + n1 + n2 == graph.n_vertices

    print("\n" + "=" * 70)
    print("✅ All tests completed successfully!")
    print("=" * 70 + "\n")
