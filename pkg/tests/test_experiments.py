"""
Tests for run configs, output files, the experiment commands and the CLI
File: tests/test_experiments.py
Run with: python -m pytest tests/test_experiments.py -v
"""
import json
import pytest
from pathlib import Path
import sys

import numpy as np

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from twoscale.config import ConfigError
from twoscale.database.connection import RunDatabase
from twoscale.experiments import (
    RunConfig,
    load_run_config,
    read_csv,
    run_coexist,
    run_couple,
    run_dualstats,
    run_extinction,
    run_perc,
    run_replicates,
    run_simulate,
    write_csv,
)
from twoscale.experiments.couple import _inclusion_replicate, inclusion_frequency
from twoscale.experiments.dualstats import lag_one_correlation, split_half_ks
from twoscale.experiments.extinction import branching_extinction
from twoscale.experiments.outputs import format_value
from twoscale.experiments.runconfig import config_hash, parse_config_text
from twoscale.experiments.runner import single_patch_spec
from twoscale.experiments.simulate import hetero_pairs
from twoscale.lattice import LatticeSpec, build_two_scale_graph, make_hierarchy
from twoscale.main import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from twoscale.process import ModelParams
from twoscale.utils.seeding import make_rng

PERC = """
# two extreme openness values
exp.kind = perc
exp.seed = 7
exp.replicates = 4
exp.eps_grid = 0, 1
exp.levels = 6
exp.K = 3
graph.d = 1
"""

SIMULATE = """
exp.kind = simulate
exp.seed = 3
exp.t_max = 1
exp.sample_times = 0.5, 1
graph.d = 2
graph.N = 3
graph.extent = 2
"""

EXTINCTION = """
exp.kind = extinction
exp.seed = 11
exp.replicates = 5
exp.t_max = 50
exp.N_grid = 1, 3
graph.d = 1
params.variant = finite_volume
params.beta1 = 0.5
params.beta2 = 1.0
params.delta2 = 3.0
"""


def config_from(text: str) -> RunConfig:
    return RunConfig.from_dict(parse_config_text(text))


def write_config(tmp_path: Path, text: str, name: str = "run.conf") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _seeded_draw(index, seed, payload):
    return index, float(make_rng(seed).random()) + payload


class TestRunConfig:
    """Test config parsing, hashing and validation"""

    def test_parse_comments_and_values(self):
        flat = parse_config_text(PERC)
        assert flat["exp.eps_grid"] == "0, 1"
        assert "# two extreme openness values" not in flat

    def test_parse_errors(self):
        with pytest.raises(ConfigError):
            parse_config_text("exp.kind perc")
        with pytest.raises(ConfigError):
            parse_config_text("exp.seed = 1\nexp.seed = 2")

    def test_hash_ignores_seed_and_threads(self):
        a = config_from(PERC)
        b = a.with_overrides(seed=99, threads=4)
        assert b.seed == 99
        assert a.config_hash == b.config_hash
        assert a.config_hash != a.with_overrides(levels=7).config_hash

    def test_hash_normalizes_whitespace(self):
        a = parse_config_text("exp.eps_grid = 0, 1")
        b = parse_config_text("exp.eps_grid =   0,   1")
        assert config_hash(a) == config_hash(b)

    def test_typed_sections(self):
        config = config_from(EXTINCTION)
        assert config.graph == LatticeSpec(d=1, N=3, extent=1)
        assert config.params.beta2 == 1.0
        assert config.knob_ints("N_grid") == [1, 3]
        assert config.t_max == 50.0

    @pytest.mark.parametrize(
        "text",
        [
            "exp.kind = nothing",
            "exp.kind = perc\nexp.eps = 0.1\nexp.unknown = 1",
            "exp.kind = perc\nexp.eps = 0.1\nother.key = 1",
            "exp.kind = perc",
            "exp.kind = perc\nexp.eps = 0.1\nexp.K = 4",
            "exp.kind = perc\nexp.eps = 0.1\nexp.seed = -1",
            "exp.kind = perc\nexp.eps = 0.1\ngraph.N = 4",
            "exp.kind = perc\nexp.eps = 0.1\nexp.sample_times = 5000",
            "exp.kind = extinction\nexp.N_grid = 3\nparams.beta2 = 2",
            "exp.kind = extinction\nparams.variant = finite_volume\nexp.N_grid = 3",
            "exp.kind = extinction\nparams.variant = finite_volume\nparams.beta2 = 2",
            "exp.kind = couple\nparams.variant = modified",
            "exp.kind = couple\nparams.variant = finite_volume\nexp.K = 3",
            "exp.kind = couple\nparams.variant = finite_volume\nexp.K = 1\nexp.L = 3",
            "exp.kind = couple\nexp.K = 3",
            "exp.kind = dualstats\nparams.delta1 = 2",
            "exp.kind = dualstats\nparams.variant = modified",
            "exp.kind = coexist\nexp.N_grid = 2",
        ],
    )
    def test_invalid_configs(self, text):
        with pytest.raises(ConfigError):
            config_from(text)

    def test_load_with_overrides(self, tmp_path):
        path = write_config(tmp_path, PERC)
        config = load_run_config(path, {"seed": 5, "replicates": None}, kind="perc")
        assert config.seed == 5
        assert config.replicates == 4
        with pytest.raises(ConfigError):
            load_run_config(path, kind="simulate")
        with pytest.raises(ConfigError):
            load_run_config(tmp_path / "missing.conf")


class TestOutputs:
    """Test CSV writing and value formatting"""

    def test_format_value(self):
        assert format_value(True) == "1"
        assert format_value(np.int64(3)) == "3"
        assert format_value(0.1 + 0.2) == "0.3"
        assert format_value(float("nan")) == "nan"
        assert format_value(None) == ""

    def test_echo_line_and_rows(self, tmp_path):
        config = config_from(PERC)
        path = write_csv(tmp_path / "x.csv", config, ["a", "b"], [(1, 0.5), (2, None)])
        lines = path.read_bytes().decode("utf-8").split("\n")
        assert lines[0] == f"# twoscale v1.0.0 config={config.config_hash} seed=7"
        assert lines[1] == "a,b"
        assert read_csv(path) == [{"a": "1", "b": "0.5"}, {"a": "2", "b": ""}]


class TestReplicates:
    """Test seed fan-out"""

    def test_children_in_order(self):
        results = run_replicates(_seeded_draw, 0.0, 3, 42)
        assert [r[0] for r in results] == [0, 1, 2]
        again = run_replicates(_seeded_draw, 0.0, 3, 42)
        assert results == again
        assert len({r[1] for r in results}) == 3

    @pytest.mark.slow
    def test_worker_count_does_not_change_results(self):
        serial = run_replicates(_seeded_draw, 1.0, 4, 5, threads=1)
        parallel = run_replicates(_seeded_draw, 1.0, 4, 5, threads=2)
        assert serial == parallel


class TestStatistics:
    """Test helpers behind the summary metrics"""

    def test_hetero_pairs(self):
        ring = build_two_scale_graph(LatticeSpec(d=1, N=3, extent=3))
        states = np.array([1, 0, 2, 0, 1, 0, 0, 2, 0], dtype=np.int8)
        # only the long edge 4 - 7 joins a 1 and a 2
        assert hetero_pairs(ring, states) == 1

    def test_branching_extinction(self):
        assert branching_extinction(1.0, 1.0, 1) == pytest.approx(0.5)
        assert branching_extinction(0.2, 1.0, 1) == 1.0

    def test_split_half_ks(self):
        stat, pvalue = split_half_ks([np.array([1.0, 2.0]), np.array([1.0, 2.0])])
        assert stat == 0.0
        assert pvalue == pytest.approx(1.0)
        assert split_half_ks([]) == (None, None)

    def test_lag_one_correlation(self):
        corr, pairs = lag_one_correlation([np.arange(5.0)])
        assert corr == pytest.approx(1.0)
        assert pairs == 4
        assert lag_one_correlation([np.zeros(1)]) == (None, 0)


class TestInclusionPairs:
    """Test one process run against an independent i.i.d. field"""

    @staticmethod
    def payload(eps):
        hierarchy = make_hierarchy(K=3, L=3)
        frozen = ModelParams(B1=0, B2=0, beta1=0, beta2=0, delta1=0, delta2=0)
        return single_patch_spec(1, hierarchy.N), frozen, hierarchy, None, 2, eps

    def test_open_field_escapes_a_frozen_block(self):
        outcome = _inclusion_replicate(0, np.random.SeedSequence(1), self.payload(0.0))
        # only the origin box stays good, and only on even levels
        assert outcome.good_counts == [1, 0, 1]
        assert outcome.wet_sizes == [1, 2, 1]
        assert outcome.induced_sizes == [1, 0, 0]
        assert outcome.included == [True, False, True]

    def test_closed_field_is_always_included(self):
        outcome = _inclusion_replicate(0, np.random.SeedSequence(1), self.payload(1.0))
        assert outcome.wet_sizes == [0, 0, 0]
        assert outcome.included == [True, True, True]

    def test_frequency_per_level(self):
        seed = np.random.SeedSequence(2)
        runs = [_inclusion_replicate(0, seed, self.payload(eps)) for eps in (0.0, 1.0)]
        assert inclusion_frequency(runs, 2) == [1.0, 0.5, 1.0]
        assert all(np.isnan(inclusion_frequency([], 1)))


class TestCommands:
    """Run each command on tiny configs"""

    def test_perc(self, tmp_path):
        summary = run_perc(config_from(PERC), tmp_path)
        assert summary.metrics["final_survival"] == [1.0, 0.0]
        assert summary.metrics["monotone_in_openness"]
        assert summary.metrics["coupling_implication"] == 1.0
        rows = read_csv(tmp_path / "perc_summary.csv")
        assert [r["final_survival"] for r in rows] == ["1", "0"]
        assert set(summary.files) == {
            "perc_survival.csv",
            "perc_summary.csv",
            "perc_tail.csv",
            "perc_coupling.csv",
        }

    def test_perc_reruns_are_identical(self, tmp_path):
        config = config_from(PERC.replace("exp.eps_grid = 0, 1", "exp.eps_grid = 0.3, 0.6"))
        run_perc(config, tmp_path / "a")
        run_perc(config, tmp_path / "b")
        for name in ("perc_survival.csv", "perc_tail.csv", "perc_coupling.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_simulate(self, tmp_path):
        summary = run_simulate(config_from(SIMULATE), tmp_path)
        assert (tmp_path / "snapshot_t0.5.txt").exists()
        assert (tmp_path / "snapshot_t1.txt").exists()
        assert not (tmp_path / "snapshot_t0.txt").exists()
        rows = read_csv(tmp_path / "density.csv")
        assert [r["t"] for r in rows] == ["0", "0.5", "1"]
        for r in rows:
            assert int(r["n_empty"]) + int(r["n_1"]) + int(r["n_2"]) == 36
        assert summary.metrics["vertices"] == 36

    def test_simulate_replicate_names(self, tmp_path):
        run_simulate(config_from(SIMULATE + "exp.replicates = 2\n"), tmp_path)
        assert (tmp_path / "rep001_snapshot_t1.txt").exists()
        assert len(read_csv(tmp_path / "density.csv")) == 6

    def test_extinction(self, tmp_path):
        summary = run_extinction(config_from(EXTINCTION), tmp_path)
        times = read_csv(tmp_path / "extinction_times.csv")
        assert len(times) == 10
        assert all(float(r["tau"]) <= 50.0 for r in times)
        assert len(read_csv(tmp_path / "extinction_summary.csv")) == 2
        assert summary.metrics["patch_sizes"] == [1, 3]
        assert summary.metrics["branching_extinction"] == 1.0

    @pytest.mark.slow
    def test_coexist(self, tmp_path):
        text = """
        exp.kind = coexist
        exp.N_grid = 3
        exp.beta_grid = 1
        exp.replicates = 2
        exp.t_max = 2
        graph.d = 1
        graph.extent = 3
        """
        summary = run_coexist(config_from(text), tmp_path)
        rows = read_csv(tmp_path / "coexist.csv")
        assert [r["N"] for r in rows] == ["1", "3"]
        assert len(read_csv(tmp_path / "coexist_runs.csv")) == 4
        assert len(read_csv(tmp_path / "survival.csv")) == 1
        assert "survival.csv" in summary.files

    @pytest.mark.slow
    def test_couple_goodness(self, tmp_path):
        text = """
        exp.kind = couple
        exp.K = 3
        exp.L = 3
        exp.levels = 2
        exp.replicates = 3
        exp.t_max = 30
        graph.d = 1
        params.variant = finite_volume
        params.beta2 = 2
        """
        summary = run_couple(config_from(text), tmp_path)
        goodness = read_csv(tmp_path / "goodness.csv")
        assert [r["geometry"] for r in goodness] == ["to_origin", "from_origin"]
        assert len(read_csv(tmp_path / "inclusion.csv")) == 9
        frequency = summary.metrics["inclusion_frequency"]
        assert len(frequency) == 3
        assert all(0.0 <= f <= 1.0 for f in frequency)
        assert 0.0 <= summary.metrics["eps_hat"] <= 1.0

    @pytest.mark.slow
    def test_couple_invasions(self, tmp_path):
        text = """
        exp.kind = couple
        exp.K = 3
        exp.replicates = 2
        exp.t_max = 20
        graph.d = 1
        graph.N = 3
        graph.extent = 3
        params.variant = modified
        """
        summary = run_couple(config_from(text), tmp_path)
        occupation = read_csv(tmp_path / "occupation.csv")
        # two patches, four blocks of length exp(1.5), two replicates
        assert len(occupation) == 16
        assert all(0.0 <= float(r["fraction"]) <= 1.0 for r in occupation)
        assert summary.metrics["occupation_threshold"] == pytest.approx(1 / 3)

    @pytest.mark.slow
    def test_dualstats(self, tmp_path):
        text = """
        exp.kind = dualstats
        exp.window = 6
        exp.horizon = 1
        exp.m = 1
        exp.n_trees = 4
        exp.dump = 1
        graph.d = 1
        graph.N = 3
        graph.extent = 3
        params.beta2 = 1.5
        params.B2 = 1.5
        """
        summary = run_dualstats(config_from(text), tmp_path)
        assert len(read_csv(tmp_path / "dual_trees.csv")) == 4
        assert (tmp_path / "events.tsv").exists()
        assert (tmp_path / "dualtree.tsv").exists()
        assert summary.metrics["type_oracle_agreement"] == 1.0
        assert not summary.metrics["degenerate_filter"]


class TestCli:
    """Test exit codes and the run registry through main()"""

    @pytest.fixture(autouse=True)
    def home(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TWOSCALE_HOME", str(tmp_path / "home"))
        return tmp_path / "home"

    def test_ok_run_writes_summary(self, tmp_path):
        config = write_config(tmp_path, PERC)
        out = tmp_path / "out"
        code = main(["perc", "--config", str(config), "--out", str(out), "--no-registry"])
        assert code == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert summary["command"] == "perc"
        assert summary["seed"] == 7
        assert "perc_survival.csv" in summary["files"]

    def test_seed_override(self, tmp_path):
        config = write_config(tmp_path, PERC)
        out = tmp_path / "out"
        args = ["perc", "--config", str(config), "--out", str(out), "--seed", "9"]
        assert main(args + ["--no-registry"]) == EXIT_OK
        assert read_csv(out / "perc_summary.csv")
        assert "seed=9" in (out / "perc_summary.csv").read_text().splitlines()[0]

    def test_config_error_exit_code(self, tmp_path, home):
        config = write_config(tmp_path, "exp.kind = perc\n")
        assert main(["perc", "--config", str(config), "--out", str(tmp_path / "o")]) == EXIT_CONFIG
        runs = RunDatabase(home / "twoscale.db").list_runs()
        assert runs[0].status == "config_error"

    def test_runtime_error_exit_code(self, tmp_path, home):
        text = SIMULATE + "init.kind = explicit\ninit.file = missing.txt\n"
        config = write_config(tmp_path, text)
        code = main(["simulate", "--config", str(config), "--out", str(tmp_path / "o")])
        assert code == EXIT_RUNTIME
        assert RunDatabase(home / "twoscale.db").list_runs()[0].status == "failed"

    def test_registry_and_history(self, tmp_path, home):
        config = write_config(tmp_path, PERC)
        assert main(["perc", "--config", str(config), "--out", str(tmp_path / "o")]) == EXIT_OK
        record = RunDatabase(home / "twoscale.db").list_runs()[0]
        assert record.status == "ok"
        assert record.get_summary()["metrics"]["monotone_in_openness"]
        assert main(["history", "--kind", "perc"]) == EXIT_OK


# Standalone test function for quick verification
def test_experiments_standalone(tmp_path):
    """Quick standalone test"""
    print("\n" + "=" * 70)
    print("🧪 Testing Experiment Commands")
    print("=" * 70 + "\n")

    summary = run_perc(config_from(PERC), tmp_path)
    print(f"📊 perc run {summary.config_hash[:12]}:")
    for name in summary.files:
        print(f"  • {name}")
    assert summary.metrics["monotone_in_openness"]

    print("\n" + "=" * 70)
    print("✅ All tests completed successfully!")
    print("=" * 70 + "\n")
