"""
Tests for the run registry
File: tests/test_database.py
Run with: python -m pytest tests/test_database.py -v
"""
import pytest
from pathlib import Path
import sys

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from twoscale.database.connection import RunDatabase
from twoscale.database.models import RunRecord


class TestRunDatabase:
    """Test run registry functionality"""

    @pytest.fixture
    def db_manager(self, tmp_path):
        """Create a temporary registry for testing"""
        # Override database path for testing
        import twoscale.config as config

        original_path = config.Config.get_database_path
        config.Config.get_database_path = lambda: tmp_path / "test.db"

        db = RunDatabase()
        db.initialize_database()

        yield db

        # Restore original path
        config.Config.get_database_path = original_path

    def test_database_initialization(self, db_manager):
        """Test that the registry initializes empty"""
        assert db_manager.db_path.exists()
        stats = db_manager.get_database_stats()
        assert stats["total_runs"] == 0
        assert stats["total_files"] == 0
        assert stats["database_size"] > 0

    def test_run_lifecycle(self, db_manager, tmp_path):
        """A run goes from running to ok with its summary and files"""
        run_id = db_manager.record_run_start("perc", "ab" * 32, 7, tmp_path, tmp_path / "p.conf")
        assert run_id is not None

        record = db_manager.get_run(run_id)
        assert record.status == "running"
        assert record.seed == 7
        assert record.finished_at is None

        files = [tmp_path / "perc_survival.csv", tmp_path / "summary.json"]
        assert db_manager.record_run_finish(run_id, "ok", {"levels": 10}, files)

        record = db_manager.get_run(run_id)
        assert record.status == "ok"
        assert record.get_summary() == {"levels": 10}
        assert record.files == [str(p) for p in files]
        assert record.finished_at is not None

    def test_large_seed_round_trip(self, db_manager):
        """Seeds up to 2^64 - 1 survive storage"""
        seed = 2**64 - 1
        run_id = db_manager.record_run_start("simulate", "00" * 32, seed)
        assert db_manager.get_run(run_id).seed == seed

    def test_failed_and_config_error_runs(self, db_manager):
        """Error statuses keep the message"""
        a = db_manager.record_run_start("couple", "11" * 32, 1)
        b = db_manager.record_run_start("couple", "", 1)
        assert db_manager.record_run_finish(a, "failed", error="boom")
        assert db_manager.record_run_finish(b, "config_error", error="bad key")

        stats = db_manager.get_database_stats()
        assert stats["by_status"] == {"failed": 1, "config_error": 1}
        assert db_manager.get_run(a).error == "boom"

    def test_unknown_status_rejected(self, db_manager):
        """Unknown statuses are refused without raising"""
        run_id = db_manager.record_run_start("perc", "22" * 32, 0)
        assert not db_manager.record_run_finish(run_id, "done")
        assert not db_manager.record_run_finish(None, "ok")
        assert db_manager.get_run(run_id).status == "running"

    def test_finish_unknown_run(self, db_manager, tmp_path):
        """Finishing an id that was never started writes nothing"""
        assert not db_manager.record_run_finish(999, "ok", {}, [tmp_path / "x.csv"])
        stats = db_manager.get_database_stats()
        assert stats["total_runs"] == 0
        assert stats["total_files"] == 0

    def test_deleting_a_run_drops_its_files(self, db_manager, tmp_path):
        """File rows cascade with their run"""
        run_id = db_manager.record_run_start("perc", "33" * 32, 0)
        assert db_manager.record_run_finish(run_id, "ok", {}, [tmp_path / "a.csv"])
        assert db_manager.get_database_stats()["total_files"] == 1

        with db_manager.get_connection() as conn:
            conn.execute("DELETE FROM runs WHERE id = ?", (run_id,))
        assert db_manager.get_database_stats()["total_files"] == 0

    def test_list_runs_filters(self, db_manager):
        """Most recent first, filtered by command or hash prefix"""
        db_manager.record_run_start("perc", "aa" * 32, 1)
        db_manager.record_run_start("simulate", "bb" * 32, 2)
        db_manager.record_run_start("perc", "cc" * 32, 3)

        runs = db_manager.list_runs()
        assert [r.seed for r in runs] == [3, 2, 1]
        assert [r.seed for r in db_manager.list_runs(command="perc")] == [3, 1]
        assert [r.seed for r in db_manager.list_runs(config_hash="bbbb")] == [2]
        assert len(db_manager.list_runs(limit=1)) == 1

    def test_missing_run(self, db_manager):
        """Unknown ids give None"""
        assert db_manager.get_run(12345) is None

    def test_broken_registry_never_raises(self, tmp_path):
        """A registry path that cannot be opened only logs"""
        db = RunDatabase(tmp_path / "missing" / "dir" / "x.db")
        assert db.record_run_start("perc", "aa", 0) is None
        assert db.list_runs() == []
        assert db.get_database_stats()["total_runs"] == 0


class TestRunRecord:
    """Test the registry row model"""

    def test_from_dict_defaults(self):
        record = RunRecord.from_dict({"id": 3, "command": "perc", "config_hash": "f" * 64})
        assert record.status == "running"
        assert record.seed == 0
        assert record.files == []
        assert record.get_summary() == {}
        assert record.short_hash == "f" * 12


# Standalone test function for quick verification
def test_database_standalone(tmp_path):
    """Quick standalone test"""
    print("\n" + "=" * 70)
    print("🧪 Testing Run Registry")
    print("=" * 70 + "\n")

    db = RunDatabase(tmp_path / "standalone.db")
    print(f"📁 Registry path: {db.db_path}")

    assert db.initialize_database()
    print("✅ Registry initialized successfully\n")

    run_id = db.record_run_start("simulate", "ab" * 32, 42)
    db.record_run_finish(run_id, "ok", {"replicates": 1})

    print("📊 Registry Statistics:")
    stats = db.get_database_stats()
    print(f"  • Total runs: {stats['total_runs']}")
    print(f"  • Database size: {stats['database_size']:,} bytes\n")
    assert stats["total_runs"] == 1

    print("=" * 70)
    print("✅ All tests completed successfully!")
    print("=" * 70 + "\n")
