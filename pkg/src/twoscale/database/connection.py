"""
Run registry connection manager
File: src/twoscale/database/connection.py

Every method catches its own failures and reports them through the log and
its return value, so a broken registry never fails an experiment.
"""
import json
import logging
import sqlite3
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from twoscale.config import Config
from twoscale.database.models import RunRecord
from twoscale.database.schema import RUN_STATUSES, SCHEMA

logger = logging.getLogger(__name__)


class RunDatabase:
    """Records CLI runs in an SQLite file"""

    def __init__(self, db_path: Optional[Path] = None):
        self.db_path = Path(db_path) if db_path is not None else Config.get_database_path()
        logger.debug(f"Run registry initialized with path: {self.db_path}")

    @contextmanager
    def get_connection(self):
        """Context manager for database connections"""
        conn = sqlite3.connect(str(self.db_path))
        conn.row_factory = sqlite3.Row  # Enable column access by name
        conn.execute("PRAGMA foreign_keys = ON")
        try:
            yield conn
            conn.commit()
        except Exception as e:
            conn.rollback()
            logger.error(f"Database error: {e}")
            raise
        finally:
            conn.close()

    def initialize_database(self) -> bool:
        """Create the registry tables if needed"""
        try:
            self.db_path.parent.mkdir(parents=True, exist_ok=True)
            with self.get_connection() as conn:
                conn.executescript(SCHEMA)
            return True
        except Exception as e:
            logger.error(f"Failed to initialize run registry: {e}", exc_info=True)
            return False

    def record_run_start(
        self,
        command: str,
        config_hash: str,
        seed: int,
        out_dir: Optional[Path] = None,
        config_path: Optional[Path] = None,
    ) -> Optional[int]:
        """Insert a running row, returning its id"""
        try:
            with self.get_connection() as conn:
                cursor = conn.cursor()
                cursor.execute(
                    """
                    INSERT INTO runs (command, config_path, config_hash, seed, version, out_dir)
                    VALUES (?, ?, ?, ?, ?, ?)
                    """,
                    (
                        command,
                        str(config_path) if config_path else None,
                        config_hash,
                        str(int(seed)),
                        Config.VERSION,
                        str(out_dir) if out_dir else None,
                    ),
                )
                return int(cursor.lastrowid)
        except Exception as e:
            logger.error(f"Failed to record run start: {e}")
            return None

    def record_run_finish(
        self,
        run_id: Optional[int],
        status: str,
        summary: Optional[Dict[str, Any]] = None,
        files: Sequence[Path] = (),
        error: Optional[str] = None,
    ) -> bool:
        """Close a run row with its status, JSON summary and written files"""
        if run_id is None:
            return False
        if status not in RUN_STATUSES:
            logger.error(f"Unknown run status: {status}")
            return False
        try:
            with self.get_connection() as conn:
                cursor = conn.cursor()
                cursor.execute(
                    """
                    UPDATE runs
                    SET status = ?, summary = ?, error = ?, finished_at = CURRENT_TIMESTAMP
                    WHERE id = ?
                    """,
                    (
                        status,
                        json.dumps(summary, sort_keys=True) if summary is not None else None,
                        error,
                        run_id,
                    ),
                )
                if cursor.rowcount != 1:
                    logger.warning(f"No run with id {run_id} to finish")
                    return False
                cursor.executemany(
                    "INSERT INTO run_files (run_id, path) VALUES (?, ?)",
                    [(run_id, str(p)) for p in files],
                )
                return True
        except Exception as e:
            logger.error(f"Failed to record run finish: {e}")
            return False

    def get_run(self, run_id: int) -> Optional[RunRecord]:
        """Get one run with its file list"""
        try:
            with self.get_connection() as conn:
                cursor = conn.cursor()
                cursor.execute("SELECT * FROM runs WHERE id = ?", (run_id,))
                row = cursor.fetchone()
                if row is None:
                    return None
                data = dict(row)
                cursor.execute(
                    "SELECT path FROM run_files WHERE run_id = ? ORDER BY id", (run_id,)
                )
                data["files"] = [r["path"] for r in cursor.fetchall()]
                return RunRecord.from_dict(data)
        except Exception as e:
            logger.error(f"Failed to get run {run_id}: {e}")
            return None

    def list_runs(
        self, limit: int = 20, command: Optional[str] = None, config_hash: Optional[str] = None
    ) -> List[RunRecord]:
        """Most recent runs first, optionally filtered"""
        try:
            with self.get_connection() as conn:
                cursor = conn.cursor()
                query = "SELECT * FROM runs WHERE 1 = 1"
                args: List[Any] = []
                if command:
                    query += " AND command = ?"
                    args.append(command)
                if config_hash:
                    query += " AND config_hash LIKE ?"
                    args.append(f"{config_hash}%")
                query += " ORDER BY id DESC LIMIT ?"
                args.append(limit)
                cursor.execute(query, args)
                return [RunRecord.from_dict(dict(row)) for row in cursor.fetchall()]
        except Exception as e:
            logger.error(f"Failed to list runs: {e}")
            return []

    def get_database_stats(self) -> Dict[str, Any]:
        """Get registry statistics"""
        try:
            with self.get_connection() as conn:
                cursor = conn.cursor()
                stats: Dict[str, Any] = {}

                cursor.execute("SELECT COUNT(*) as count FROM runs")
                stats["total_runs"] = cursor.fetchone()["count"]

                cursor.execute("SELECT status, COUNT(*) as count FROM runs GROUP BY status")
                stats["by_status"] = {row["status"]: row["count"] for row in cursor.fetchall()}

                cursor.execute("SELECT COUNT(*) as count FROM run_files")
                stats["total_files"] = cursor.fetchone()["count"]

                stats["database_size"] = (
                    self.db_path.stat().st_size if self.db_path.exists() else 0
                )
                return stats
        except Exception as e:
            logger.error(f"Failed to get database stats: {e}")
            return {"total_runs": 0, "by_status": {}, "total_files": 0, "database_size": 0}
