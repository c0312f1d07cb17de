"""
Database schema definitions for the run registry
File: src/twoscale/database/schema.py
"""

# SQL schema for creating all registry tables
SCHEMA = """
-- One row per CLI invocation
CREATE TABLE IF NOT EXISTS runs (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    command TEXT NOT NULL,
    config_path TEXT,
    config_hash TEXT NOT NULL,
    seed TEXT NOT NULL,
    version TEXT NOT NULL,
    out_dir TEXT,
    status TEXT NOT NULL DEFAULT 'running',
    summary TEXT,
    error TEXT,
    started_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
    finished_at TIMESTAMP
);

-- Output files written by a run
CREATE TABLE IF NOT EXISTS run_files (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id INTEGER NOT NULL,
    path TEXT NOT NULL,
    FOREIGN KEY (run_id) REFERENCES runs(id) ON DELETE CASCADE
);

-- Indexes for fast lookups
CREATE INDEX IF NOT EXISTS idx_runs_hash ON runs(config_hash);
CREATE INDEX IF NOT EXISTS idx_runs_command ON runs(command);
CREATE INDEX IF NOT EXISTS idx_run_files_run ON run_files(run_id);
"""

RUN_STATUSES = ("running", "ok", "config_error", "failed")
