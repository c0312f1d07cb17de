"""
Command-line entry point for the twoscale laboratory
File: src/twoscale/main.py
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from twoscale.config import Config, ConfigError
from twoscale.database.connection import RunDatabase
from twoscale.experiments import COMMANDS, RUNNERS, load_run_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def setup_logging(verbose: bool = False) -> None:
    """Configure application logging"""
    log_file = Config.get_log_dir() / Config.LOG_NAME

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.FileHandler(log_file), logging.StreamHandler(sys.stdout)],
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=Config.APP_NAME,
        description="Two-scale multitype contact process laboratory",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {Config.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", type=Path, required=True, help="run configuration file")
        cmd.add_argument("--seed", type=int, default=None, help="u64 seed (overrides exp.seed)")
        cmd.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        cmd.add_argument("--replicates", type=int, default=None)
        cmd.add_argument("--threads", type=int, default=None)
        cmd.add_argument("--verbose", action="store_true", help="debug logging")
        cmd.add_argument("--no-registry", action="store_true", help="do not record the run")
    history = sub.add_parser("history", help="list recorded runs")
    history.add_argument("--limit", type=int, default=20)
    history.add_argument("--kind", choices=COMMANDS, default=None)
    history.add_argument("--verbose", action="store_true")
    return parser


def show_history(limit: int, kind: Optional[str]) -> int:
    db = RunDatabase()
    if not db.initialize_database():
        print("❌ Run registry unavailable")
        return EXIT_RUNTIME
    runs = db.list_runs(limit=limit, command=kind)
    stats = db.get_database_stats()
    print("=" * 70)
    for run in runs:
        print(
            f"  • #{run.id} {run.command:<10} {run.status:<12} config={run.short_hash} "
            f"seed={run.seed} {run.started_at}"
        )
    print("=" * 70)
    print("📊 Registry Statistics:")
    print(f"  • Total runs: {stats['total_runs']}")
    for status, count in sorted(stats["by_status"].items()):
        print(f"  • {status}: {count}")
    print(f"  • Registry location: {db.db_path}")
    return EXIT_OK


def run_command(args: argparse.Namespace) -> int:
    """Load the config, run one experiment and record it"""
    logger = logging.getLogger(__name__)
    db = None if args.no_registry else RunDatabase()
    if db is not None and not db.initialize_database():
        db = None
    run_id = None

    try:
        overrides = {"seed": args.seed, "replicates": args.replicates, "threads": args.threads}
        config = load_run_config(args.config, overrides, kind=args.command)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"❌ Configuration error: {e}")
        if db is not None:
            run_id = db.record_run_start(args.command, "", args.seed or 0, args.out, args.config)
            db.record_run_finish(run_id, "config_error", error=str(e))
        return EXIT_CONFIG

    logger.info("=" * 70)
    logger.info(
        f"Starting {args.command} (twoscale v{Config.VERSION}, "
        f"config {config.config_hash[:12]}, seed {config.seed})"
    )
    logger.info("=" * 70)
    if db is not None:
        run_id = db.record_run_start(
            config.kind, config.config_hash, config.seed, args.out, args.config
        )

    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        summary = RUNNERS[config.kind](config, out_dir)
        summary.add_file(summary.write(out_dir), out_dir)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"❌ Configuration error: {e}")
        if db is not None:
            db.record_run_finish(run_id, "config_error", error=str(e))
        return EXIT_CONFIG
    except Exception as e:
        logger.exception(f"Run failed: {e}")
        print(f"❌ Run failed: {e}")
        if db is not None:
            db.record_run_finish(run_id, "failed", error=str(e))
        return EXIT_RUNTIME

    if db is not None:
        db.record_run_finish(run_id, "ok", summary.to_dict(), [out_dir / f for f in summary.files])
    print(f"✅ {config.kind} finished, outputs in {out_dir}")
    print("📊 Files:")
    for name in summary.files:
        print(f"  • {name}")
    print("=" * 70)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main application function"""
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    logger = logging.getLogger(__name__)

    try:
        if args.command == "history":
            return show_history(args.limit, args.kind)
        return run_command(args)
    except Exception as e:
        logger.exception(f"Fatal error: {e}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
