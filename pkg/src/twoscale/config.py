"""
Configuration management for the twoscale laboratory
File: src/twoscale/config.py
"""
from pathlib import Path
import sys
import os


class ConfigError(ValueError):
    """Raised for bad or inconsistent run configurations"""


class HorizonError(ValueError):
    """Raised when a query reaches beyond the simulated time range"""


class Config:
    """Application configuration manager"""

    # Version
    VERSION = "1.0.0"

    # Application metadata
    APP_NAME = "twoscale"
    ORGANIZATION = "twoscale"

    # Run registry
    DATABASE_NAME = "twoscale.db"
    LOG_NAME = "twoscale.log"
    HOME_ENV = "TWOSCALE_HOME"

    # Initial configuration used when a run config does not name one.
    # The product weights are an assumption for coexistence snapshot runs.
    DEFAULT_PRODUCT_WEIGHTS = (0.5, 0.25, 0.25)

    # Experiment knobs
    DEFAULT_T_MAX = 2000.0
    DEFAULT_REPLICATES = 1
    DEFAULT_THREADS = 1
    DEFAULT_REPOSITION_M = 10.0
    DEFAULT_DUAL_HORIZON = 20.0
    DEFAULT_DUAL_WINDOW = 60.0
    DEFAULT_BLOCK_C = 0.5
    DEFAULT_BLOCK_CAP = 200.0
    DEFAULT_PERC_LEVELS = 100
    DEFAULT_QUICK_CUTOFF = 10.0
    DEFAULT_LONG_CUTOFF = 100.0
    DEFAULT_COUPLE_LEVELS = 10
    DEFAULT_TAIL_M = (1, 2, 4, 8, 16)
    DEFAULT_RADIUS_POINTS = 8

    @staticmethod
    def get_user_data_dir() -> Path:
        """Get user data directory for the application"""
        override = os.environ.get(Config.HOME_ENV)
        if override:
            app_dir = Path(override)
        else:
            if sys.platform == "win32":
                base_dir = Path(os.environ.get("APPDATA", Path.home()))
            elif sys.platform == "darwin":
                base_dir = Path.home() / "Library" / "Application Support"
            else:
                base_dir = Path(os.environ.get("XDG_DATA_HOME", Path.home() / ".local" / "share"))
            app_dir = base_dir / "twoscale"

        app_dir.mkdir(parents=True, exist_ok=True)
        return app_dir

    @staticmethod
    def get_database_path() -> Path:
        """Get path to the SQLite run registry"""
        return Config.get_user_data_dir() / Config.DATABASE_NAME

    @staticmethod
    def get_log_dir() -> Path:
        """Get log directory path"""
        log_dir = Config.get_user_data_dir() / "logs"
        log_dir.mkdir(parents=True, exist_ok=True)
        return log_dir
