"""
Output files of the experiment commands
File: src/twoscale/experiments/outputs.py

Every CSV starts with a `# twoscale v<version> config=<hash> seed=<seed>`
comment, then a header row. Floats are written with 10 significant digits
and LF line endings, so reruns with the same config and seed are
byte-identical.
"""
import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from twoscale.config import Config
from twoscale.experiments.runconfig import RunConfig

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """Canonical text of a CSV cell"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.10g}"
    return str(value)


def echo_line(config: RunConfig) -> str:
    return f"# {Config.APP_NAME} v{Config.VERSION} config={config.config_hash} seed={config.seed}"


def write_csv(
    path: Path, config: RunConfig, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    """Write one CSV with the config echo line"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(echo_line(config) + "\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.info(f"Wrote {path.name} ({count} rows)")
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Rows of a CSV written by write_csv, echo line skipped"""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    return list(csv.DictReader(lines))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_value(value)
    return value


@dataclass
class RunSummary:
    """Metadata and headline statistics of one command run"""

    command: str
    config_hash: str
    seed: int
    version: str = Config.VERSION
    metrics: Dict[str, Any] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)

    @classmethod
    def for_config(cls, config: RunConfig) -> "RunSummary":
        return cls(command=config.kind, config_hash=config.config_hash, seed=config.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "version": self.version,
            "metrics": _jsonable(self.metrics),
            "files": list(self.files),
        }

    def add_file(self, path: Path, out_dir: Optional[Path] = None) -> None:
        path = Path(path)
        self.files.append(str(path.relative_to(out_dir)) if out_dir else path.name)

    def write(self, out_dir: Path) -> Path:
        """Write summary.json"""
        path = Path(out_dir) / "summary.json"
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")
        logger.info(f"Wrote {path.name}")
        return path
