"""
Run configuration files
File: src/twoscale/experiments/runconfig.py

Flat `key = value` text with `#` comments. Keys are namespaced graph.*,
params.*, init.* and exp.*. The config hash is a SHA-256 over the sorted,
normalized listing of every key except exp.seed and exp.threads, which do not
change what a run computes.
"""
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

from twoscale.config import Config, ConfigError
from twoscale.lattice.graph import LatticeSpec
from twoscale.process.models import InitSpec, ModelParams, Variant

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "extinction", "couple", "coexist", "dualstats", "perc")

GRAPH_KEYS = {"d", "N", "extent", "boundary"}
PARAM_KEYS = {"B1", "B2", "beta1", "beta2", "delta1", "delta2", "variant", "labeling"}
INIT_KEYS = {"kind", "p0", "p1", "p2", "patch", "z", "vertices", "fill", "file", "path"}
EXP_KEYS = {
    "kind",
    "seed",
    "replicates",
    "threads",
    "t_max",
    "sample_times",
    "K",
    "L",
    "K_grid",
    "L_grid",
    "N_grid",
    "delta1_grid",
    "beta_grid",
    "c",
    "cap",
    "J",
    "levels",
    "eps",
    "eps_grid",
    "m_grid",
    "horizon",
    "m",
    "window",
    "n_trees",
    "quick_cutoff",
    "long_cutoff",
    "sub_box_side",
    "dump",
    "pairs",
}
UNHASHED_KEYS = {"exp.seed", "exp.threads"}


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """Parse `key = value` lines into a flat dictionary"""
    data: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key in data:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key}")
        data[key] = value.strip()
    return data


def _normalize(value: str) -> str:
    return " ".join(value.split())


def config_hash(flat: Mapping[str, str]) -> str:
    """SHA-256 of the canonical key listing"""
    listing = "".join(
        f"{key}={_normalize(flat[key])}\n" for key in sorted(flat) if key not in UNHASHED_KEYS
    )
    return hashlib.sha256(listing.encode("utf-8")).hexdigest()


def _section(flat: Mapping[str, str], prefix: str, known: set) -> Dict[str, str]:
    out = {}
    for key, value in flat.items():
        if not key.startswith(prefix + "."):
            continue
        name = key[len(prefix) + 1 :]
        if name not in known:
            raise ConfigError(f"unknown key {key}")
        out[name] = value
    return out


def _floats(text: str) -> List[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


@dataclass
class RunConfig:
    """Validated run configuration"""

    kind: str
    graph: LatticeSpec
    params: ModelParams
    init: InitSpec
    seed: int = 0
    replicates: int = Config.DEFAULT_REPLICATES
    threads: int = Config.DEFAULT_THREADS
    t_max: float = Config.DEFAULT_T_MAX
    sample_times: Tuple[float, ...] = ()
    knobs: Dict[str, str] = field(default_factory=dict)
    flat: Dict[str, str] = field(default_factory=dict)
    path: Optional[Path] = None

    @property
    def config_hash(self) -> str:
        return config_hash(self.flat)

    def has(self, name: str) -> bool:
        return name in self.knobs and self.knobs[name] != ""

    def knob_float(self, name: str, default: Optional[float] = None) -> float:
        if not self.has(name):
            if default is None:
                raise ConfigError(f"{self.kind} needs exp.{name}")
            return float(default)
        try:
            return float(self.knobs[name])
        except ValueError as e:
            raise ConfigError(f"exp.{name} must be a number, got {self.knobs[name]!r}") from e

    def knob_int(self, name: str, default: Optional[int] = None) -> int:
        value = self.knob_float(name, None if default is None else float(default))
        if value != int(value):
            raise ConfigError(f"exp.{name} must be an integer, got {value}")
        return int(value)

    def knob_floats(self, name: str, default: Optional[List[float]] = None) -> List[float]:
        if not self.has(name):
            if default is None:
                raise ConfigError(f"{self.kind} needs exp.{name}")
            return list(default)
        try:
            return _floats(self.knobs[name])
        except ValueError as e:
            raise ConfigError(f"exp.{name} must be a number list, got {self.knobs[name]!r}") from e

    def knob_ints(self, name: str, default: Optional[List[int]] = None) -> List[int]:
        values = self.knob_floats(name, None if default is None else [float(v) for v in default])
        if any(v != int(v) for v in values):
            raise ConfigError(f"exp.{name} must list integers, got {self.knobs[name]!r}")
        return [int(v) for v in values]

    def knob_bool(self, name: str, default: bool = False) -> bool:
        if not self.has(name):
            return default
        return self.knobs[name].lower() in ("1", "true", "yes", "on")

    def with_overrides(self, **changes: Any) -> "RunConfig":
        flat = dict(self.flat)
        for key, value in changes.items():
            if value is not None:
                flat[f"exp.{key}"] = str(value)
        return RunConfig.from_dict(flat, path=self.path)

    @classmethod
    def from_dict(cls, flat: Mapping[str, str], path: Optional[Path] = None) -> "RunConfig":
        """Create a RunConfig from a flat key dictionary"""
        flat = dict(flat)
        for key in flat:
            if key.split(".", 1)[0] not in ("graph", "params", "init", "exp"):
                raise ConfigError(f"unknown key {key}")
        exp = _section(flat, "exp", EXP_KEYS)
        kind = exp.pop("kind", "")
        if kind not in COMMANDS:
            raise ConfigError(f"exp.kind must be one of {', '.join(COMMANDS)}, got {kind!r}")
        try:
            graph = LatticeSpec.from_dict(_section(flat, "graph", GRAPH_KEYS))
            params = ModelParams.from_dict(_section(flat, "params", PARAM_KEYS))
            init = InitSpec.from_dict(_section(flat, "init", INIT_KEYS))
            seed = int(exp.pop("seed", "0"))
            replicates = int(exp.pop("replicates", str(Config.DEFAULT_REPLICATES)))
            threads = int(exp.pop("threads", str(Config.DEFAULT_THREADS)))
            t_max = float(exp.pop("t_max", str(Config.DEFAULT_T_MAX)))
            sample_times = tuple(_floats(exp.pop("sample_times", "")))
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if seed < 0 or seed >= 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
        if replicates < 1 or threads < 1:
            raise ConfigError("replicates and threads must be >= 1")
        if t_max <= 0:
            raise ConfigError(f"t_max must be positive, got {t_max}")
        if any(t < 0 or t > t_max for t in sample_times):
            raise ConfigError(f"sample times must lie in [0, {t_max}]")
        config = cls(
            kind=kind,
            graph=graph,
            params=params,
            init=init,
            seed=seed,
            replicates=replicates,
            threads=threads,
            t_max=t_max,
            sample_times=sample_times,
            knobs=exp,
            flat=flat,
            path=path,
        )
        config.validate()
        return config

    def validate(self) -> None:
        """Check the knobs needed by the chosen experiment"""
        params = self.params
        if self.kind == "extinction":
            if params.variant is not Variant.FINITE_VOLUME:
                raise ConfigError("extinction runs need params.variant = finite_volume")
            if not params.beta2 > params.beta1:
                raise ConfigError("extinction runs need beta2 > beta1")
            if not (self.has("N_grid") or (self.has("K_grid") and self.has("L"))):
                raise ConfigError("extinction runs need exp.N_grid or exp.K_grid with exp.L")
        elif self.kind == "couple":
            K = self.knob_int("K")
            if params.variant is Variant.FINITE_VOLUME:
                if not (self.has("L_grid") or self.has("L")):
                    raise ConfigError("couple runs need exp.L or exp.L_grid")
                if K < 3:
                    raise ConfigError(f"block goodness needs neighboring boxes, K >= 3, got {K}")
            elif params.variant is not Variant.MODIFIED:
                raise ConfigError("couple runs need params.variant = finite_volume or modified")
        elif self.kind == "coexist":
            self.knob_ints("N_grid")
        elif self.kind == "dualstats":
            if not params.equal_deaths:
                raise ConfigError("dualstats needs equal death rates (delta1 = delta2)")
            if params.variant is Variant.MODIFIED:
                raise ConfigError("dualstats does not support the modified variant")
        elif self.kind == "perc":
            if not (self.has("eps") or self.has("eps_grid")):
                raise ConfigError("perc runs need exp.eps or exp.eps_grid")
        for name in ("K", "L"):
            if self.has(name) and self.knob_int(name) % 2 == 0:
                raise ConfigError(f"exp.{name} must be odd, got {self.knobs[name]}")
        for name in ("K_grid", "L_grid", "N_grid"):
            if self.has(name) and any(v < 1 or v % 2 == 0 for v in self.knob_ints(name)):
                raise ConfigError(f"exp.{name} must list odd positive integers")


def load_run_config(
    path: Path, overrides: Optional[Mapping[str, Any]] = None, kind: Optional[str] = None
) -> RunConfig:
    """Read a config file and apply CLI overrides (exp.seed, exp.replicates, ...)"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    flat = parse_config_text(text, str(path))
    if kind is not None:
        declared = flat.get("exp.kind")
        if declared and declared != kind:
            raise ConfigError(f"{path} is a {declared} config, not {kind}")
        flat["exp.kind"] = kind
    for key, value in (overrides or {}).items():
        if value is not None:
            flat[f"exp.{key}"] = str(value)
    config = RunConfig.from_dict(flat, path=path)
    logger.debug(f"loaded {config.kind} config {path} (hash {config.config_hash[:12]})")
    return config
