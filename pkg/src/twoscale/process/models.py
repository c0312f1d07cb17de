"""
Rates, configurations and initial-condition specs of the two-scale process
File: src/twoscale/process/models.py
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from twoscale.config import Config
from twoscale.lattice.graph import Boundary, TwoScaleGraph

EMPTY, TYPE1, TYPE2 = 0, 1, 2


class Variant(str, Enum):
    """Process variant"""

    PLAIN = "plain"
    FINITE_VOLUME = "finite_volume"
    MODIFIED = "modified"

    @property
    def code(self) -> int:
        return {"plain": 0, "finite_volume": 1, "modified": 2}[self.value]


class Labeling(str, Enum):
    """How unequal rates are split into labeled Poisson marks"""

    GENERALIZED = "generalized"
    EXACT = "exact"


@dataclass(frozen=True)
class ModelParams:
    """Six rates of the two-type process plus the variant flags"""

    B1: float = 1.0
    B2: float = 1.0
    beta1: float = 1.0
    beta2: float = 1.0
    delta1: float = 1.0
    delta2: float = 1.0
    variant: Variant = Variant.PLAIN
    labeling: Labeling = Labeling.GENERALIZED

    def __post_init__(self) -> None:
        for name in ("B1", "B2", "beta1", "beta2", "delta1", "delta2"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"rate {name} must be finite and >= 0, got {value}")
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "labeling", Labeling(self.labeling))

    @property
    def equal_deaths(self) -> bool:
        return self.delta1 == self.delta2

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.B1, self.B2, self.beta1, self.beta2, self.delta1, self.delta2], dtype=np.float64
        )

    def spontaneous_rate(self, d: int) -> float:
        """Rate 2d*B1 of spontaneous type-1 births at a center"""
        return 2.0 * d * self.B1

    def with_rates(self, **changes: Any) -> "ModelParams":
        data = self.to_dict()
        data.update(changes)
        return ModelParams.from_dict(data)

    def check_graph(self, graph: TwoScaleGraph) -> None:
        """Reject variant/graph combinations that have no meaning"""
        if self.variant is Variant.FINITE_VOLUME:
            spec = graph.spec
            if spec.extent != 1 or spec.boundary is not Boundary.KILLING:
                raise ValueError(
                    "finite_volume variant needs a single-patch graph with killing boundary, "
                    f"got extent={spec.extent} boundary={spec.boundary.value}"
                )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "B1": self.B1,
            "B2": self.B2,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "variant": self.variant.value,
            "labeling": self.labeling.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ModelParams":
        """Create ModelParams from a dictionary"""
        return cls(
            B1=float(data.get("B1", 1.0)),
            B2=float(data.get("B2", 1.0)),
            beta1=float(data.get("beta1", 1.0)),
            beta2=float(data.get("beta2", 1.0)),
            delta1=float(data.get("delta1", 1.0)),
            delta2=float(data.get("delta2", 1.0)),
            variant=Variant(data.get("variant", Variant.PLAIN.value)),
            labeling=Labeling(data.get("labeling", Labeling.GENERALIZED.value)),
        )


@dataclass
class Configuration:
    """State in {0, 1, 2} for every vertex, at a given time"""

    states: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        self.states = np.asarray(self.states, dtype=np.int8)
        if self.states.ndim != 1:
            raise ValueError("configuration states must be a flat vector")
        if self.states.size and (self.states.min() < 0 or self.states.max() > 2):
            raise ValueError("configuration states must lie in {0, 1, 2}")

    def check_graph(self, graph: TwoScaleGraph) -> None:
        if self.states.shape[0] != graph.n_vertices:
            raise ValueError(
                f"configuration has {self.states.shape[0]} sites, graph has {graph.n_vertices}"
            )

    def counts(self) -> Tuple[int, int, int]:
        c = np.bincount(self.states, minlength=3)
        return int(c[0]), int(c[1]), int(c[2])

    def copy(self) -> "Configuration":
        return Configuration(self.states.copy(), self.time)

    @classmethod
    def empty(cls, graph: TwoScaleGraph) -> "Configuration":
        return cls(np.zeros(graph.n_vertices, dtype=np.int8))


class InitKind(str, Enum):
    """Initial-condition families"""

    PRODUCT = "product"
    SINGLE2_AT_CENTER = "single2_at_center"
    ALL1_EXCEPT = "all1_except"
    EXPLICIT = "explicit"
    GOOD_BLOCK = "good_block"


@dataclass(frozen=True)
class InitSpec:
    """Recipe for an initial configuration.

    product: iid states with weights (p0, p1, p2)
    single2_at_center: one 2 at the center of patch `patch`, all else empty
    all1_except: all 1 except `vertices`, which take `fill` (default 2)
    explicit: states read from a snapshot file at `path`
    good_block: one 2 per D-box of B_z minus the core for z = `patch`
        (centered mesoscopic coordinates), the rest of B_z empty, everything
        else `fill` (default 1)
    """

    kind: InitKind = InitKind.PRODUCT
    p0: float = Config.DEFAULT_PRODUCT_WEIGHTS[0]
    p1: float = Config.DEFAULT_PRODUCT_WEIGHTS[1]
    p2: float = Config.DEFAULT_PRODUCT_WEIGHTS[2]
    patch: Tuple[int, ...] = ()
    vertices: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)
    fill: Optional[int] = None
    path: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", InitKind(self.kind))
        if self.kind is InitKind.PRODUCT:
            weights = (self.p0, self.p1, self.p2)
            if min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-9:
                raise ValueError(f"product weights must be >= 0 and sum to 1, got {weights}")
        if self.fill is not None and self.fill not in (EMPTY, TYPE1, TYPE2):
            raise ValueError(f"fill state must be 0, 1 or 2, got {self.fill}")
        if self.kind is InitKind.EXPLICIT and not self.path:
            raise ValueError("explicit initial configuration needs a file path")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InitSpec":
        """Create an InitSpec from a dictionary of config strings or values"""
        defaults = Config.DEFAULT_PRODUCT_WEIGHTS
        fill = data.get("fill")
        return cls(
            kind=InitKind(data.get("kind", InitKind.PRODUCT.value)),
            p0=float(data.get("p0", defaults[0])),
            p1=float(data.get("p1", defaults[1])),
            p2=float(data.get("p2", defaults[2])),
            patch=_parse_point(data.get("patch", data.get("z", ()))),
            vertices=_parse_points(data.get("vertices", ())),
            fill=None if fill in (None, "") else int(fill),
            path=data.get("file", data.get("path")),
        )


def _parse_point(value: Any) -> Tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if isinstance(value, (int, np.integer)):
        return (int(value),)
    return tuple(int(v) for v in value)


def _parse_points(value: Any) -> Tuple[Tuple[int, ...], ...]:
    if isinstance(value, str):
        value = [v for v in value.split(";") if v.strip()]
    return tuple(_parse_point(v) for v in value)
