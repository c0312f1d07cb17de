"""Configurations, rates and exact simulation of the two-scale process variants"""

from twoscale.process.models import (
    EMPTY,
    TYPE1,
    TYPE2,
    Configuration,
    InitKind,
    InitSpec,
    Labeling,
    ModelParams,
    Variant,
)
from twoscale.process.simulation import (
    Trajectory,
    initial_configuration,
    occupation_time,
    run_gillespie,
    transition_rates,
)
from twoscale.process.snapshots import read_snapshot, snapshot_text, write_snapshot

__all__ = [
    "EMPTY",
    "TYPE1",
    "TYPE2",
    "Configuration",
    "InitKind",
    "InitSpec",
    "Labeling",
    "ModelParams",
    "Trajectory",
    "Variant",
    "initial_configuration",
    "occupation_time",
    "read_snapshot",
    "run_gillespie",
    "snapshot_text",
    "transition_rates",
    "write_snapshot",
]
