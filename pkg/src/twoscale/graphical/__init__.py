"""Harris graphical representation: mark generation, forward replay and dual sets"""

from twoscale.graphical.events import (
    ARROW,
    BOTH,
    DEATH,
    DOT,
    ONLY1,
    ONLY2,
    EventLog,
    SpaceTimePoint,
    generate_events,
)
from twoscale.graphical.replay import (
    dual_extinction_time,
    dual_set,
    dual_survives,
    replay,
    state_at,
)

__all__ = [
    "ARROW",
    "BOTH",
    "DEATH",
    "DOT",
    "ONLY1",
    "ONLY2",
    "EventLog",
    "SpaceTimePoint",
    "dual_extinction_time",
    "dual_set",
    "dual_survives",
    "generate_events",
    "replay",
    "state_at",
]
