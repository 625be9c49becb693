"""Slot-level simulator for relay and network-coding schedules on a ring.

One server and n players sit on a cycle. The server holds a state update
every player needs; every player holds an update the server needs. Four
schedules move this traffic under broadcast, half-duplex, and collision
rules, and the package measures how many slots (T) and transmissions (L)
each one takes against closed-form predictions.
"""

from .analysis import (
    Bounds,
    CheckReport,
    arrival_order,
    bounds_for,
    check_run,
    comparison_table,
    nc_gain,
)
from .engine import (
    EmptyScheduleForObjective,
    IncompleteSchedule,
    NonDerivablePacket,
    Objective,
    RunResult,
    run,
    serialize_trace,
)
from .packets import CodedPacket, KnowledgeBase, packet_xor
from .protocols import PROTOCOLS, Rule, Schedule, build_schedule
from .topology import (
    RingTopology,
    build_cycle,
    check_partition,
    multicast_partition,
    partition,
)
from .validator import Violation, harmful_collisions, load_trace, validate_trace

__version__ = "1.0.0"

__all__ = [
    "Bounds",
    "CheckReport",
    "CodedPacket",
    "EmptyScheduleForObjective",
    "IncompleteSchedule",
    "KnowledgeBase",
    "NonDerivablePacket",
    "Objective",
    "PROTOCOLS",
    "RingTopology",
    "Rule",
    "RunResult",
    "Schedule",
    "Violation",
    "arrival_order",
    "bounds_for",
    "build_cycle",
    "build_schedule",
    "check_partition",
    "check_run",
    "comparison_table",
    "harmful_collisions",
    "load_trace",
    "multicast_partition",
    "nc_gain",
    "packet_xor",
    "partition",
    "run",
    "serialize_trace",
    "validate_trace",
    "__version__",
]
