"""Discrete-event network simulation: scenarios, mobility, radio, traffic and traces."""

from .engine import EventKind, EventQueue, Simulation, SimulationResult, run
from .scenario import Flow, Move, Scenario, make_scenario
from .trace import TraceEvent, TraceRecord, read_trace, trace_digest, write_trace

__all__ = [
    "EventKind",
    "EventQueue",
    "Flow",
    "Move",
    "Scenario",
    "Simulation",
    "SimulationResult",
    "TraceEvent",
    "TraceRecord",
    "make_scenario",
    "read_trace",
    "run",
    "trace_digest",
    "write_trace",
]
