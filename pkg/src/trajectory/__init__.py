"""Trajectory extraction: gate passage detection and input tables from recorded tracks."""

from .gates import (
    DEFAULT_CAPTURE_RADIUS_NM,
    ExtractionError,
    Fix,
    GateNotPassedError,
    GateSet,
    PathGates,
    assign_path,
    gate_speed,
    load_gates,
)
from .stats import ExtractionTables, build_tables, load_flights, scenario_skeleton

__all__ = [
    'DEFAULT_CAPTURE_RADIUS_NM', 'ExtractionError', 'ExtractionTables', 'Fix',
    'GateNotPassedError', 'GateSet', 'PathGates', 'assign_path', 'build_tables',
    'gate_speed', 'load_flights', 'load_gates', 'scenario_skeleton',
]
