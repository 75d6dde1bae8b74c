"""Scenario package: the structural-space description of a TMA."""

from .loader import (
    ScenarioError,
    ScenarioSchemaError,
    ScenarioValidationError,
    dump_scenario,
    load_scenario,
    loads_scenario,
    validate,
)
from .models import (
    AirspaceScenario,
    ArrivalPath,
    ClassMix,
    PairGeometry,
    SeparationPolicy,
    SpeedProfile,
    Waypoint,
    kt_to_nm_per_min,
    nm_per_min_to_kt,
)

__all__ = [
    'AirspaceScenario', 'ArrivalPath', 'ClassMix', 'PairGeometry', 'SeparationPolicy',
    'SpeedProfile', 'Waypoint', 'ScenarioError', 'ScenarioSchemaError',
    'ScenarioValidationError', 'load_scenario', 'loads_scenario', 'validate',
    'dump_scenario', 'kt_to_nm_per_min', 'nm_per_min_to_kt',
]
