"""
Capacity model: kinematics, pairwise spacing and capacity aggregation
"""

from .capacity import (
    CapacityInternalError,
    CapacityReport,
    MissingCombinationError,
    average_time_separation,
    capacity,
    path_mean_time,
    temporal_flight_distance,
)
from .kinematics import (
    KinematicsError,
    path_flight_time,
    segment_accel,
    speed_at_offset,
    upstream_extrapolated_speed,
)
from .pairwise import (
    Binding,
    InfeasibleSpacingError,
    PairCombination,
    PairTable,
    SpacingSolution,
    SpacingSolverError,
    brute_force_min_t0,
    build_subintervals,
    common_subpath_times,
    gap_at,
    min_gap,
    replay_gaps,
    solve_all_pairs,
    solve_min_t0,
)

__all__ = [
    "Binding",
    "CapacityInternalError",
    "CapacityReport",
    "InfeasibleSpacingError",
    "KinematicsError",
    "MissingCombinationError",
    "PairCombination",
    "PairTable",
    "SpacingSolution",
    "SpacingSolverError",
    "average_time_separation",
    "brute_force_min_t0",
    "build_subintervals",
    "capacity",
    "common_subpath_times",
    "gap_at",
    "min_gap",
    "path_flight_time",
    "path_mean_time",
    "replay_gaps",
    "segment_accel",
    "solve_all_pairs",
    "solve_min_t0",
    "speed_at_offset",
    "temporal_flight_distance",
    "upstream_extrapolated_speed",
]
