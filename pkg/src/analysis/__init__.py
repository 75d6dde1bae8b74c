"""
Analyses built on the capacity model: sensitivity sweeps and the occupancy simulator
"""

from .occupancy_sim import SimConfig, SimResult, simulate
from .sensitivity import (
    DEFAULT_REGIMES,
    DEFAULT_SPEED_GRID,
    SpeedScalingError,
    SweepRow,
    SweepSpec,
    grid_from_text,
    regimes_from_text,
    run_sweep,
    scale_speeds,
)

__all__ = [
    "DEFAULT_REGIMES",
    "DEFAULT_SPEED_GRID",
    "SimConfig",
    "SimResult",
    "SpeedScalingError",
    "SweepRow",
    "SweepSpec",
    "grid_from_text",
    "regimes_from_text",
    "run_sweep",
    "scale_speeds",
    "simulate",
]
