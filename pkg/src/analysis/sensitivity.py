"""
Sensitivity of capacity to passing speeds and separation minima.

A sweep scales entry and MP_iap speeds over a grid of fractions for each
(S, S_thr) regime and records D_temp, T̄_thr and λ per point. Traffic
proportions and path lengths stay fixed.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import SolverOptions
from ..model.capacity import CapacityInternalError, MissingCombinationError, capacity
from ..model.pairwise import SpacingSolverError
from ..scenario.models import AirspaceScenario, ArrivalPath, ClassMix


logger = logging.getLogger(__name__)

DEFAULT_SPEED_GRID: Tuple[float, ...] = tuple(float(x) for x in np.round(np.linspace(-0.10, 0.10, 21), 10))
DEFAULT_REGIMES: Tuple[Tuple[float, float], ...] = ((5.0, 8.0), (5.0, 5.0), (3.0, 5.0), (3.0, 3.0))

CSV_COLUMNS = ("regime_s_nm", "regime_sthr_nm", "speed_scale", "d_temp_min", "t_bar_thr_min", "lambda", "status")


class SpeedScalingError(ValueError):
    """Raised when scaling leaves a speed profile non-monotone."""

    def __init__(self, message: str, violations: List[str]):
        self.violations = violations
        super().__init__(message)


@dataclass(frozen=True)
class SweepSpec:
    """Speed-scale grid and separation regimes to sweep."""
    speed_scale_grid: Tuple[float, ...] = DEFAULT_SPEED_GRID
    separation_regimes: Tuple[Tuple[float, float], ...] = DEFAULT_REGIMES
    scale_thr_speeds: bool = False

    def __post_init__(self):
        object.__setattr__(self, "speed_scale_grid", tuple(float(x) for x in self.speed_scale_grid))
        object.__setattr__(self, "separation_regimes",
                           tuple((float(s), float(s_thr)) for s, s_thr in self.separation_regimes))
        if not self.speed_scale_grid:
            raise ValueError("Speed-scale grid must not be empty")
        if not self.separation_regimes:
            raise ValueError("At least one separation regime is required")
        for fraction in self.speed_scale_grid:
            if fraction <= -1:
                raise ValueError(f"Speed-scale fraction {fraction} would stop the aircraft")
        for s, s_thr in self.separation_regimes:
            if s <= 0 or s_thr <= 0:
                raise ValueError(f"Separations must be positive, got regime ({s}, {s_thr})")


@dataclass(frozen=True)
class SweepRow:
    regime: Tuple[float, float]
    speed_scale: float
    d_temp: Optional[float]
    t_bar_thr: Optional[float]
    lambda_rwy: Optional[float]
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def csv_row(self) -> Dict[str, object]:
        return {
            "regime_s_nm": self.regime[0],
            "regime_sthr_nm": self.regime[1],
            "speed_scale": self.speed_scale,
            "d_temp_min": self.d_temp,
            "t_bar_thr_min": self.t_bar_thr,
            "lambda": self.lambda_rwy,
            "status": self.status,
        }


def _scaled_path(path: ArrivalPath, factor: float, scale_thr: bool, violations: List[str]) -> ArrivalPath:
    mixes = []
    for mix in path.class_mix:
        profile = mix.profile.scaled(factor, scale_thr)
        if mix.proportion > 0 and not profile.is_monotone():
            violations.append(
                f"profile of class {mix.aircraft_class} on path {path.entry_point} is not monotone "
                f"after scaling by {factor:.4f}"
            )
        mixes.append(ClassMix(mix.aircraft_class, mix.proportion, profile))
    return ArrivalPath(
        entry_point=path.entry_point,
        traffic_proportion=path.traffic_proportion,
        d_entry_to_mpiap=path.d_entry_to_mpiap,
        d_mpiap_to_thr=path.d_mpiap_to_thr,
        class_mix=tuple(mixes),
        waypoints=path.waypoints,
        provenance=path.provenance,
    )


def scale_speeds(scenario: AirspaceScenario, fraction: float, scale_thr: bool = False) -> AirspaceScenario:
    """
    Multiply entry and MP_iap speeds by (1 + fraction).

    Threshold speeds are left alone unless `scale_thr` is set.

    Raises:
        SpeedScalingError: If an active class profile stops being non-increasing
    """
    if fraction == 0:
        return scenario
    factor = 1.0 + fraction
    violations: List[str] = []
    paths = [_scaled_path(path, factor, scale_thr, violations) for path in scenario.paths]
    if violations:
        raise SpeedScalingError(f"Speed scaling by {fraction:+.4f} breaks monotonicity", violations)
    return scenario.replace_paths(paths)


def run_sweep(scenario: AirspaceScenario, sweep: Optional[SweepSpec] = None,
              options: Optional[SolverOptions] = None) -> List[SweepRow]:
    """
    Evaluate capacity over every (regime, speed scale) point.

    Rows come regime-major, scale-minor. A point that cannot be scaled is
    marked skipped; a point whose evaluation fails is marked failed. Neither
    stops the sweep.

    Args:
        scenario: Validated base scenario
        sweep: Grid and regimes; defaults to ±10% in 1% steps over the four standard regimes
        options: Solver tunables

    Returns:
        One SweepRow per grid point
    """
    sweep = sweep or SweepSpec()
    base = scenario.separation
    for s, s_thr in sweep.separation_regimes:
        if s_thr < s and not base.allow_sthr_below_s:
            raise ValueError(f"Regime ({s}, {s_thr}) has S_thr < S; set allow_sthr_below_s to sweep it")

    rows: List[SweepRow] = []
    for regime in sweep.separation_regimes:
        policy = base.as_regime(*regime)
        for fraction in sweep.speed_scale_grid:
            rows.append(_evaluate_point(scenario.with_separation(policy), regime, fraction, sweep, options))

    skipped = sum(1 for row in rows if not row.ok)
    logger.info("Sweep of %s: %d rows, %d not ok", scenario.runway_id, len(rows), skipped)
    return rows


def _evaluate_point(scenario: AirspaceScenario, regime: Tuple[float, float], fraction: float,
                    sweep: SweepSpec, options: Optional[SolverOptions]) -> SweepRow:
    try:
        scaled = scale_speeds(scenario, fraction, sweep.scale_thr_speeds)
    except SpeedScalingError as e:
        logger.warning("Skipping regime %s at scale %+.2f: %s", regime, fraction, "; ".join(e.violations))
        return SweepRow(regime, fraction, None, None, None, status=f"skipped: {e.violations[0]}")

    try:
        report = capacity(scaled, options=options)
    except (SpacingSolverError, MissingCombinationError, CapacityInternalError, ValueError) as e:
        logger.warning("Regime %s at scale %+.2f failed: %s", regime, fraction, e)
        return SweepRow(regime, fraction, None, None, None, status=f"failed: {e}")

    return SweepRow(regime, fraction, report.d_temp, report.t_bar_thr, report.lambda_rwy)


def regimes_from_text(text: str) -> Tuple[Tuple[float, float], ...]:
    """Parse `a:b,c:d` into ((a, b), (c, d))."""
    regimes = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ValueError(f"Regime '{chunk}' is not of the form S:S_thr")
        regimes.append((float(parts[0]), float(parts[1])))
    if not regimes:
        raise ValueError("No regimes given")
    return tuple(regimes)


def grid_from_text(text: str) -> Tuple[float, ...]:
    """Parse `start:stop:step` (fractions) into an inclusive grid rounded to 10 decimals."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"Grid '{text}' is not of the form start:stop:step")
    start, stop, step = (float(part) for part in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"Grid '{text}' needs start <= stop and a positive step")
    count = int(round((stop - start) / step)) + 1
    return tuple(float(x) for x in np.round(np.linspace(start, start + (count - 1) * step, count), 10))
