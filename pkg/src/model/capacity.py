"""
Arrival capacity of a TMA as a maximum occupancy count.

λ = D_temp / T̄_thr, where D_temp is the temporal flight distance of the
runway's arrival paths merged into a single extended path and T̄_thr the
average threshold-crossing separation of consecutive arrivals.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from ..config import SolverOptions
from ..scenario.models import AirspaceScenario, ArrivalPath
from .kinematics import path_flight_time
from .pairwise import PairTable, iter_combinations, solve_all_pairs


logger = logging.getLogger(__name__)

TELESCOPING_TOLERANCE = 1e-9

CSV_COLUMNS = ("runway", "d_temp_min", "t_bar_thr_min", "lambda")


class MissingCombinationError(KeyError):
    """Raised when a nonzero-probability combination has no pairwise solution."""

    def __init__(self, combination):
        self.combination = combination
        super().__init__(f"Pair table has no entry for combination {combination}")


class CapacityInternalError(RuntimeError):
    """Raised when two evaluations of the same quantity disagree."""


@dataclass(frozen=True)
class PathMeanTime:
    path: str
    proportion: float
    mean_time: float


@dataclass(frozen=True)
class CapacityReport:
    """Headline capacity figures with the intermediates behind them."""
    runway_id: str
    d_temp: float
    t_bar_thr: float
    lambda_rwy: float
    per_path_mean_times: Tuple[PathMeanTime, ...]
    pair_table: Optional[PairTable] = None

    @property
    def lambda_floor(self) -> int:
        return math.floor(self.lambda_rwy)

    def csv_row(self) -> Dict[str, object]:
        return {
            "runway": self.runway_id,
            "d_temp_min": self.d_temp,
            "t_bar_thr_min": self.t_bar_thr,
            "lambda": self.lambda_rwy,
        }

    def to_dict(self, include_floor: bool = False) -> Dict[str, object]:
        data: Dict[str, object] = {
            "runway": self.runway_id,
            "d_temp_min": self.d_temp,
            "t_bar_thr_min": self.t_bar_thr,
            "lambda": self.lambda_rwy,
            "per_path_mean_times": [
                {"path": entry.path, "proportion": entry.proportion, "mean_time_min": entry.mean_time}
                for entry in self.per_path_mean_times
            ],
        }
        if include_floor:
            data["lambda_floor"] = self.lambda_floor
        return data


def path_mean_time(path: ArrivalPath) -> float:
    """Class-mix weighted entry-to-threshold flight time of a path (min)."""
    return math.fsum(
        mix.proportion * path_flight_time(path, mix.profile) for mix in path.active_classes()
    )


def sorted_path_times(scenario: AirspaceScenario) -> List[PathMeanTime]:
    """Active paths in ascending mean flight time, ties broken by entry label."""
    entries = [
        PathMeanTime(path.entry_point, path.traffic_proportion, path_mean_time(path))
        for path in scenario.active_paths
    ]
    return sorted(entries, key=lambda entry: (entry.mean_time, entry.path))


def _telescoped_distance(entries: List[PathMeanTime]) -> float:
    # shortest path flown by everyone, then each longer step by the traffic still on it
    first = math.fsum(entry.proportion for entry in entries) * entries[0].mean_time
    steps = []
    for r in range(1, len(entries)):
        remaining = math.fsum(entry.proportion for entry in entries[r:])
        steps.append((entries[r].mean_time - entries[r - 1].mean_time) * remaining)
    return first + math.fsum(steps)


def temporal_flight_distance(scenario: AirspaceScenario) -> float:
    """
    Temporal flight distance D_temp (min).

    Evaluated as the telescoped sum over paths sorted by mean time and
    cross-checked against the proportion-weighted mean of path times.

    Raises:
        ValueError: If the scenario has no active path
        CapacityInternalError: If the two evaluations disagree
    """
    entries = sorted_path_times(scenario)
    if not entries:
        raise ValueError(f"Scenario '{scenario.name}' has no active path")

    telescoped = _telescoped_distance(entries)
    weighted = math.fsum(entry.proportion * entry.mean_time for entry in entries)
    if abs(telescoped - weighted) > TELESCOPING_TOLERANCE:
        raise CapacityInternalError(
            f"Temporal flight distance mismatch: telescoped {telescoped!r} vs weighted {weighted!r}"
        )
    return telescoped


def average_time_separation(scenario: AirspaceScenario, pair_table: PairTable) -> float:
    """
    Probability-weighted mean of ΔT over all leading/trailing combinations.

    Weights are renormalized over the combinations present; with valid
    proportions they already sum to 1.

    Raises:
        MissingCombinationError: If the table lacks a nonzero-probability combination
    """
    weighted = []
    weights = []
    for combo, probability in iter_combinations(scenario):
        if combo.key not in pair_table:
            raise MissingCombinationError(combo.key)
        weighted.append(probability * pair_table.delta_t(combo.key))
        weights.append(probability)
    total = math.fsum(weights)
    if total <= 0:
        raise ValueError(f"Scenario '{scenario.name}' has no nonzero-probability combination")
    return math.fsum(weighted) / total


def capacity(scenario: AirspaceScenario, pair_table: Optional[PairTable] = None,
             options: Optional[SolverOptions] = None) -> CapacityReport:
    """
    Compute the arrival capacity of a scenario.

    Args:
        scenario: Validated scenario
        pair_table: Precomputed pairwise solutions; solved here when omitted
        options: Solver tunables used when solving

    Returns:
        CapacityReport with D_temp, T̄_thr and λ
    """
    if pair_table is None:
        pair_table = solve_all_pairs(scenario, options)

    d_temp = temporal_flight_distance(scenario)
    t_bar_thr = average_time_separation(scenario, pair_table)
    lambda_rwy = d_temp / t_bar_thr

    logger.info("%s: D_temp=%.4f min, T̄_thr=%.4f min, λ=%.3f",
                scenario.runway_id, d_temp, t_bar_thr, lambda_rwy)
    return CapacityReport(
        runway_id=scenario.runway_id,
        d_temp=d_temp,
        t_bar_thr=t_bar_thr,
        lambda_rwy=lambda_rwy,
        per_path_mean_times=tuple(sorted_path_times(scenario)),
        pair_table=pair_table,
    )
