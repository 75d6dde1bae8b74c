"""
Model inputs from recorded arrival tracks: traffic proportions per path,
aircraft-class mixes per path and mean gate passing speeds per class.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from .gates import ExtractionError, GateNotPassedError, GateSet, assign_path, gate_speed


logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("flight_id", "timestamp_unix_s", "lat_deg", "lon_deg", "ground_speed_kt", "aircraft_class")
GATE_COLUMNS = {"entry": "v_entry_kt", "mpiap": "v_mpiap_kt", "threshold": "v_thr_kt"}


@dataclass(frozen=True)
class ExtractionTables:
    """Proportion, class-mix and speed tables plus per-flight assignments."""
    proportions: pd.DataFrame
    class_mix: pd.DataFrame
    speeds: pd.DataFrame
    assignments: pd.DataFrame

    @property
    def matched_count(self) -> int:
        return int(self.assignments["path"].notna().sum())

    @property
    def unmatched_count(self) -> int:
        return int(self.assignments["path"].isna().sum())


def load_flights(source: Union[str, Path]) -> pd.DataFrame:
    """
    Read a trajectory CSV, one row per track point.

    Raises:
        FileNotFoundError: If the file doesn't exist
        ExtractionError: If required columns are missing, speeds are not positive
            or a flight's timestamps do not strictly increase
    """
    csv_path = Path(source)
    if not csv_path.exists():
        raise FileNotFoundError(f"Trajectory file not found: {csv_path}")
    flights = pd.read_csv(csv_path, dtype={"flight_id": str, "aircraft_class": str})
    missing = [column for column in REQUIRED_COLUMNS if column not in flights.columns]
    if missing:
        raise ExtractionError(f"{csv_path}: missing columns {', '.join(missing)}")
    flights = flights.dropna(subset=list(REQUIRED_COLUMNS))
    if (flights["ground_speed_kt"] <= 0).any():
        raise ExtractionError(f"{csv_path}: ground speeds must be positive")
    steps = flights.groupby("flight_id", sort=True)["timestamp_unix_s"].diff()
    stalled = sorted(flights.loc[steps <= 0, "flight_id"].unique())
    if stalled:
        raise ExtractionError(
            f"{csv_path}: timestamps must strictly increase within a flight; "
            f"repeated or backwards timestamps in {', '.join(stalled)}"
        )
    logger.info("✓ Loaded %d track points (%d flights) from %s",
                len(flights), flights["flight_id"].nunique(), csv_path)
    return flights


def _ordered_tracks(flights: pd.DataFrame):
    ordered = flights.sort_values(["flight_id", "timestamp_unix_s"], kind="mergesort")
    for flight_id, track in ordered.groupby("flight_id", sort=True):
        yield flight_id, track.reset_index(drop=True)


def build_tables(flights: pd.DataFrame, gates: GateSet) -> ExtractionTables:
    """
    Assign each flight to a path and aggregate the three input tables.

    Proportions are matched-flight shares over all gate-set paths (zero rows
    kept); class mixes are shares within each path; speeds are arithmetic
    means of the closest-approach ground speeds per path, class and gate.

    Raises:
        ExtractionError: If no flight matches any path
    """
    assignments: List[Dict[str, Any]] = []
    speed_rows: List[Dict[str, Any]] = []
    for flight_id, track in _ordered_tracks(flights):
        aircraft_class = str(track["aircraft_class"].iloc[0])
        path = assign_path(track, gates)
        assignments.append({"flight_id": flight_id, "aircraft_class": aircraft_class, "path": path})
        if path is None:
            logger.debug("Flight %s matched no path", flight_id)
            continue
        path_gates = next(g for g in gates.paths if g.path == path)
        row: Dict[str, Any] = {"path": path, "aircraft_class": aircraft_class}
        try:
            for gate, column in GATE_COLUMNS.items():
                row[column] = gate_speed(track, getattr(path_gates, gate))
        except GateNotPassedError as e:
            # assign_path already checked every radius
            raise ExtractionError(f"Flight {flight_id}: {e}") from e
        speed_rows.append(row)

    assigned = pd.DataFrame(assignments, columns=["flight_id", "aircraft_class", "path"])
    matched = assigned.dropna(subset=["path"])
    if matched.empty:
        raise ExtractionError(f"None of {len(assigned)} flights matched a path in the gate set")

    counts = matched.groupby("path").size().reindex(gates.labels, fill_value=0)
    proportions = pd.DataFrame({
        "path": gates.labels,
        "flights": counts.to_numpy(),
        "proportion": (counts / counts.sum()).to_numpy(),
    })

    mix_counts = matched.groupby(["path", "aircraft_class"]).size().rename("flights").reset_index()
    mix_counts["proportion"] = mix_counts["flights"] / mix_counts.groupby("path")["flights"].transform("sum")
    class_mix = _in_gate_order(mix_counts, gates)

    speeds = (pd.DataFrame(speed_rows)
              .groupby(["path", "aircraft_class"], sort=True)[list(GATE_COLUMNS.values())]
              .mean()
              .reset_index())
    speeds = _in_gate_order(speeds, gates)

    logger.info("Matched %d of %d flights", len(matched), len(assigned))
    return ExtractionTables(proportions, class_mix, speeds, assigned)


def _in_gate_order(frame: pd.DataFrame, gates: GateSet) -> pd.DataFrame:
    order = {label: position for position, label in enumerate(gates.labels)}
    frame = frame.assign(_order=frame["path"].map(order))
    return (frame.sort_values(["_order", "aircraft_class"], kind="mergesort")
            .drop(columns="_order")
            .reset_index(drop=True))


def scenario_skeleton(tables: ExtractionTables, runway: str, name: Optional[str] = None,
                      s_tma_nm: float = 5.0, s_thr_nm: float = 8.0) -> Dict[str, Any]:
    """
    Scenario document pre-filled from the tables.

    Path lengths are left null and pair geometry empty; both come from the
    charts and must be filled in before the document will load.
    """
    paths = []
    for row in tables.proportions.itertuples(index=False):
        mix = tables.class_mix[tables.class_mix["path"] == row.path]
        speeds = tables.speeds[tables.speeds["path"] == row.path].set_index("aircraft_class")
        classes = [
            {
                "class": mix_row.aircraft_class,
                "proportion": float(mix_row.proportion),
                "v_entry_kt": float(speeds.at[mix_row.aircraft_class, "v_entry_kt"]),
                "v_mpiap_kt": float(speeds.at[mix_row.aircraft_class, "v_mpiap_kt"]),
                "v_thr_kt": float(speeds.at[mix_row.aircraft_class, "v_thr_kt"]),
            }
            for mix_row in mix.itertuples(index=False)
        ]
        paths.append({
            "entry": row.path,
            "proportion": float(row.proportion),
            "d_entry_mpiap_nm": None,
            "d_mpiap_thr_nm": None,
            "classes": classes,
        })
    return {
        "name": name or f"{runway} (extracted)",
        "runway": runway,
        "separation": {"s_tma_nm": s_tma_nm, "s_thr_nm": s_thr_nm},
        "paths": paths,
        "pair_geometry": [],
        "provenance": f"Extracted from {tables.matched_count} matched flights "
                      f"({tables.unmatched_count} unmatched); lengths and pair geometry to be filled from charts",
    }
