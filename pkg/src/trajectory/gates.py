"""
Gate fixes and gate passage detection for recorded arrival tracks.

Each path is recognised by three fixes passed in order: entry point, IAP
merging point and runway threshold. A fix counts as passed when the track
comes within the capture radius; the passage is taken at the point of
closest approach.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from haversine import Unit, haversine_vector
from pydantic import BaseModel, ConfigDict, Field, ValidationError


logger = logging.getLogger(__name__)

DEFAULT_CAPTURE_RADIUS_NM = 3.0


class GateNotPassedError(ValueError):
    """Raised when a track never comes within the capture radius of a fix."""

    def __init__(self, fix: str, closest_nm: float, radius_nm: float):
        self.fix = fix
        self.closest_nm = closest_nm
        self.radius_nm = radius_nm
        super().__init__(f"Track never within {radius_nm} NM of {fix} (closest {closest_nm:.3f} NM)")


class ExtractionError(ValueError):
    """Raised for unusable trajectory or gate inputs."""


class FixDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="Fix identifier")
    lat: float = Field(..., ge=-90, le=90, description="Latitude (deg)")
    lon: float = Field(..., ge=-180, le=180, description="Longitude (deg)")
    radius_nm: Optional[float] = Field(None, gt=0, description="Capture radius override (NM)")


class PathGatesDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    path: str = Field(..., description="Path label (entry point name)")
    entry: FixDocument
    mpiap: FixDocument
    threshold: FixDocument


@dataclass(frozen=True)
class Fix:
    name: str
    lat: float
    lon: float
    radius_nm: float = DEFAULT_CAPTURE_RADIUS_NM


@dataclass(frozen=True)
class PathGates:
    """The three fixes that identify one arrival path."""
    path: str
    entry: Fix
    mpiap: Fix
    threshold: Fix

    @property
    def fixes(self) -> Tuple[Fix, Fix, Fix]:
        return (self.entry, self.mpiap, self.threshold)


@dataclass(frozen=True)
class GateSet:
    paths: Tuple[PathGates, ...]

    @property
    def labels(self) -> List[str]:
        return [gates.path for gates in self.paths]


def _fix_from(doc: FixDocument, radius_nm: float) -> Fix:
    return Fix(doc.name, doc.lat, doc.lon, doc.radius_nm if doc.radius_nm is not None else radius_nm)


def load_gates(source: Union[str, Path, list], radius_nm: float = DEFAULT_CAPTURE_RADIUS_NM) -> GateSet:
    """
    Load a gate file: a JSON list of paths, each with entry/mpiap/threshold fixes.

    Args:
        source: Path to the JSON file, or the already-parsed list
        radius_nm: Capture radius for fixes that do not set their own

    Raises:
        FileNotFoundError: If the file doesn't exist
        ExtractionError: If the document is malformed or a path repeats a fix
    """
    if not radius_nm > 0:
        raise ExtractionError(f"Capture radius must be positive, got {radius_nm}")
    if isinstance(source, (str, Path)):
        gate_path = Path(source)
        if not gate_path.exists():
            raise FileNotFoundError(f"Gate file not found: {gate_path}")
        try:
            raw = json.loads(gate_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ExtractionError(f"{gate_path}: invalid JSON ({e})") from e
        origin = str(gate_path)
    else:
        raw, origin = source, "<document>"

    if not isinstance(raw, list) or not raw:
        raise ExtractionError(f"{origin}: gate file must be a non-empty list of paths")
    try:
        docs = [PathGatesDocument.model_validate(item) for item in raw]
    except ValidationError as e:
        raise ExtractionError(f"{origin}: {e}") from e

    paths = []
    for doc in docs:
        fixes = (doc.entry, doc.mpiap, doc.threshold)
        if len({(fix.lat, fix.lon) for fix in fixes}) != 3:
            raise ExtractionError(f"{origin}: fixes of path {doc.path} are not distinct")
        paths.append(PathGates(doc.path, *(_fix_from(fix, radius_nm) for fix in fixes)))
    if len({gates.path for gates in paths}) != len(paths):
        raise ExtractionError(f"{origin}: duplicate path labels")

    logger.info("✓ Loaded gates for %d paths from %s", len(paths), origin)
    return GateSet(tuple(paths))


def distances_to_fix_nm(flight: pd.DataFrame, fix: Fix) -> np.ndarray:
    """Great-circle distance (NM) from every track point to the fix."""
    points = flight[["lat_deg", "lon_deg"]].to_numpy(dtype=float)
    target = np.tile([fix.lat, fix.lon], (len(points), 1))
    return haversine_vector(points, target, Unit.NAUTICAL_MILES)


def closest_approach(flight: pd.DataFrame, fix: Fix) -> Tuple[int, float]:
    """Row position and distance of the point closest to the fix; the earliest on ties."""
    distances = distances_to_fix_nm(flight, fix)
    position = int(np.argmin(distances))
    return position, float(distances[position])


def passage_time(flight: pd.DataFrame, fix: Fix) -> Optional[float]:
    """Timestamp of closest approach, or None when the track stays outside the radius."""
    if flight.empty:
        return None
    position, distance = closest_approach(flight, fix)
    if distance > fix.radius_nm:
        return None
    return float(flight["timestamp_unix_s"].iloc[position])


def gate_speed(flight: pd.DataFrame, fix: Fix, radius_nm: Optional[float] = None) -> float:
    """
    Ground speed (kt) at the point of closest approach to a fix.

    Raises:
        GateNotPassedError: If no point lies within the capture radius
    """
    radius = radius_nm if radius_nm is not None else fix.radius_nm
    position, distance = closest_approach(flight, fix)
    if distance > radius:
        raise GateNotPassedError(fix.name, distance, radius)
    return float(flight["ground_speed_kt"].iloc[position])


def assign_path(flight: pd.DataFrame, gates: GateSet) -> Optional[str]:
    """
    Path whose three fixes the track passes in order.

    When several paths qualify, the one whose entry fix is passed first
    wins (label order on exact ties). Returns None for unmatched tracks.
    """
    if len(flight) < 2:
        return None
    candidates = []
    for path_gates in gates.paths:
        times = [passage_time(flight, fix) for fix in path_gates.fixes]
        if any(t is None for t in times):
            continue
        entry, mpiap, threshold = times
        if entry < mpiap < threshold:
            candidates.append((entry, path_gates.path))
    if not candidates:
        return None
    return min(candidates)[1]
