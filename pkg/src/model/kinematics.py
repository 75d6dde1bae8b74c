"""
Constant-deceleration kinematics along a two-segment arrival path.

Each path is split at the IAP merging point; on each segment an aircraft
decelerates uniformly from the segment's start speed to its end speed.
"""

import math
from dataclasses import dataclass

from ..scenario.models import ArrivalPath, SpeedProfile


class KinematicsError(ValueError):
    """Raised for lengths, speeds or offsets outside the model's domain."""


@dataclass(frozen=True)
class SegmentKinematics:
    """Uniform deceleration over one path segment."""
    length: float
    v_start: float
    v_end: float
    accel: float

    @classmethod
    def from_speeds(cls, length: float, v_start: float, v_end: float) -> "SegmentKinematics":
        return cls(length, v_start, v_end, segment_accel(length, v_start, v_end))

    def speed_at(self, distance: float) -> float:
        """Speed after `distance` NM into the segment."""
        return math.sqrt(max(self.v_start ** 2 + 2.0 * self.accel * distance, 0.0))


def segment_accel(length: float, v_start: float, v_end: float) -> float:
    """
    Constant acceleration that takes v_start to v_end over `length`.

    Args:
        length: Segment length (NM), strictly positive
        v_start: Speed entering the segment (NM/min)
        v_end: Speed leaving the segment (NM/min), not above v_start

    Returns:
        Acceleration in NM/min², always <= 0
    """
    if not length > 0:
        raise KinematicsError(f"Segment length must be positive, got {length}")
    if not v_end > 0:
        raise KinematicsError(f"Segment speeds must be positive, got end speed {v_end}")
    if v_end > v_start:
        raise KinematicsError(f"Accelerating segment ({v_start} -> {v_end} NM/min) is not allowed")
    return (v_end ** 2 - v_start ** 2) / (2.0 * length)


def segment_time(length: float, v_start: float, v_end: float) -> float:
    """Flight time over a uniformly decelerating segment: length over mean speed."""
    return length / ((v_start + v_end) / 2.0)


def path_segments(path: ArrivalPath, profile: SpeedProfile) -> tuple:
    """The entry→MP_iap and MP_iap→threshold segments of a path for one profile."""
    return (
        SegmentKinematics.from_speeds(path.d_entry_to_mpiap, profile.v_entry, profile.v_mpiap),
        SegmentKinematics.from_speeds(path.d_mpiap_to_thr, profile.v_mpiap, profile.v_thr),
    )


def path_flight_time(path: ArrivalPath, profile: SpeedProfile) -> float:
    """Entry-to-threshold flight time (min) as the sum of the two segment times."""
    return (segment_time(path.d_entry_to_mpiap, profile.v_entry, profile.v_mpiap)
            + segment_time(path.d_mpiap_to_thr, profile.v_mpiap, profile.v_thr))


def speed_at_offset(path: ArrivalPath, profile: SpeedProfile, d_from_entry: float) -> float:
    """
    Speed at an along-path distance from the entry point.

    The segment-2 branch is used at exactly d = d_entry_to_mpiap; both
    branches give v_mpiap there.
    """
    total = path.total_length
    if d_from_entry < 0 or d_from_entry > total:
        raise KinematicsError(
            f"Offset {d_from_entry} NM is outside path {path.entry_point} [0, {total}]"
        )
    first, second = path_segments(path, profile)
    if d_from_entry < path.d_entry_to_mpiap:
        return first.speed_at(d_from_entry)
    return second.speed_at(d_from_entry - path.d_entry_to_mpiap)


def upstream_extrapolated_speed(profile: SpeedProfile, a1: float, d_upstream_of_entry: float) -> float:
    """
    Speed of an aircraft `d` NM before the entry fix, extending the entry
    segment's deceleration backwards.
    """
    if d_upstream_of_entry < 0:
        raise KinematicsError(f"Upstream distance must be non-negative, got {d_upstream_of_entry}")
    return math.sqrt(profile.v_entry ** 2 + 2.0 * abs(a1) * d_upstream_of_entry)


def time_to_cover(v_start: float, accel: float, distance: float) -> float:
    """
    Time to fly `distance` NM starting at v_start under constant `accel`.

    Uses 2d / (v0 + v1), which stays exact for accel = 0 and is stable
    for small decelerations.
    """
    if distance == 0:
        return 0.0
    v_end = math.sqrt(max(v_start ** 2 + 2.0 * accel * distance, 0.0))
    return 2.0 * distance / (v_start + v_end)
