"""
Scenario data model: the structural space of one runway's terminal area.

All quantities are held in canonical internal units: NM for distance,
minutes for time, NM/min for speed and NM/min² for acceleration. Speeds
arrive from documents in knots and are converted once, at load.
"""

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Dict, Iterator, Mapping, Optional, Tuple


KT_PER_NM_PER_MIN = 60.0


def kt_to_nm_per_min(speed_kt: float) -> float:
    return speed_kt / KT_PER_NM_PER_MIN


def nm_per_min_to_kt(speed: float) -> float:
    return speed * KT_PER_NM_PER_MIN


@dataclass(frozen=True)
class SpeedProfile:
    """Average passing speeds (NM/min) at entry, IAP merging point and threshold."""
    v_entry: float
    v_mpiap: float
    v_thr: float

    def scaled(self, factor: float, scale_thr: bool = False) -> "SpeedProfile":
        return SpeedProfile(
            v_entry=self.v_entry * factor,
            v_mpiap=self.v_mpiap * factor,
            v_thr=self.v_thr * factor if scale_thr else self.v_thr,
        )

    def is_monotone(self) -> bool:
        return self.v_entry >= self.v_mpiap >= self.v_thr > 0


@dataclass(frozen=True)
class ClassMix:
    """One aircraft class flying a path, with its share and speed profile."""
    aircraft_class: str
    proportion: float
    profile: SpeedProfile


@dataclass(frozen=True)
class Waypoint:
    """A named fix with its cumulative along-path distance from the entry point."""
    name: str
    cum_nm: float


@dataclass(frozen=True)
class ArrivalPath:
    """
    One entry-to-threshold route, split at the IAP merging point into two
    kinematic segments.
    """
    entry_point: str
    traffic_proportion: float
    d_entry_to_mpiap: float
    d_mpiap_to_thr: float
    class_mix: Tuple[ClassMix, ...] = ()
    waypoints: Tuple[Waypoint, ...] = ()
    provenance: Optional[str] = None

    @property
    def total_length(self) -> float:
        return self.d_entry_to_mpiap + self.d_mpiap_to_thr

    @property
    def is_active(self) -> bool:
        return self.traffic_proportion > 0

    def active_classes(self) -> Tuple[ClassMix, ...]:
        return tuple(mix for mix in self.class_mix if mix.proportion > 0)

    def profile_for(self, aircraft_class: str) -> SpeedProfile:
        for mix in self.class_mix:
            if mix.aircraft_class == aircraft_class:
                return mix.profile
        raise KeyError(f"Class '{aircraft_class}' does not fly path '{self.entry_point}'")


@dataclass(frozen=True)
class PairGeometry:
    """
    Common-path decomposition for paths k and l.

    The orientation matters for the two entry-to-MP_kl lengths; use
    `oriented()` to get the view with a given path as k.
    """
    path_k: str
    path_l: str
    d_common1: float
    d_common2: float
    d_entry_to_mpkl_k: float
    d_entry_to_mpkl_l: float

    def oriented(self, lead_path: str) -> "PairGeometry":
        if lead_path == self.path_k:
            return self
        if lead_path != self.path_l:
            raise KeyError(f"Path '{lead_path}' is not part of pair ({self.path_k}, {self.path_l})")
        return PairGeometry(
            path_k=self.path_l,
            path_l=self.path_k,
            d_common1=self.d_common1,
            d_common2=self.d_common2,
            d_entry_to_mpkl_k=self.d_entry_to_mpkl_l,
            d_entry_to_mpkl_l=self.d_entry_to_mpkl_k,
        )


@dataclass(frozen=True)
class SeparationPolicy:
    """Longitudinal separations: S inside the TMA, S_thr at the threshold."""
    s_tma: float
    s_thr: float
    class_matrix: Mapping[Tuple[str, str], float] = field(default_factory=dict)
    allow_sthr_below_s: bool = False

    def __post_init__(self):
        object.__setattr__(self, "class_matrix", MappingProxyType(dict(self.class_matrix)))

    def s_tma_for(self, lead_class: str, trail_class: str) -> float:
        """In-TMA separation for a class pair; the scalar S unless overridden."""
        return self.class_matrix.get((lead_class, trail_class), self.s_tma)

    def with_values(self, s_tma: float, s_thr: float) -> "SeparationPolicy":
        """Override the scalar separations; per-class entries stay."""
        return replace(self, s_tma=s_tma, s_thr=s_thr)

    def as_regime(self, s_tma: float, s_thr: float) -> "SeparationPolicy":
        """Uniform separations for a sweep regime, with the class matrix cleared."""
        return SeparationPolicy(
            s_tma=s_tma,
            s_thr=s_thr,
            class_matrix={},
            allow_sthr_below_s=self.allow_sthr_below_s,
        )


def pair_key(path_a: str, path_b: str) -> Tuple[str, str]:
    """Unordered pair key used by the pair-geometry table."""
    return (path_a, path_b) if path_a <= path_b else (path_b, path_a)


@dataclass(frozen=True)
class AirspaceScenario:
    """Full structural-space description of one runway's TMA."""
    name: str
    runway_id: str
    paths: Tuple[ArrivalPath, ...]
    separation: SeparationPolicy
    pair_geometry: Mapping[Tuple[str, str], PairGeometry] = field(default_factory=dict)
    provenance: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        object.__setattr__(self, "pair_geometry", MappingProxyType(dict(self.pair_geometry)))

    @property
    def active_paths(self) -> Tuple[ArrivalPath, ...]:
        return tuple(path for path in self.paths if path.is_active)

    def path(self, entry_point: str) -> ArrivalPath:
        for path in self.paths:
            if path.entry_point == entry_point:
                return path
        raise KeyError(f"Unknown path '{entry_point}'")

    def geometry_for(self, lead_path: str, trail_path: str) -> PairGeometry:
        """Pair geometry oriented with the leading aircraft's path as k."""
        key = pair_key(lead_path, trail_path)
        if key in self.pair_geometry:
            return self.pair_geometry[key].oriented(lead_path)
        if lead_path == trail_path:
            return same_path_geometry(self.path(lead_path))
        raise KeyError(f"No pair geometry for ({lead_path}, {trail_path})")

    def iter_path_classes(self) -> Iterator[Tuple[ArrivalPath, ClassMix]]:
        """Active (path, class) combinations in document order."""
        for path in self.active_paths:
            for mix in path.active_classes():
                yield path, mix

    def replace_paths(self, paths) -> "AirspaceScenario":
        return replace(self, paths=tuple(paths))

    def with_separation(self, separation: SeparationPolicy) -> "AirspaceScenario":
        return replace(self, separation=separation)

    def without_inactive_paths(self) -> "AirspaceScenario":
        active = {path.entry_point for path in self.active_paths}
        geometry: Dict[Tuple[str, str], PairGeometry] = {
            key: geom for key, geom in self.pair_geometry.items()
            if key[0] in active and key[1] in active
        }
        return replace(self, paths=self.active_paths, pair_geometry=geometry)


def same_path_geometry(path: ArrivalPath) -> PairGeometry:
    """For k = l the common path starts at the entry point."""
    return PairGeometry(
        path_k=path.entry_point,
        path_l=path.entry_point,
        d_common1=path.d_entry_to_mpiap,
        d_common2=path.d_mpiap_to_thr,
        d_entry_to_mpkl_k=0.0,
        d_entry_to_mpkl_l=0.0,
    )
