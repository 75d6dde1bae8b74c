"""
Scenario loading and validation.

Loads a scenario document, converts it into the immutable domain model and
checks every structural invariant. Loading rejects any scenario that
`validate` would flag, so downstream modules can trust what they receive.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from pydantic import ValidationError

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
    pair_key,
)
from .schema import ScenarioDocument


logger = logging.getLogger(__name__)

SUM_TOLERANCE = 1e-9
LENGTH_TOLERANCE = 1e-9
WAYPOINT_TOLERANCE = 1e-6


class ScenarioError(Exception):
    """Base class for scenario loading failures."""


class ScenarioSchemaError(ScenarioError):
    """Raised when a document does not conform to the scenario schema."""

    def __init__(self, message: str, errors: List[str]):
        self.errors = errors
        super().__init__(message)


class ScenarioValidationError(ScenarioError):
    """Raised when a well-formed document breaks a scenario invariant."""

    def __init__(self, message: str, violations: List[str]):
        self.violations = violations
        super().__init__(message)


def load_scenario(source: Union[str, Path, Mapping[str, Any]]) -> AirspaceScenario:
    """
    Load and validate a scenario.

    Args:
        source: Path to a JSON scenario file, or an already-parsed document

    Returns:
        The validated, immutable scenario

    Raises:
        FileNotFoundError: If a path is given and does not exist
        ScenarioSchemaError: If the document does not match the schema
        ScenarioValidationError: If any scenario invariant is violated
    """
    if isinstance(source, Mapping):
        document = source
        origin = "<document>"
    else:
        path = Path(source)
        if not path.exists():
            raise FileNotFoundError(f"Scenario file not found: {path}")
        document = _read_json(path.read_text(encoding="utf-8"), str(path))
        origin = str(path)

    scenario = _build_scenario(_parse_document(document, origin), origin)
    logger.info("✓ Loaded scenario %s (runway %s, %d active paths)",
                scenario.name, scenario.runway_id, len(scenario.active_paths))
    return scenario


def loads_scenario(text: str) -> AirspaceScenario:
    """Load a scenario from JSON text."""
    return load_scenario(_read_json(text, "<text>"))


def _read_json(text: str, origin: str) -> Mapping[str, Any]:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioSchemaError(f"{origin}: not valid JSON ({e})", [str(e)]) from e


def _parse_document(document: Mapping[str, Any], origin: str) -> ScenarioDocument:
    try:
        return ScenarioDocument.model_validate(document)
    except ValidationError as e:
        errors = [
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in e.errors()
        ]
        raise ScenarioSchemaError(
            f"{origin}: schema violation ({len(errors)} error(s)): " + "; ".join(errors),
            errors,
        ) from e


def _build_scenario(doc: ScenarioDocument, origin: str) -> AirspaceScenario:
    violations: List[str] = []

    paths = tuple(
        ArrivalPath(
            entry_point=p.entry,
            traffic_proportion=p.proportion,
            d_entry_to_mpiap=p.d_entry_mpiap_nm,
            d_mpiap_to_thr=p.d_mpiap_thr_nm,
            class_mix=tuple(
                ClassMix(
                    aircraft_class=c.aircraft_class,
                    proportion=c.proportion,
                    profile=SpeedProfile(
                        v_entry=kt_to_nm_per_min(c.v_entry_kt),
                        v_mpiap=kt_to_nm_per_min(c.v_mpiap_kt),
                        v_thr=kt_to_nm_per_min(c.v_thr_kt),
                    ),
                )
                for c in p.classes
            ),
            waypoints=tuple(Waypoint(w.name, w.cum_nm) for w in (p.waypoints or [])),
            provenance=p.provenance,
        )
        for p in doc.paths
    )
    by_name = {path.entry_point: path for path in paths}

    matrix: Dict[Tuple[str, str], float] = {}
    for lead_class, row in (doc.separation.s_tma_matrix_nm or {}).items():
        for trail_class, value in row.items():
            matrix[(lead_class, trail_class)] = value
    separation = SeparationPolicy(
        s_tma=doc.separation.s_tma_nm,
        s_thr=doc.separation.s_thr_nm,
        class_matrix=matrix,
        allow_sthr_below_s=doc.separation.allow_sthr_below_s,
    )

    geometry: Dict[Tuple[str, str], PairGeometry] = {}
    for entry in doc.pair_geometry:
        missing = [name for name in (entry.path_a, entry.path_b) if name not in by_name]
        if missing:
            violations.append(
                f"pair geometry ({entry.path_a}, {entry.path_b}) references unknown path(s) {', '.join(missing)}"
            )
            continue
        key = pair_key(entry.path_a, entry.path_b)
        if key in geometry:
            violations.append(f"pair geometry ({key[0]}, {key[1]}) listed more than once")
            continue
        geometry[key] = geometry_from_common1(by_name[key[0]], by_name[key[1]], entry.d_common1_nm)

    active = [path for path in paths if path.is_active]
    for i, path_k in enumerate(active):
        for path_l in active[i + 1:]:
            key = pair_key(path_k.entry_point, path_l.entry_point)
            if key in geometry or not (path_k.waypoints and path_l.waypoints):
                continue
            d_common1, problem = derive_common1_from_waypoints(by_name[key[0]], by_name[key[1]])
            if problem:
                violations.append(problem)
            else:
                geometry[key] = geometry_from_common1(by_name[key[0]], by_name[key[1]], d_common1)

    scenario = AirspaceScenario(
        name=doc.name,
        runway_id=doc.runway,
        paths=paths,
        separation=separation,
        pair_geometry=geometry,
        provenance=doc.provenance,
    )

    violations.extend(validate(scenario))
    if violations:
        raise ScenarioValidationError(
            f"{origin}: {len(violations)} invariant violation(s): " + "; ".join(violations),
            violations,
        )
    return scenario


def geometry_from_common1(path_k: ArrivalPath, path_l: ArrivalPath, d_common1: float) -> PairGeometry:
    """Complete a pair's geometry from the length of its common subpath 1."""
    return PairGeometry(
        path_k=path_k.entry_point,
        path_l=path_l.entry_point,
        d_common1=d_common1,
        d_common2=path_k.d_mpiap_to_thr,
        d_entry_to_mpkl_k=path_k.d_entry_to_mpiap - d_common1,
        d_entry_to_mpkl_l=path_l.d_entry_to_mpiap - d_common1,
    )


def derive_common1_from_waypoints(path_k: ArrivalPath, path_l: ArrivalPath) -> Tuple[float, Optional[str]]:
    """
    Derive d_common1 from the longest shared suffix of the two polylines.

    Returns:
        (d_common1, None) on success, (nan, violation message) otherwise
    """
    names_k = [w.name for w in path_k.waypoints]
    names_l = [w.name for w in path_l.waypoints]
    shared = 0
    while (shared < min(len(names_k), len(names_l))
           and names_k[-1 - shared] == names_l[-1 - shared]):
        shared += 1
    label = f"({path_k.entry_point}, {path_l.entry_point})"
    if shared == 0:
        return math.nan, f"waypoints of {label} share no common suffix"

    first_k = path_k.waypoints[-shared]
    first_l = path_l.waypoints[-shared]
    common1_k = max(0.0, path_k.d_entry_to_mpiap - first_k.cum_nm)
    common1_l = max(0.0, path_l.d_entry_to_mpiap - first_l.cum_nm)
    if abs(common1_k - common1_l) > WAYPOINT_TOLERANCE:
        return math.nan, (
            f"waypoint geometry of {label} disagrees on the common path from {first_k.name} "
            f"({common1_k:.6g} vs {common1_l:.6g} NM)"
        )
    return common1_k, None


def validate(scenario: AirspaceScenario) -> List[str]:
    """
    Check every scenario invariant.

    Args:
        scenario: The scenario to check

    Returns:
        A list of human-readable violations; empty when the scenario is valid
    """
    violations: List[str] = []
    paths = scenario.paths

    if not paths:
        return ["scenario has no arrival paths"]

    names = [path.entry_point for path in paths]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    for name in duplicates:
        violations.append(f"path {name} is defined more than once")

    for path in paths:
        if not 0.0 <= path.traffic_proportion <= 1.0:
            violations.append(f"traffic proportion of path {path.entry_point} is {path.traffic_proportion:.6g}, outside [0, 1]")
    total = math.fsum(path.traffic_proportion for path in paths)
    if abs(total - 1.0) > SUM_TOLERANCE:
        violations.append(f"path proportions sum to {total:.6g}")
    if not scenario.active_paths:
        violations.append("scenario has no path with a nonzero traffic proportion")

    for path in paths:
        violations.extend(_path_violations(path))

    d2_values = sorted({path.d_mpiap_to_thr for path in paths})
    if d2_values and d2_values[-1] - d2_values[0] > LENGTH_TOLERANCE:
        violations.append(
            "paths disagree on the IAP merging point to threshold length "
            f"({', '.join(f'{value:.6g}' for value in d2_values)} NM)"
        )

    violations.extend(_separation_violations(scenario.separation))
    violations.extend(_geometry_violations(scenario))
    return violations


def _path_violations(path: ArrivalPath) -> List[str]:
    violations: List[str] = []
    label = path.entry_point
    if not path.d_entry_to_mpiap > 0:
        violations.append(f"path {label}: entry to MP_iap length must be positive, got {path.d_entry_to_mpiap:.6g}")
    if not path.d_mpiap_to_thr > 0:
        violations.append(f"path {label}: MP_iap to threshold length must be positive, got {path.d_mpiap_to_thr:.6g}")

    if path.is_active and not path.class_mix:
        violations.append(f"path {label} carries traffic but lists no aircraft classes")

    if path.class_mix:
        classes = [mix.aircraft_class for mix in path.class_mix]
        for name in sorted({c for c in classes if classes.count(c) > 1}):
            violations.append(f"class {name} listed more than once on path {label}")
        for mix in path.class_mix:
            if not 0.0 <= mix.proportion <= 1.0:
                violations.append(f"class {mix.aircraft_class} on path {label} has proportion {mix.proportion:.6g}, outside [0, 1]")
        mix_total = math.fsum(mix.proportion for mix in path.class_mix)
        if abs(mix_total - 1.0) > SUM_TOLERANCE:
            violations.append(f"class mix on path {label} sums to {mix_total:.6g}")

    for mix in path.class_mix:
        profile = mix.profile
        where = f"path {label} (class {mix.aircraft_class})"
        if min(profile.v_entry, profile.v_mpiap, profile.v_thr) <= 0:
            violations.append(f"non-positive speed on {where}")
            continue
        if profile.v_mpiap > profile.v_entry:
            violations.append(f"accelerating segment entry→MP_iap on {where}")
        if profile.v_thr > profile.v_mpiap:
            violations.append(f"accelerating segment MP_iap→threshold on {where}")

    for previous, current in zip(path.waypoints, path.waypoints[1:]):
        if current.cum_nm < previous.cum_nm:
            violations.append(f"waypoints of path {label} are not in along-path order at {current.name}")
    return violations


def _separation_violations(policy: SeparationPolicy) -> List[str]:
    violations: List[str] = []
    if not policy.s_tma > 0:
        violations.append(f"separation S must be positive, got {policy.s_tma:.6g} NM")
    if policy.allow_sthr_below_s:
        if not policy.s_thr > 0:
            violations.append(f"threshold separation S_thr must be positive, got {policy.s_thr:.6g} NM")
    elif not policy.s_thr >= policy.s_tma:
        violations.append(
            f"threshold separation S_thr ({policy.s_thr:.6g} NM) is below S ({policy.s_tma:.6g} NM); "
            "set allow_sthr_below_s to permit this"
        )
    for (lead_class, trail_class), value in sorted(policy.class_matrix.items()):
        if not value > 0:
            violations.append(f"separation override {lead_class}→{trail_class} must be positive, got {value:.6g} NM")
    return violations


def _geometry_violations(scenario: AirspaceScenario) -> List[str]:
    violations: List[str] = []
    known = {path.entry_point: path for path in scenario.paths}

    for key, geom in sorted(scenario.pair_geometry.items()):
        label = f"pair geometry ({key[0]}, {key[1]})"
        if geom.path_k not in known or geom.path_l not in known:
            violations.append(f"{label} references an unknown path")
            continue
        path_k, path_l = known[geom.path_k], known[geom.path_l]
        if geom.d_common1 < 0:
            violations.append(f"{label}: common subpath 1 length is negative ({geom.d_common1:.6g} NM)")
        for path, d_entry_to_mpkl in ((path_k, geom.d_entry_to_mpkl_k), (path_l, geom.d_entry_to_mpkl_l)):
            if d_entry_to_mpkl < -LENGTH_TOLERANCE:
                violations.append(
                    f"{label}: common subpath 1 ({geom.d_common1:.6g} NM) is longer than the "
                    f"entry to MP_iap segment of path {path.entry_point} ({path.d_entry_to_mpiap:.6g} NM)"
                )
            elif abs(d_entry_to_mpkl + geom.d_common1 - path.d_entry_to_mpiap) > LENGTH_TOLERANCE:
                violations.append(
                    f"{label}: geometry inconsistency on path {path.entry_point} "
                    f"(entry→MP_kl {d_entry_to_mpkl:.6g} + common1 {geom.d_common1:.6g} "
                    f"≠ entry→MP_iap {path.d_entry_to_mpiap:.6g} NM)"
                )
        if abs(geom.d_common2 - path_k.d_mpiap_to_thr) > LENGTH_TOLERANCE:
            violations.append(
                f"{label}: common subpath 2 ({geom.d_common2:.6g} NM) differs from the "
                f"MP_iap to threshold length ({path_k.d_mpiap_to_thr:.6g} NM)"
            )
        if geom.path_k == geom.path_l and abs(geom.d_common1 - path_k.d_entry_to_mpiap) > LENGTH_TOLERANCE:
            violations.append(
                f"{label}: a path shares its whole entry to MP_iap segment with itself "
                f"(expected {path_k.d_entry_to_mpiap:.6g} NM, got {geom.d_common1:.6g} NM)"
            )

    active = scenario.active_paths
    for i, path_k in enumerate(active):
        for path_l in active[i + 1:]:
            key = pair_key(path_k.entry_point, path_l.entry_point)
            if key not in scenario.pair_geometry:
                violations.append(f"pair geometry missing for active paths ({key[0]}, {key[1]})")
    return violations


def dump_scenario(scenario: AirspaceScenario) -> Dict[str, Any]:
    """Serialize a scenario back into the document layout (speeds in knots)."""
    matrix: Dict[str, Dict[str, float]] = {}
    for (lead_class, trail_class), value in sorted(scenario.separation.class_matrix.items()):
        matrix.setdefault(lead_class, {})[trail_class] = value

    separation: Dict[str, Any] = {
        "s_tma_nm": scenario.separation.s_tma,
        "s_thr_nm": scenario.separation.s_thr,
    }
    if matrix:
        separation["s_tma_matrix_nm"] = matrix
    if scenario.separation.allow_sthr_below_s:
        separation["allow_sthr_below_s"] = True

    paths = []
    for path in scenario.paths:
        entry: Dict[str, Any] = {
            "entry": path.entry_point,
            "proportion": path.traffic_proportion,
            "d_entry_mpiap_nm": path.d_entry_to_mpiap,
            "d_mpiap_thr_nm": path.d_mpiap_to_thr,
            "classes": [
                {
                    "class": mix.aircraft_class,
                    "proportion": mix.proportion,
                    "v_entry_kt": nm_per_min_to_kt(mix.profile.v_entry),
                    "v_mpiap_kt": nm_per_min_to_kt(mix.profile.v_mpiap),
                    "v_thr_kt": nm_per_min_to_kt(mix.profile.v_thr),
                }
                for mix in path.class_mix
            ],
        }
        if path.waypoints:
            entry["waypoints"] = [{"name": w.name, "cum_nm": w.cum_nm} for w in path.waypoints]
        if path.provenance:
            entry["provenance"] = path.provenance
        paths.append(entry)

    document: Dict[str, Any] = {
        "name": scenario.name,
        "runway": scenario.runway_id,
        "separation": separation,
        "paths": paths,
        "pair_geometry": [
            {"path_a": key[0], "path_b": key[1], "d_common1_nm": geom.d_common1}
            for key, geom in sorted(scenario.pair_geometry.items())
        ],
    }
    if scenario.provenance:
        document["provenance"] = scenario.provenance
    return document
