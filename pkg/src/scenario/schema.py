"""
Document schema for scenario files.

The models mirror the JSON layout one-to-one. They check shape and types
only; the domain invariants are checked by `loader.validate`.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ClassDocument(_Document):
    """Aircraft class flying a path with its average passing speeds."""
    aircraft_class: str = Field(..., alias="class", description="Aircraft class label (e.g. Heavy)")
    proportion: float = Field(..., description="Share of the class on this path")
    v_entry_kt: float = Field(..., description="Average speed at the entry point (kt)")
    v_mpiap_kt: float = Field(..., description="Average speed at the IAP merging point (kt)")
    v_thr_kt: float = Field(..., description="Average speed at the runway threshold (kt)")

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class WaypointDocument(_Document):
    name: str = Field(..., description="Fix identifier")
    cum_nm: float = Field(..., description="Along-path distance from the entry point (NM)")


class PathDocument(_Document):
    """One arrival flight path, entry point to runway threshold."""
    entry: str = Field(..., description="Entry point label; also the path label")
    proportion: float = Field(..., description="Traffic proportion of the path")
    d_entry_mpiap_nm: float = Field(..., description="Entry point to IAP merging point (NM)")
    d_mpiap_thr_nm: float = Field(..., description="IAP merging point to threshold (NM)")
    classes: List[ClassDocument] = Field(default_factory=list, description="Aircraft mix")
    waypoints: Optional[List[WaypointDocument]] = Field(None, description="Optional polyline")
    provenance: Optional[str] = Field(None, description="Source of the path lengths")


class SeparationDocument(_Document):
    s_tma_nm: float = Field(..., description="Longitudinal separation inside the TMA (NM)")
    s_thr_nm: float = Field(..., description="Separation when the leader crosses the threshold (NM)")
    s_tma_matrix_nm: Optional[Dict[str, Dict[str, float]]] = Field(
        None, description="Per lead-class / trail-class override of S (NM)"
    )
    allow_sthr_below_s: bool = Field(False, description="Relax S_thr >= S to S_thr > 0")


class PairGeometryDocument(_Document):
    path_a: str = Field(..., description="First path of the pair")
    path_b: str = Field(..., description="Second path of the pair")
    d_common1_nm: float = Field(..., description="MP_kl to IAP merging point along the shared route (NM)")


class ScenarioDocument(_Document):
    """Top-level scenario document."""
    name: str = Field(..., description="Scenario name")
    runway: str = Field(..., description="Runway identifier")
    separation: SeparationDocument
    paths: List[PathDocument] = Field(..., description="Arrival flight paths")
    pair_geometry: List[PairGeometryDocument] = Field(default_factory=list)
    provenance: Optional[str] = Field(None, description="Where the numbers come from")
    notes: Optional[List[str]] = Field(None, description="Free-form analyst notes")
