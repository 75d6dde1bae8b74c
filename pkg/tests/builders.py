"""Document and model builders shared by the test modules."""

from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.scenario.models import ArrivalPath, ClassMix, SpeedProfile


def class_doc(name: str, proportion: float, v_entry_kt: float, v_mpiap_kt: float, v_thr_kt: float) -> Dict:
    return {
        "class": name,
        "proportion": proportion,
        "v_entry_kt": v_entry_kt,
        "v_mpiap_kt": v_mpiap_kt,
        "v_thr_kt": v_thr_kt,
    }


def path_doc(entry: str, proportion: float, d_entry_mpiap: float, d_mpiap_thr: float,
             classes: Sequence[Dict], **extra) -> Dict:
    doc = {
        "entry": entry,
        "proportion": proportion,
        "d_entry_mpiap_nm": d_entry_mpiap,
        "d_mpiap_thr_nm": d_mpiap_thr,
        "classes": list(classes),
    }
    doc.update(extra)
    return doc


def scenario_doc(paths: Sequence[Dict], pairs: Sequence[tuple] = (), s: float = 5.0, sthr: float = 8.0,
                 runway: str = "RWY", **separation_extra) -> Dict:
    separation = {"s_tma_nm": s, "s_thr_nm": sthr}
    separation.update(separation_extra)
    return {
        "name": f"test {runway}",
        "runway": runway,
        "separation": separation,
        "paths": list(paths),
        "pair_geometry": [
            {"path_a": a, "path_b": b, "d_common1_nm": d_common1} for a, b, d_common1 in pairs
        ],
    }


def single_path_doc(d_entry_mpiap: float, d_mpiap_thr: float, speeds_kt: Sequence[float],
                    s: float = 5.0, sthr: float = 8.0, classes: Optional[List[Dict]] = None, **separation_extra) -> Dict:
    classes = classes or [class_doc("Medium", 1.0, *speeds_kt)]
    return scenario_doc([path_doc("A", 1.0, d_entry_mpiap, d_mpiap_thr, classes)], s=s, sthr=sthr,
                        **separation_extra)


def constant_speed_doc(speed_nm_per_min: float, d_entry_mpiap: float, d_mpiap_thr: float,
                       s: float = 5.0, sthr: float = 8.0) -> Dict:
    kt = speed_nm_per_min * 60.0
    return single_path_doc(d_entry_mpiap, d_mpiap_thr, (kt, kt, kt), s=s, sthr=sthr)


def arrival_path(d_entry_mpiap: float, d_mpiap_thr: float, profile: SpeedProfile, entry: str = "A",
                 proportion: float = 1.0, aircraft_class: str = "Medium") -> ArrivalPath:
    return ArrivalPath(
        entry_point=entry,
        traffic_proportion=proportion,
        d_entry_to_mpiap=d_entry_mpiap,
        d_mpiap_to_thr=d_mpiap_thr,
        class_mix=(ClassMix(aircraft_class, 1.0, profile),),
    )


MPIAP_FIX = {"name": "MPIAP", "lat": 33.6, "lon": 126.5}
THRESHOLD_FIX = {"name": "THR", "lat": 33.45, "lon": 126.5}
ENTRY_FIXES = {
    "N": {"name": "NORTH", "lat": 34.6, "lon": 126.5},
    "E": {"name": "EAST", "lat": 33.6, "lon": 127.7},
    "W": {"name": "WEST", "lat": 33.6, "lon": 125.3},
    "NE": {"name": "NOREA", "lat": 34.3, "lon": 127.3},
    "NW": {"name": "NOWES", "lat": 34.3, "lon": 125.7},
}


def gate_doc() -> List[Dict]:
    return [{"path": label, "entry": fix, "mpiap": MPIAP_FIX, "threshold": THRESHOLD_FIX}
            for label, fix in ENTRY_FIXES.items()]


def straight_track(flight_id: str, fixes: Sequence[Dict], speeds_kt: Sequence[float],
                   aircraft_class: str = "Medium", points_per_leg: int = 10) -> pd.DataFrame:
    """Straight legs between fixes, every fix sampled exactly, speeds linear between fixes."""
    rows = []
    for (a, v_a), (b, v_b) in zip(zip(fixes, speeds_kt), zip(fixes[1:], speeds_kt[1:])):
        for fraction in np.linspace(0.0, 1.0, points_per_leg, endpoint=False):
            rows.append((a["lat"] + fraction * (b["lat"] - a["lat"]),
                         a["lon"] + fraction * (b["lon"] - a["lon"]),
                         v_a + fraction * (v_b - v_a)))
    last = fixes[-1]
    rows.append((last["lat"], last["lon"], speeds_kt[-1]))
    return pd.DataFrame({
        "flight_id": flight_id,
        "timestamp_unix_s": 10.0 * np.arange(len(rows)),
        "lat_deg": [r[0] for r in rows],
        "lon_deg": [r[1] for r in rows],
        "ground_speed_kt": [r[2] for r in rows],
        "aircraft_class": aircraft_class,
    })


def arrival_track(flight_id: str, entry: str, aircraft_class: str = "Medium",
                  speeds_kt: Sequence[float] = (300.0, 200.0, 140.0)) -> pd.DataFrame:
    return straight_track(flight_id, [ENTRY_FIXES[entry], MPIAP_FIX, THRESHOLD_FIX], speeds_kt, aircraft_class)
