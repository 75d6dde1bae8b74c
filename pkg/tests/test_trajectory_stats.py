import json

import pandas as pd
import pytest

from src.trajectory import (
    ExtractionError,
    GateNotPassedError,
    assign_path,
    build_tables,
    gate_speed,
    load_flights,
    load_gates,
    scenario_skeleton,
)
from src.trajectory.gates import Fix, closest_approach
from tests.builders import ENTRY_FIXES as ENTRIES
from tests.builders import MPIAP_FIX as MPIAP
from tests.builders import THRESHOLD_FIX as THRESHOLD
from tests.builders import arrival_track, gate_doc, straight_track


GATE_DOC = gate_doc()

MEDIUM_SPEEDS = (300.0, 200.0, 140.0)
HEAVY_SPEEDS = (280.0, 190.0, 150.0)


@pytest.fixture(scope="module")
def gates():
    return load_gates(GATE_DOC)


def _fleet():
    tracks = []
    counts = {"N": 72, "E": 22, "W": 4, "NE": 1, "NW": 1}
    for label, count in counts.items():
        for index in range(count):
            heavy = label == "N" and index < 5
            tracks.append(arrival_track(f"{label}{index:03d}", label,
                                        "Heavy" if heavy else "Medium",
                                        HEAVY_SPEEDS if heavy else MEDIUM_SPEEDS))
    tracks.append(straight_track("LOST", [ENTRIES["N"], MPIAP], (300.0, 200.0)))
    return pd.concat(tracks, ignore_index=True)


def test_gate_speed_at_fix(gates):
    track = arrival_track("F1", "N")
    north = gates.paths[0]
    assert gate_speed(track, north.entry) == pytest.approx(300.0)
    assert gate_speed(track, north.mpiap) == pytest.approx(200.0)
    assert gate_speed(track, north.threshold) == pytest.approx(140.0)


def test_gate_speed_midway_through_deceleration():
    start = {"lat": 34.0, "lon": 126.5}
    end = {"lat": 33.0, "lon": 126.5}
    track = straight_track("F2", [start, end], (340.0, 180.0), points_per_leg=20)
    fix = Fix("MID", 33.5, 126.5)
    assert gate_speed(track, fix) == pytest.approx(260.0)


def test_earliest_point_wins_a_distance_tie():
    track = pd.DataFrame({
        "flight_id": "F3",
        "timestamp_unix_s": [0.0, 10.0, 20.0, 30.0],
        "lat_deg": [33.7, 33.6, 33.6, 33.5],
        "lon_deg": [126.5, 126.5, 126.5, 126.5],
        "ground_speed_kt": [220.0, 210.0, 200.0, 190.0],
        "aircraft_class": "Medium",
    })
    fix = Fix("MPIAP", 33.6, 126.5)
    assert closest_approach(track, fix)[0] == 1
    assert gate_speed(track, fix) == 210.0


def test_gate_not_passed():
    track = arrival_track("F4", "N")
    with pytest.raises(GateNotPassedError) as info:
        gate_speed(track, Fix("EAST", 33.6, 127.7))
    assert info.value.fix == "EAST"
    assert info.value.closest_nm > 3.0


def test_assign_path(gates):
    assert assign_path(arrival_track("F5", "E"), gates) == "E"
    assert assign_path(arrival_track("F6", "NW"), gates) == "NW"


def test_unmatched_tracks(gates):
    assert assign_path(straight_track("F7", [ENTRIES["N"], MPIAP], (300.0, 200.0)), gates) is None
    assert assign_path(straight_track("F8", [THRESHOLD, MPIAP, ENTRIES["N"]], (140.0, 200.0, 300.0)), gates) is None
    assert assign_path(arrival_track("F9", "N").iloc[:1], gates) is None


def test_first_entry_passed_wins(gates):
    track = straight_track("F10", [ENTRIES["E"], ENTRIES["N"], MPIAP, THRESHOLD], (320.0, 300.0, 200.0, 140.0))
    assert assign_path(track, gates) == "E"


def test_tables_from_fleet(gates):
    tables = build_tables(_fleet(), gates)
    proportions = tables.proportions.set_index("path")["proportion"]
    assert list(tables.proportions["path"]) == ["N", "E", "W", "NE", "NW"]
    assert proportions["N"] == pytest.approx(0.72)
    assert proportions["E"] == pytest.approx(0.22)
    assert proportions["NW"] == pytest.approx(0.01)
    assert tables.matched_count == 100
    assert tables.unmatched_count == 1

    north = tables.class_mix[tables.class_mix["path"] == "N"]
    assert list(north["aircraft_class"]) == ["Heavy", "Medium"]
    assert list(north["proportion"]) == pytest.approx([5 / 72, 67 / 72])

    heavy = tables.speeds[(tables.speeds["path"] == "N") & (tables.speeds["aircraft_class"] == "Heavy")].iloc[0]
    assert (heavy["v_entry_kt"], heavy["v_mpiap_kt"], heavy["v_thr_kt"]) == pytest.approx(HEAVY_SPEEDS)


def test_speeds_are_arithmetic_means(gates):
    flights = pd.concat([
        arrival_track("A1", "W", speeds_kt=(290.0, 190.0, 130.0)),
        arrival_track("A2", "W", speeds_kt=(310.0, 210.0, 150.0)),
    ], ignore_index=True)
    tables = build_tables(flights, gates)
    west = tables.speeds.iloc[0]
    assert (west["v_entry_kt"], west["v_mpiap_kt"], west["v_thr_kt"]) == pytest.approx((300.0, 200.0, 140.0))
    assert list(tables.proportions["flights"]) == [0, 0, 2, 0, 0]


def test_tables_are_deterministic(gates):
    flights = _fleet()
    first = build_tables(flights, gates)
    second = build_tables(flights.sample(frac=1.0, random_state=5), gates)
    pd.testing.assert_frame_equal(first.proportions, second.proportions)
    pd.testing.assert_frame_equal(first.class_mix, second.class_mix)
    pd.testing.assert_frame_equal(first.speeds, second.speeds)


def test_no_matched_flight(gates):
    with pytest.raises(ExtractionError):
        build_tables(straight_track("LOST", [ENTRIES["N"], MPIAP], (300.0, 200.0)), gates)


def test_skeleton(gates):
    skeleton = scenario_skeleton(build_tables(_fleet(), gates), "RWY07")
    assert skeleton["runway"] == "RWY07"
    assert [p["entry"] for p in skeleton["paths"]] == ["N", "E", "W", "NE", "NW"]
    assert skeleton["paths"][0]["d_entry_mpiap_nm"] is None
    assert skeleton["pair_geometry"] == []
    assert [c["class"] for c in skeleton["paths"][0]["classes"]] == ["Heavy", "Medium"]
    assert skeleton["paths"][1]["classes"][0]["v_mpiap_kt"] == pytest.approx(200.0)
    assert "100 matched" in skeleton["provenance"]


def test_load_flights(tmp_path):
    csv_path = tmp_path / "tracks.csv"
    arrival_track("F1", "N").to_csv(csv_path, index=False)
    flights = load_flights(csv_path)
    assert flights["flight_id"].iloc[0] == "F1"

    arrival_track("F1", "N").drop(columns="aircraft_class").to_csv(csv_path, index=False)
    with pytest.raises(ExtractionError, match="aircraft_class"):
        load_flights(csv_path)

    stopped = arrival_track("F1", "N")
    stopped.loc[3, "ground_speed_kt"] = 0.0
    stopped.to_csv(csv_path, index=False)
    with pytest.raises(ExtractionError):
        load_flights(csv_path)

    with pytest.raises(FileNotFoundError):
        load_flights(tmp_path / "absent.csv")


def test_load_flights_rejects_non_increasing_timestamps(tmp_path):
    csv_path = tmp_path / "tracks.csv"
    repeated = arrival_track("F1", "N")
    repeated.loc[4, "timestamp_unix_s"] = repeated.loc[3, "timestamp_unix_s"]
    pd.concat([arrival_track("F0", "E"), repeated], ignore_index=True).to_csv(csv_path, index=False)
    with pytest.raises(ExtractionError, match="F1"):
        load_flights(csv_path)

    backwards = arrival_track("F2", "N")
    backwards.loc[[5, 6], "timestamp_unix_s"] = backwards.loc[[6, 5], "timestamp_unix_s"].to_numpy()
    backwards.to_csv(csv_path, index=False)
    with pytest.raises(ExtractionError, match="strictly increase"):
        load_flights(csv_path)


def test_load_gates_file(tmp_path):
    gate_path = tmp_path / "gates.json"
    gate_path.write_text(json.dumps(GATE_DOC), encoding="utf-8")
    gate_set = load_gates(gate_path, radius_nm=2.0)
    assert gate_set.labels == ["N", "E", "W", "NE", "NW"]
    assert gate_set.paths[0].entry.radius_nm == 2.0

    with pytest.raises(FileNotFoundError):
        load_gates(tmp_path / "absent.json")

    gate_path.write_text("[{", encoding="utf-8")
    with pytest.raises(ExtractionError):
        load_gates(gate_path)


def test_malformed_gate_documents():
    with pytest.raises(ExtractionError, match="not distinct"):
        load_gates([{"path": "X", "entry": MPIAP, "mpiap": MPIAP, "threshold": THRESHOLD}])
    with pytest.raises(ExtractionError, match="duplicate"):
        load_gates(GATE_DOC + GATE_DOC[:1])
    with pytest.raises(ExtractionError):
        load_gates([{**GATE_DOC[0], "extra": 1}])
    with pytest.raises(ExtractionError):
        load_gates([])
