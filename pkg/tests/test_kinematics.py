import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.model.kinematics import (
    KinematicsError,
    path_flight_time,
    segment_accel,
    speed_at_offset,
    time_to_cover,
    upstream_extrapolated_speed,
)
from src.scenario.models import SpeedProfile
from tests.builders import arrival_path


PROFILE = SpeedProfile(6.0, 3.0, 2.0)


def test_segment_accel():
    assert segment_accel(30, 6, 3) == pytest.approx(-0.45)
    assert segment_accel(10, 3, 2) == pytest.approx(-0.25)
    assert segment_accel(10, 4, 4) == 0.0


@pytest.mark.parametrize("length, v_start, v_end", [(0, 5, 4), (-1, 5, 4), (10, 3, 4), (10, 3, 0)])
def test_segment_accel_rejects_out_of_domain(length, v_start, v_end):
    with pytest.raises(KinematicsError):
        segment_accel(length, v_start, v_end)


def test_path_flight_time():
    path = arrival_path(30, 10, PROFILE)
    assert path_flight_time(path, PROFILE) == pytest.approx(30 / 4.5 + 10 / 2.5)
    assert path_flight_time(path, PROFILE) == pytest.approx(10.6667, abs=1e-4)


def test_speed_at_offset():
    path = arrival_path(30, 10, PROFILE)
    assert speed_at_offset(path, PROFILE, 0) == pytest.approx(6.0)
    assert speed_at_offset(path, PROFILE, 15) == pytest.approx(math.sqrt(22.5))
    assert speed_at_offset(path, PROFILE, 30) == pytest.approx(3.0)
    assert speed_at_offset(path, PROFILE, 40) == pytest.approx(2.0)
    with pytest.raises(KinematicsError):
        speed_at_offset(path, PROFILE, 40.5)


def test_upstream_extrapolated_speed():
    assert upstream_extrapolated_speed(PROFILE, -0.45, 4) == pytest.approx(math.sqrt(39.6))
    assert upstream_extrapolated_speed(PROFILE, -0.45, 0) == pytest.approx(6.0)
    with pytest.raises(KinematicsError):
        upstream_extrapolated_speed(PROFILE, -0.45, -1)


def test_flight_time_matches_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(50):
        v_entry, v_mpiap, v_thr = sorted(rng.uniform(140, 400, size=3) / 60, reverse=True)
        profile = SpeedProfile(v_entry, v_mpiap, v_thr)
        d1, d2 = rng.uniform(5, 60, size=2)
        path = arrival_path(d1, d2, profile)

        def pace(x):
            return 1.0 / speed_at_offset(path, profile, x)

        first, _ = quad(pace, 0, d1, epsabs=1e-12, epsrel=1e-12)
        second, _ = quad(pace, d1, d1 + d2, epsabs=1e-12, epsrel=1e-12)
        assert path_flight_time(path, profile) == pytest.approx(first + second, rel=1e-8)


def test_time_to_cover_matches_quadrature():
    v_start, accel, distance = 5.0, -0.3, 12.0
    expected, _ = quad(lambda x: 1.0 / math.sqrt(v_start ** 2 + 2 * accel * x), 0, distance)
    assert time_to_cover(v_start, accel, distance) == pytest.approx(expected, rel=1e-9)
    assert time_to_cover(4.0, 0.0, 8.0) == pytest.approx(2.0)
    assert time_to_cover(4.0, -0.1, 0.0) == 0.0


def test_speed_never_increases_along_the_path():
    rng = np.random.default_rng(11)
    for _ in range(20):
        profile = SpeedProfile(*sorted(rng.uniform(140, 400, size=3) / 60, reverse=True))
        d1, d2 = rng.uniform(5, 60, size=2)
        path = arrival_path(d1, d2, profile)
        speeds = [speed_at_offset(path, profile, x) for x in np.linspace(0, d1 + d2, 1000)]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(speeds, speeds[1:]))


def test_segment_time_is_length_over_mean_of_end_speeds():
    rng = np.random.default_rng(3)
    for _ in range(20):
        v_entry, v_mpiap, v_thr = sorted(rng.uniform(140, 400, size=3) / 60, reverse=True)
        profile = SpeedProfile(v_entry, v_mpiap, v_thr)
        d1, d2 = rng.uniform(5, 60, size=2)
        path = arrival_path(d1, d2, profile)

        def pace(x):
            return 1.0 / speed_at_offset(path, profile, x)

        first, _ = quad(pace, 0, d1, epsabs=1e-12, epsrel=1e-12)
        second, _ = quad(pace, d1, d1 + d2, epsabs=1e-12, epsrel=1e-12)
        assert d1 / first == pytest.approx((v_entry + v_mpiap) / 2, rel=1e-8)
        assert d2 / second == pytest.approx((v_mpiap + v_thr) / 2, rel=1e-8)
