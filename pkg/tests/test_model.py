import math

import numpy as np
import pytest

from sensing.errors import GeometryError, InvariantError
from sensing.model import (
    LinkState,
    MpcRecord,
    Point2,
    RpEstimate,
    UeObservation,
    Wall,
    arrival_direction,
    aoa_from_direction,
    normalize_angle,
    reduce_half_turn,
    wrap_angle,
)


@pytest.mark.parametrize("value", [math.nan, math.inf, -math.inf])
def test_point_rejects_non_finite(value):
    with pytest.raises(InvariantError):
        Point2(value, 0.0)


def test_normalize_angle_range_and_idempotence():
    for a in [-7.0, -math.pi, 0.0, 1.0, 2 * math.pi, 13.0, -1e-18]:
        n = normalize_angle(a)
        assert 0.0 <= n < 2 * math.pi
        assert normalize_angle(n) == n


def test_wrap_and_half_turn():
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert reduce_half_turn(3 * math.pi / 4) == pytest.approx(-math.pi / 4)
    assert reduce_half_turn(-math.pi / 2) == pytest.approx(math.pi / 2)


def test_arrival_direction_round_trip():
    for deg in range(0, 360, 15):
        a = math.radians(deg)
        assert aoa_from_direction(arrival_direction(a) * 3.0) == pytest.approx(a, abs=1e-12)


def test_mpc_normalizes_aoa_and_rejects_bad_delay():
    assert MpcRecord(-80.0, 1e-8, math.radians(370)).aoa_rad == pytest.approx(0.1745, abs=1e-4)
    with pytest.raises(InvariantError, match="nonphysical delay"):
        MpcRecord(-80.0, -1e-9, 0.0)


def test_observation_layout():
    obs = UeObservation(7, Point2(3.0, 4.0), LinkState.LOS)
    assert obs.ue_id == "7"
    assert (obs.d_u_ue, obs.d_bs_u, obs.baseline_m) == (3.0, 4.0, 5.0)
    with pytest.raises(InvariantError):
        UeObservation("x", Point2(0.0, 0.0), LinkState.LOS)


def test_reference_rank():
    assert LinkState.LOS.reference_rank == 2
    assert LinkState.NLOS.reference_rank == 1


def test_wall_validation_and_distance():
    with pytest.raises(GeometryError):
        Wall(Point2(1, 1), Point2(1, 1))
    with pytest.raises(InvariantError):
        Wall(Point2(0, 0), Point2(1, 0), reflection_loss_db=-1.0)
    w = Wall(Point2(0, 0), Point2(4, 0), 5.0)
    assert w.distance_to(Point2(6, 0)) == pytest.approx(2.0)
    assert w.loss_at(0.3) == 5.0


def test_wall_loss_hook_adds_to_constant_loss():
    w = Wall(Point2(0, 0), Point2(4, 0), 5.0, loss_hook=lambda inc: 2.0 * inc)
    assert w.loss_at(0.5) == pytest.approx(6.0)


def test_estimate_requires_positive_distance():
    with pytest.raises(InvariantError):
        RpEstimate(Point2(1, 1), 0.0, 0.0)


def test_random_draws_follow_seed_option(rng, seed, pytestconfig):
    assert seed == pytestconfig.getoption("--seed")
    assert rng.integers(1 << 30) == np.random.default_rng(seed).integers(1 << 30)
