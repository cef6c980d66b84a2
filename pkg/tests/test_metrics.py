import math

import pytest

from sensing.errors import EmptyInput, VerticalLine
from sensing.metrics import (
    assign_nearest_reference,
    error_stats,
    evaluate_points,
    fit_line,
    point_line_deviation,
    rp_errors,
)
from sensing.model import Point2, ReferenceLine, ReferenceSegment, RpEstimate
from sensing.pipeline import CloudPoint

EB_ENDS = (Point2(46.78, 46.57), Point2(41.1, 106.57))
ROUTE1 = [(46.4, 36.35), (45.45, 42.91), (46.09, 50.36), (50.53, 47.11), (44.58, 64.38),
          (47.51, 65.90), (40.87, 75.03), (43.46, 82.92), (45.87, 83.43), (42.66, 89.26)]
ROUTE2_Y = [53.94, 65.80, 65.73, 65.89, 65.90, 65.86, 65.31, 67.01]
CORRIDOR = [ReferenceLine(0.0, 53.38, "sidewalk"), ReferenceLine(0.0, 50.38, "building"),
            ReferenceLine(0.0, 65.30, "south")]


def eb_line():
    return fit_line(*EB_ENDS, name="EB", decimals=2)


def test_fit_line_east_building():
    exact = fit_line(*EB_ENDS)
    assert exact.a_l == pytest.approx(-10.56, abs=0.005)
    assert exact.b_l == pytest.approx(540.7, abs=0.1)
    rounded = eb_line()
    assert (rounded.a_l, rounded.b_l) == (-10.56, 540.72)


@pytest.mark.parametrize("p1, p2, a, b", [
    ((0, 0), (1, 1), 1.0, 0.0),
    ((0, 5), (10, 5), 0.0, 5.0),
])
def test_fit_line_simple(p1, p2, a, b):
    line = fit_line(Point2(*p1), Point2(*p2))
    assert (line.a_l, line.b_l) == pytest.approx((a, b))


def test_fit_line_vertical():
    with pytest.raises(VerticalLine):
        fit_line(Point2(3, 0), Point2(3, 9))


@pytest.mark.parametrize("rp, expected", [((50.53, 47.11), 3.77), ((42.66, 89.26), 0.09)])
def test_route1_extremes(rp, expected):
    assert point_line_deviation(Point2(*rp), eb_line()) == pytest.approx(expected, abs=0.02)


def test_point_on_line_has_no_deviation():
    line = ReferenceLine(2.0, -1.0)
    assert point_line_deviation(Point2(3.0, 5.0), line) == pytest.approx(0.0, abs=1e-12)


def test_swapped_line_measures_along_x():
    wall = ReferenceLine(0.0, 4.0, swapped=True)   # x = 4
    assert point_line_deviation(Point2(1.0, 100.0), wall) == pytest.approx(3.0)


def test_deviation_invariant_under_translation_and_endpoint_swap(rng):
    for _ in range(50):
        p1, p2, rp = (Point2(*rng.uniform(-50, 50, size=2)) for _ in range(3))
        shift = Point2(*rng.uniform(-20, 20, size=2))
        base = point_line_deviation(rp, fit_line(p1, p2))
        assert point_line_deviation(rp, fit_line(p2, p1)) == pytest.approx(base, abs=1e-9)
        moved = point_line_deviation(rp + shift, fit_line(p1 + shift, p2 + shift))
        assert moved == pytest.approx(base, abs=1e-9)


@pytest.mark.parametrize("y, wall, dev", [(53.94, 0, 0.56), (65.31, 2, 0.01)])
def test_route2_nearest_wall(y, wall, dev):
    k, d = assign_nearest_reference(Point2(0.0, y), CORRIDOR)
    assert k == wall
    assert d == pytest.approx(dev, abs=1e-9)


def test_nearest_wall_tie_goes_to_first():
    walls = [ReferenceLine(0.0, 0.0), ReferenceLine(0.0, 2.0)]
    assert assign_nearest_reference(Point2(0.0, 1.0), walls)[0] == 0


def test_segment_distance_clamps_to_endpoint():
    seg = ReferenceSegment(Point2(0.0, 0.0), Point2(10.0, 0.0))
    k, d = assign_nearest_reference(Point2(13.0, 4.0), [seg])
    assert d == pytest.approx(5.0)


def test_nearest_is_no_worse_than_any_wall(rng):
    walls = [ReferenceLine(*rng.uniform(-3, 3, size=2)) for _ in range(5)]
    for _ in range(50):
        rp = Point2(*rng.uniform(-10, 10, size=2))
        _, d = assign_nearest_reference(rp, walls)
        assert all(d <= point_line_deviation(rp, w) for w in walls)


def test_route1_table_statistics():
    report = evaluate_points([Point2(*p) for p in ROUTE1], [eb_line()])
    assert report.min == pytest.approx(0.09, abs=0.02)
    assert report.max == pytest.approx(3.76, abs=0.02)
    assert report.mean == pytest.approx(1.62, abs=0.02)
    assert report.paper_rmse == pytest.approx(1.28, abs=0.02)


def test_route2_table_statistics():
    report = evaluate_points([Point2(0.0, y) for y in ROUTE2_Y], CORRIDOR)
    assert report.min == pytest.approx(0.01, abs=0.02)
    assert report.max == pytest.approx(1.71, abs=0.02)
    assert report.mean == pytest.approx(0.62, abs=0.02)
    assert report.paper_rmse == pytest.approx(0.45, abs=0.02)


def test_unnormalized_formula_does_not_reproduce_route1():
    corrected = evaluate_points([Point2(*p) for p in ROUTE1], [eb_line()])
    legacy = evaluate_points([Point2(*p) for p in ROUTE1], [eb_line()], unnormalized=True)
    assert abs(legacy.mean - corrected.mean) > 1.0


def test_constant_deviations():
    report = error_stats([2.0, 2.0])
    assert report.min == report.max == report.mean == 2.0
    assert report.paper_rmse == 0.0
    assert report.true_rmse == pytest.approx(2.0)


def test_rms_decomposes_into_mean_and_spread(rng):
    devs = rng.uniform(0, 5, size=30)
    r = error_stats(devs)
    assert r.true_rmse ** 2 == pytest.approx(r.mean ** 2 + r.paper_rmse ** 2, abs=1e-12)
    assert r.true_rmse >= r.paper_rmse
    assert r.true_rmse >= abs(r.mean)


def test_cdf_is_empirical_distribution():
    r = error_stats([3.0, 1.0, 2.0, 4.0])
    assert r.cdf == [(1.0, 0.25), (2.0, 0.5), (3.0, 0.75), (4.0, 1.0)]


def test_error_stats_rejects_empty():
    with pytest.raises(EmptyInput):
        error_stats([])


def test_report_dict_layout():
    r = evaluate_points([Point2(0.0, 53.94)], CORRIDOR).to_dict()
    assert set(r) == {"per_point", "min", "max", "mean", "paper_rmse", "true_rmse", "cdf"}
    assert r["per_point"] == [{"wall": "sidewalk", "deviation_m": pytest.approx(0.56)}]
    assert math.isclose(r["cdf"][0][1], 1.0)


def _rp(x, y, ue_id, mpc_index):
    return RpEstimate(Point2(x, y), 1.0, 0.0, ue_id=ue_id, mpc_index=mpc_index)


def test_rp_errors_against_simulated_points():
    truth = {("u1", 1): (1, Point2(0.0, -5.0)), ("u1", 2): (1, Point2(5.0, 0.0)),
             ("u1", 3): (2, Point2(-5.0, 0.0)), ("u1", 0): (0, None)}
    estimates = [_rp(0.3, -5.4, "u1", 1), CloudPoint(_rp(5.0, 0.0, "u1", 2), None),
                 _rp(-5.0, 0.0, "u1", 3), _rp(1.0, 1.0, "u2", 1)]
    report = rp_errors(estimates, truth)
    assert report.per_point == [("u1/1", pytest.approx(0.5)), ("u1/2", 0.0)]
    assert report.unmatched == ["u1/3", "u2/1"]
    assert report.max == pytest.approx(0.5)
    d = report.to_dict()
    assert d["per_point"][0] == {"path": "u1/1", "deviation_m": pytest.approx(0.5)}
    assert d["unmatched"] == ["u1/3", "u2/1"]


def test_rp_errors_with_nothing_to_score():
    with pytest.raises(EmptyInput):
        rp_errors([_rp(1.0, 1.0, "u1", 0)], {("u1", 0): (0, None)})
