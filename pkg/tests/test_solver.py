import math

import pytest

import config
from conftest import random_solvable_input
from sensing.errors import (
    AmbiguousRoot,
    DegenerateBisector,
    EllipseDegenerate,
    InvariantError,
    NoConvergence,
)
from sensing.model import Point2
from sensing.solver import (
    SolveInput,
    _MirrorSystem,
    mirror_point,
    mirror_residual,
    solve_rp_closed_form,
    solve_rp_root_find,
    triangle_residual,
    wall_tangent_from_bisector,
)


def deg_mod_180(a_deg, b_deg):
    """Distance between two orientations, degrees."""
    diff = (a_deg - b_deg) % 180.0
    return min(diff, 180.0 - diff)


EXAMPLES = [
    # ue, aoa_deg, path length, r, O, theta_deg
    ((10.0, 0.0), 135.0, 14.14214, 7.07107, (5.0, -5.0), 90.0),
    ((10.0, 5.0), 14.0362, 20.61553, 5.15388, (15.0, 3.75), 0.0),
]


@pytest.mark.parametrize("ue, aoa_deg, length, r, o, theta_deg", EXAMPLES)
@pytest.mark.parametrize("solve", [solve_rp_closed_form, solve_rp_root_find])
def test_worked_examples(solve, ue, aoa_deg, length, r, o, theta_deg):
    est = solve(SolveInput(Point2(*ue), math.radians(aoa_deg), length))
    assert est.r_m == pytest.approx(r, abs=1e-4)
    assert est.o.x == pytest.approx(o[0], abs=1e-4)
    assert est.o.y == pytest.approx(o[1], abs=1e-4)
    assert deg_mod_180(est.theta_deg, theta_deg) < 1e-3


def test_closed_form_r_matches_ellipse_formula():
    inp = SolveInput(Point2(10.0, 5.0), math.radians(14.0362), 20.61553)
    est = solve_rp_closed_form(inp)
    # (L^2 - d^2) / (2 (L + p.u)) with L^2 - d^2 ~ 300
    assert est.r_m == pytest.approx(300.0 / 58.2084, abs=1e-3)


@pytest.mark.parametrize("solve", [solve_rp_closed_form, solve_rp_root_find])
def test_path_equal_to_baseline_is_degenerate(solve):
    with pytest.raises(EllipseDegenerate):
        solve(SolveInput(Point2(10.0, 0.0), math.pi, 10.0))


def test_solve_input_rejects_ue_at_bs():
    with pytest.raises(InvariantError):
        SolveInput(Point2(0.0, 0.0), 0.0, 5.0)


def test_solve_input_normalizes_aoa():
    inp = SolveInput(Point2(1.0, 0.0), math.radians(370.0), 5.0)
    assert inp.aoa_rad == pytest.approx(math.radians(10.0))


def test_closed_form_and_root_finder_agree(rng):
    for _ in range(1000):
        ue, aoa, length, o_true = random_solvable_input(rng)
        inp = SolveInput(ue, aoa, length)
        closed = solve_rp_closed_form(inp)
        root = solve_rp_root_find(inp)

        assert abs(closed.r_m - root.r_m) < 1e-8
        assert deg_mod_180(closed.theta_deg, root.theta_deg) < math.degrees(1e-8)
        assert closed.o.distance_to(o_true) < 1e-6
        for est in (closed, root):
            assert abs(triangle_residual(inp, est.r_m, est.theta_rad)) < 1e-9
            assert abs(mirror_residual(inp, est.r_m, est.theta_rad)) < 1e-9


def test_inclination_matches_bisector_tangent(rng):
    for _ in range(200):
        ue, aoa, length, _ = random_solvable_input(rng)
        est = solve_rp_closed_form(SolveInput(ue, aoa, length))
        phi_t = math.degrees(wall_tangent_from_bisector(est.o, ue))
        assert deg_mod_180(est.theta_deg, 90.0 - phi_t) < 1e-7


def test_estimate_tangent_degrees():
    est = solve_rp_closed_form(SolveInput(Point2(10.0, 5.0), math.radians(14.0362), 20.61553))
    assert deg_mod_180(est.tangent_deg, 90.0) < 1e-3


@pytest.mark.parametrize("p, o, phi, expected", [
    ((10.0, 5.0), (15.0, 0.0), math.pi / 2, (20.0, 5.0)),
    ((1.0, 1.0), (0.0, 0.0), 0.0, (1.0, -1.0)),
])
def test_mirror_point(p, o, phi, expected):
    m = mirror_point(Point2(*p), Point2(*o), phi)
    assert m.x == pytest.approx(expected[0], abs=1e-12)
    assert m.y == pytest.approx(expected[1], abs=1e-12)


def test_mirror_point_is_an_involution(rng):
    for _ in range(100):
        p = Point2(*rng.uniform(-100, 100, size=2))
        o = Point2(*rng.uniform(-100, 100, size=2))
        phi = rng.uniform(-math.pi, math.pi)
        back = mirror_point(mirror_point(p, o, phi), o, phi)
        assert back.distance_to(p) < 1e-9


@pytest.mark.parametrize("o, ue, expected_deg", [
    ((5.0, -5.0), (10.0, 0.0), 0.0),
    ((15.0, 3.75), (10.0, 5.0), 90.0),
])
def test_wall_tangent_from_bisector(o, ue, expected_deg):
    phi_t = math.degrees(wall_tangent_from_bisector(Point2(*o), Point2(*ue)))
    assert -90.0 < phi_t <= 90.0
    assert deg_mod_180(phi_t, expected_deg) < 1e-9


def test_bisector_degenerate_between_bs_and_ue():
    with pytest.raises(DegenerateBisector):
        wall_tangent_from_bisector(Point2(5.0, 0.0), Point2(10.0, 0.0))


def test_bisector_rejects_terminal_as_reflection_point():
    with pytest.raises(DegenerateBisector):
        wall_tangent_from_bisector(Point2(10.0, 0.0), Point2(10.0, 0.0))


def test_back_scatter_is_normal_incidence():
    # O beyond the UE on the BS-UE line: the face is perpendicular to that line
    phi_t = wall_tangent_from_bisector(Point2(20.0, 0.0), Point2(10.0, 0.0))
    assert deg_mod_180(math.degrees(phi_t), 90.0) < 1e-9


def _floor_bounce():
    return SolveInput(Point2(10.0, 0.0), math.radians(135.0), 2 * math.sqrt(50.0))


def test_root_finder_reports_iteration_limit():
    with pytest.raises(NoConvergence, match="after 0 iterations"):
        solve_rp_root_find(_floor_bounce(), max_iter=0)


def test_root_finder_limit_comes_from_config(monkeypatch):
    monkeypatch.setitem(config.SOLVER, "max_iter", 0)
    with pytest.raises(NoConvergence):
        solve_rp_root_find(_floor_bounce())


def test_root_off_the_mirror_branch_is_ambiguous(monkeypatch):
    # every converged root fails the path-length check
    monkeypatch.setattr(_MirrorSystem, "path_mismatch", lambda self, r: 1.0)
    with pytest.raises(AmbiguousRoot):
        solve_rp_root_find(_floor_bounce())
