"""
Reflection-point solver
Recovers the reflection point O, the distance d_UE-O and the face inclination
theta of one MPC from the UE position, its AoA and its total path length.

Two independent routes are provided: a closed form obtained by putting O on
the UE ray and on the BS-UE ellipse, and a damped Newton iteration on the
triangle equation (law of cosines in BS-UE-O, with the BS-O-UE angle written
as 2A - 2*theta) together with the mirror equation arg(O) = A - 2*theta.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

import config
from sensing.errors import (
    AmbiguousRoot,
    BehindBaseline,
    DegenerateBisector,
    EllipseDegenerate,
    InvariantError,
    NoConvergence,
)
from sensing.model import (
    ORIGIN,
    Point2,
    RpEstimate,
    arrival_direction,
    normalize_angle,
    reduce_half_turn,
    wrap_angle,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveInput:
    """UE position, AoA and path length d_BS-O-UE = delay * c of one MPC."""

    ue_pos: Point2
    aoa_rad: float
    path_len_m: float
    eps_ellipse: float = config.ELLIPSE_EPS_M

    def __post_init__(self):
        if not (math.isfinite(self.aoa_rad) and math.isfinite(self.path_len_m)):
            raise InvariantError("SolveInput: AoA and path length must be finite")
        if self.ue_pos == ORIGIN:
            raise InvariantError("SolveInput: UE coincides with the BS")
        object.__setattr__(self, "aoa_rad", normalize_angle(self.aoa_rad))

    @classmethod
    def from_mpc(cls, ue_pos, mpc, c=config.SPEED_OF_LIGHT):
        return cls(ue_pos=ue_pos, aoa_rad=mpc.aoa_rad, path_len_m=mpc.path_length(c))

    @property
    def baseline_m(self):
        return self.ue_pos.norm()

    @property
    def direction(self):
        return arrival_direction(self.aoa_rad)

    def require_ellipse(self):
        d = self.baseline_m
        if self.path_len_m <= d + self.eps_ellipse:
            raise EllipseDegenerate(
                f"path length {self.path_len_m:.9g} m does not exceed baseline {d:.9g} m")


def triangle_residual(inp, r, theta):
    """Relative residual of the law of cosines in triangle BS-UE-O."""
    d2 = inp.baseline_m ** 2
    d_bs_o = inp.path_len_m - r
    theta1 = 2.0 * inp.aoa_rad - 2.0 * theta
    lhs = d_bs_o ** 2 + r ** 2 - 2.0 * d_bs_o * r * math.cos(theta1)
    return (lhs - d2) / d2


def mirror_residual(inp, r, theta):
    """Wrapped residual of arg(O) = A - 2*theta, rad."""
    o = inp.ue_pos + inp.direction * r
    return wrap_angle(o.arg() - (inp.aoa_rad - 2.0 * theta))


def _estimate(o, r, theta):
    return RpEstimate(o=o, r_m=r, theta_rad=reduce_half_turn(theta))


def solve_rp_closed_form(inp):
    """Closed-form reflection point.

    O = p + r*u lies on the ellipse |O| + r = L, so
    r = (L^2 - d^2) / (2 * (L + p.u)), and theta follows from the mirror
    equation: theta = (A - arg(O)) / 2.
    """
    inp.require_ellipse()
    p = inp.ue_pos
    u = inp.direction
    L = inp.path_len_m
    d = inp.baseline_m

    r = (L * L - d * d) / (2.0 * (L + p.dot(u)))
    if not r > 0.0:
        raise BehindBaseline(f"solved d_UE-O = {r!r} m")
    o = p + u * r
    theta = (inp.aoa_rad - o.arg()) / 2.0
    return _estimate(o, r, theta)


class _MirrorSystem:
    """Equations in the unknowns x = (d_UE-O, theta), scaled to be O(1)."""

    def __init__(self, inp):
        self.p = inp.ue_pos
        self.u = inp.direction
        self.a = inp.aoa_rad
        self.L = inp.path_len_m
        self.d = inp.baseline_m

    def point(self, r):
        return self.p + self.u * r

    def residual(self, x):
        r, theta = x
        L, d = self.L, self.d
        c = math.cos(2.0 * self.a - 2.0 * theta)
        f1 = ((L - r) ** 2 + r * r - 2.0 * (L - r) * r * c - d * d) / (d * d)
        # arg(O) = phi  <=>  O x e_phi = 0 (orientation checked after convergence)
        phi = self.a - 2.0 * theta
        ox = self.p.x + r * self.u.x
        oy = self.p.y + r * self.u.y
        f2 = (oy * math.cos(phi) - ox * math.sin(phi)) / d
        return np.array([f1, f2])

    def jacobian(self, x):
        r, theta = x
        L, d = self.L, self.d
        c = math.cos(2.0 * self.a - 2.0 * theta)
        s = math.sin(2.0 * self.a - 2.0 * theta)
        phi = self.a - 2.0 * theta
        cp, sp = math.cos(phi), math.sin(phi)
        ox = self.p.x + r * self.u.x
        oy = self.p.y + r * self.u.y
        return np.array([
            [2.0 * (2.0 * r - L) * (1.0 + c) / (d * d), -4.0 * (L - r) * r * s / (d * d)],
            [(self.u.y * cp - self.u.x * sp) / d, 2.0 * (ox * cp + oy * sp) / d],
        ])

    def path_mismatch(self, r):
        """(L - r) - |O|: zero on the branch consistent with the mirror geometry."""
        return (self.L - r) - self.point(r).norm()

    def seed(self, rel_width):
        """Bracket d_UE-O on the ellipse with Brent's method.

        path_mismatch is non-increasing in r, positive at r = 0 and
        non-positive at r = (L + d) / 2.
        """
        hi = (self.L + self.d) / 2.0
        try:
            return brentq(self.path_mismatch, 0.0, hi, xtol=rel_width * self.L)
        except ValueError:
            return hi / 2.0


def _damped_newton(system, x, tol, max_iter):
    scale = max(system.L, 1.0)
    f = system.residual(x)
    fnorm = np.linalg.norm(f, np.inf)
    for it in range(max_iter):
        if fnorm <= tol:
            logger.debug("root finder converged on residual after %d steps", it)
            return x
        try:
            step = np.linalg.solve(system.jacobian(x), -f)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at d_UE-O={x[0]:.6g} m") from exc

        damping = 1.0
        while True:
            trial = x + damping * step
            f_trial = system.residual(trial)
            trial_norm = np.linalg.norm(f_trial, np.inf)
            if trial_norm < fnorm or damping <= config.SOLVER["min_damping"]:
                break
            damping /= 2.0

        x, f, fnorm = trial, f_trial, trial_norm
        taken = damping * step
        if abs(taken[0]) <= tol * scale and abs(taken[1]) <= tol:
            logger.debug("root finder converged on step size after %d steps", it + 1)
            return x
    raise NoConvergence(f"no convergence after {max_iter} iterations (residual {fnorm:.3g})")


def solve_rp_root_find(inp, tol=None, max_iter=None):
    """Solve the triangle and mirror equations for (d_UE-O, theta) numerically.

    Newton is started from a bracketed seed on the ellipse and, should it
    land on the other law-of-cosines root, restarted from both ends of the bracket.
    Among the roots consistent with the mirror geometry the smallest
    positive d_UE-O is returned.
    """
    tol = config.SOLVER["tol"] if tol is None else tol
    max_iter = config.SOLVER["max_iter"] if max_iter is None else max_iter
    inp.require_ellipse()
    system = _MirrorSystem(inp)
    lower = max(system.L - system.d, 0.0) / 2.0
    upper = (system.L + system.d) / 2.0
    seeds = [system.seed(config.SOLVER["seed_rel_width"]), lower, upper]

    branch_tol = 1e-9 * max(system.L, 1.0)
    consistent = []
    inconsistent = 0
    failures = []
    for r0 in seeds:
        theta0 = (system.a - system.point(r0).arg()) / 2.0
        try:
            r, theta = _damped_newton(system, np.array([r0, theta0]), tol, max_iter)
        except NoConvergence as exc:
            failures.append(exc)
            continue
        if not r > 0.0:
            inconsistent += 1
            continue
        o = system.point(r)
        phi = system.a - 2.0 * theta
        facing = o.x * math.cos(phi) + o.y * math.sin(phi) > 0.0
        if facing and abs(system.path_mismatch(r)) <= branch_tol:
            consistent.append((r, theta))
            break
        inconsistent += 1
        logger.debug("seed %.6g converged to the inconsistent branch r=%.6g", r0, r)

    if consistent:
        r, theta = min(consistent, key=lambda rt: rt[0])
        return _estimate(system.point(r), r, theta)
    if inconsistent:
        raise AmbiguousRoot("only the law-of-cosines root violating the mirror constraint was found")
    if failures:
        raise failures[0]
    raise BehindBaseline("no positive d_UE-O found")


def mirror_point(p, o, tangent_angle):
    """Reflect p across the line through o with direction angle tangent_angle."""
    t = Point2(math.cos(tangent_angle), math.sin(tangent_angle))
    v = p - o
    return o + t * (2.0 * v.dot(t)) - v


def wall_tangent_from_bisector(o, ue_pos):
    """Face orientation implied by specular reflection at o, rad in (-pi/2, pi/2].

    The face normal bisects the directions from o to the BS and to the UE.
    """
    if o == ORIGIN or o == ue_pos:
        raise DegenerateBisector("reflection point coincides with a terminal")
    n = (ORIGIN - o).unit() + (ue_pos - o).unit()
    if n.norm() <= 1e-12:
        raise DegenerateBisector("BS, reflection point and UE are collinear (grazing)")
    return reduce_half_turn(n.arg() - math.pi / 2.0)


def solve_rp(inp, method="closed_form"):
    if method == "closed_form":
        return solve_rp_closed_form(inp)
    if method == "root_find":
        return solve_rp_root_find(inp)
    raise ValueError(f"unknown solver method {method!r}")
