"""
Domain types shared by the solver, pipeline, simulator and metrics.

Coordinate convention: the BS sits at the origin, a UE at (a, b) with
a = d_U-UE and b = d_BS-U. An MPC arriving with azimuth A travels (seen
from the UE, looking back along the ray) in direction u = (cos A, -sin A).
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Tuple

from sensing.errors import GeometryError, InvariantError

TWO_PI = 2.0 * math.pi


def _require_finite(owner, **values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvariantError(f"{owner}: {name} must be finite, got {value!r}")


def normalize_angle(angle):
    """Reduce an angle to [0, 2*pi). Idempotent."""
    reduced = math.fmod(angle, TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    if reduced >= TWO_PI:
        reduced = 0.0
    return reduced


def wrap_angle(angle):
    """Reduce an angle to (-pi, pi]."""
    wrapped = normalize_angle(angle)
    if wrapped > math.pi:
        wrapped -= TWO_PI
    return wrapped


def reduce_half_turn(angle):
    """Reduce an angle to (-pi/2, pi/2]; a face and its 180 degree turn coincide."""
    reduced = math.fmod(angle, math.pi)
    if reduced <= -math.pi / 2:
        reduced += math.pi
    elif reduced > math.pi / 2:
        reduced -= math.pi
    return reduced


@dataclass(frozen=True)
class Point2:
    """A position in the azimuth plane, meters."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        _require_finite("Point2", x=self.x, y=self.y)

    def __add__(self, other):
        return Point2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Point2(self.x - other.x, self.y - other.y)

    def __mul__(self, k):
        return Point2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self):
        return Point2(-self.x, -self.y)

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def cross(self, other):
        return self.x * other.y - self.y * other.x

    def norm(self):
        return math.hypot(self.x, self.y)

    def arg(self):
        """Standard two-argument arctangent of (y, x)."""
        return math.atan2(self.y, self.x)

    def unit(self):
        n = self.norm()
        if n == 0.0:
            raise GeometryError("cannot normalize a zero vector")
        return Point2(self.x / n, self.y / n)

    def distance_to(self, other):
        return math.hypot(self.x - other.x, self.y - other.y)

    def as_tuple(self):
        return (self.x, self.y)


ORIGIN = Point2(0.0, 0.0)


def arrival_direction(aoa_rad):
    """Unit vector u = (cos A, -sin A) pointing from the UE back along the ray."""
    return Point2(math.cos(aoa_rad), -math.sin(aoa_rad))


def aoa_from_direction(v):
    """Inverse of arrival_direction for any nonzero vector."""
    return normalize_angle(math.atan2(-v.y, v.x))


class LinkState(Enum):
    LOS = "LoS"
    NLOS = "NLoS"

    @property
    def reference_rank(self):
        """a in the threshold rule: 2 with a LoS peak present, 1 without."""
        return 2 if self is LinkState.LOS else 1


@dataclass(frozen=True)
class MpcRecord:
    """One detected multipath component (power already gain-compensated)."""

    power_db: float
    delay_s: float
    aoa_rad: float

    def __post_init__(self):
        _require_finite("MpcRecord", power_db=self.power_db, delay_s=self.delay_s,
                        aoa_rad=self.aoa_rad)
        if self.delay_s <= 0.0:
            raise InvariantError(f"nonphysical delay {self.delay_s!r} s")
        object.__setattr__(self, "aoa_rad", normalize_angle(self.aoa_rad))

    def path_length(self, c):
        return self.delay_s * c

    @property
    def aoa_deg(self):
        return math.degrees(self.aoa_rad)


@dataclass(frozen=True)
class UeObservation:
    """A receiver position with its link state and MPC list. BS fixed at origin."""

    ue_id: str
    ue_pos: Point2
    los: LinkState
    mpcs: Tuple[MpcRecord, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ue_id", str(self.ue_id))
        object.__setattr__(self, "mpcs", tuple(self.mpcs))
        if self.ue_pos == ORIGIN:
            raise InvariantError(f"UE {self.ue_id}: position coincides with the BS")

    @property
    def d_bs_u(self):
        return self.ue_pos.y

    @property
    def d_u_ue(self):
        return self.ue_pos.x

    @property
    def baseline_m(self):
        """d_BS-UE."""
        return self.ue_pos.norm()

    def with_mpcs(self, mpcs):
        return replace(self, mpcs=tuple(mpcs))


@dataclass(frozen=True)
class Wall:
    """A reflecting line segment with a constant reflection loss.

    loss_hook, when set, maps the incidence angle (rad, from the normal) to
    extra loss in dB on top of reflection_loss_db.
    """

    p1: Point2
    p2: Point2
    reflection_loss_db: float = 0.0
    name: str = ""
    loss_hook: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        _require_finite(f"Wall {self.name}", reflection_loss_db=self.reflection_loss_db)
        if self.reflection_loss_db < 0.0:
            raise InvariantError(f"Wall {self.name}: reflection loss must be >= 0")
        if self.p1 == self.p2:
            raise GeometryError(f"Wall {self.name}: zero-length segment")

    @property
    def length(self):
        return self.p1.distance_to(self.p2)

    @property
    def tangent_angle(self):
        """Orientation of the segment, rad."""
        return (self.p2 - self.p1).arg()

    def loss_at(self, incidence_rad):
        extra = self.loss_hook(incidence_rad) if self.loss_hook else 0.0
        return self.reflection_loss_db + extra

    def closest_point(self, p):
        d = self.p2 - self.p1
        t = (p - self.p1).dot(d) / d.dot(d)
        t = min(1.0, max(0.0, t))
        return self.p1 + d * t

    def distance_to(self, p):
        return p.distance_to(self.closest_point(p))

    def translated(self, offset):
        return replace(self, p1=self.p1 + offset, p2=self.p2 + offset)


@dataclass(frozen=True)
class Environment:
    """Polygonal reflector map."""

    walls: Tuple[Wall, ...]
    carrier_freq_hz: float

    def __post_init__(self):
        object.__setattr__(self, "walls", tuple(self.walls))
        _require_finite("Environment", carrier_freq_hz=self.carrier_freq_hz)
        if self.carrier_freq_hz <= 0.0:
            raise InvariantError("carrier frequency must be positive")

    def translated(self, offset):
        return replace(self, walls=tuple(w.translated(offset) for w in self.walls))

    def wall(self, name):
        for w in self.walls:
            if w.name == name:
                return w
        raise KeyError(name)


@dataclass(frozen=True)
class RpEstimate:
    """A solved reflection point O with its distance d_UE-O and face inclination."""

    o: Point2
    r_m: float
    theta_rad: float
    ue_id: str = ""
    cluster_id: int = -1
    source_power_db: Optional[float] = None
    mpc_index: int = -1

    def __post_init__(self):
        _require_finite("RpEstimate", r_m=self.r_m, theta_rad=self.theta_rad)
        if self.r_m <= 0.0:
            raise InvariantError(f"RpEstimate: r_m must be positive, got {self.r_m!r}")

    @property
    def theta_deg(self):
        return math.degrees(self.theta_rad)

    @property
    def tangent_deg(self):
        """Wall orientation implied by theta, in [0, 180)."""
        return (90.0 - self.theta_deg) % 180.0


@dataclass(frozen=True)
class ReferenceLine:
    """Building face L(x) = a_l*x + b_l; swapped=True means x = a_l*y + b_l."""

    a_l: float
    b_l: float
    name: str = ""
    swapped: bool = False

    def __post_init__(self):
        _require_finite(f"ReferenceLine {self.name}", a_l=self.a_l, b_l=self.b_l)


@dataclass(frozen=True)
class ReferenceSegment:
    """A measured wall given by its endpoints; distances clamp to the segment."""

    p1: Point2
    p2: Point2
    name: str = ""

    def __post_init__(self):
        if self.p1 == self.p2:
            raise GeometryError(f"ReferenceSegment {self.name}: zero-length segment")


@dataclass(frozen=True)
class ScenarioConfig:
    carrier_freq_hz: float
    tx_gain_db: float = 0.0
    rx_gain_db: float = 0.0
    gains_compensated: bool = True

    @property
    def total_gain_db(self):
        return self.tx_gain_db + self.rx_gain_db
