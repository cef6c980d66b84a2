"""
Image-source channel simulator
Bistatic 2-D image method over wall segments: mirror the BS across one wall
(or two), intersect the image-UE line with the walls backwards and keep the
paths whose legs are unobstructed. Emits MPC records plus the ground truth
they came from.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import config
from sensing.errors import GeometryError, InvariantError
from sensing.model import (
    ORIGIN,
    LinkState,
    MpcRecord,
    Point2,
    UeObservation,
    aoa_from_direction,
    normalize_angle,
)
from sensing.pipeline import fspl_db
from sensing.solver import mirror_point

logger = logging.getLogger(__name__)

ON_WALL_EPS_M = 1e-9
LEG_EPS = 1e-9


@dataclass(frozen=True)
class SimOptions:
    max_order: int = config.SIMULATION["max_order"]
    delay_quantum_s: float = config.SIMULATION["delay_quantum_s"]
    angle_quantum_rad: float = math.radians(config.SIMULATION["angle_quantum_deg"])
    include_los: bool = config.SIMULATION["include_los"]
    c: float = config.SPEED_OF_LIGHT

    def __post_init__(self):
        if self.max_order not in (1, 2):
            raise InvariantError(f"max_order must be 1 or 2, got {self.max_order}")
        if self.delay_quantum_s < 0 or self.angle_quantum_rad < 0:
            raise InvariantError("quanta must be >= 0")


@dataclass(frozen=True)
class GroundTruthPath:
    order: int
    rp_points: Tuple[Point2, ...]
    total_len_m: float
    aoa_rad: float
    power_db: float
    walls: Tuple[str, ...] = field(default=())


def _intersect(a, b, wall):
    """Parameters (t along a->b, s along the wall) of the crossing, or None if parallel."""
    r = b - a
    s = wall.p2 - wall.p1
    denom = r.cross(s)
    if abs(denom) <= 1e-15 * max(r.norm() * s.norm(), 1e-300):
        return None
    v = wall.p1 - a
    return v.cross(s) / denom, v.cross(r) / denom


def _blocked(a, b, walls):
    for w in walls:
        hit = _intersect(a, b, w)
        if hit is None:
            continue
        t, s = hit
        if LEG_EPS < t < 1.0 - LEG_EPS and 0.0 <= s <= 1.0:
            return True
    return False


def _bounce(a, b, wall):
    """Point where the line a->b meets wall inside both (open line, closed segment)."""
    hit = _intersect(a, b, wall)
    if hit is None:
        return None
    t, s = hit
    if not (0.0 < t < 1.0 and 0.0 <= s <= 1.0):
        return None
    return a + (b - a) * t


def _incidence(incoming, wall):
    """Angle between an incoming leg and the wall normal, rad."""
    d = incoming.unit()
    tangent = (wall.p2 - wall.p1).unit()
    return math.acos(min(1.0, abs(d.cross(tangent))))


def _image(p, wall):
    return mirror_point(p, wall.p1, wall.tangent_angle)


def _trace(env, ue_pos, chain):
    """Backtrack one image chain; returns the bounce points or None if invalid."""
    images = [ORIGIN]
    for w in chain:
        images.append(_image(images[-1], w))

    points = []
    target = ue_pos
    for k in range(len(chain) - 1, -1, -1):
        hit = _bounce(images[k + 1], target, chain[k])
        if hit is None:
            return None
        points.append(hit)
        target = hit
    points.reverse()

    legs = [ORIGIN] + points + [ue_pos]
    for a, b in zip(legs, legs[1:]):
        if a.distance_to(b) <= ON_WALL_EPS_M or _blocked(a, b, env.walls):
            return None
    return points


def _path(env, ue_pos, chain, points):
    legs = [ORIGIN] + points + [ue_pos]
    total = sum(a.distance_to(b) for a, b in zip(legs, legs[1:]))
    loss = sum(w.loss_at(_incidence(legs[k + 1] - legs[k], w)) for k, w in enumerate(chain))
    return GroundTruthPath(
        order=len(chain),
        rp_points=tuple(points),
        total_len_m=total,
        aoa_rad=aoa_from_direction(legs[-2] - ue_pos),
        power_db=-fspl_db(total, env.carrier_freq_hz) - loss,
        walls=tuple(w.name for w in chain),
    )


def check_placement(env, *points):
    for p in points:
        for w in env.walls:
            if w.distance_to(p) <= ON_WALL_EPS_M:
                raise GeometryError(f"point {p.as_tuple()} lies on wall {w.name!r}")


def trace_paths(env, ue_pos, max_order=1, include_los=True):
    """Geometric paths BS -> UE in emission order: LoS, then order 1, then order 2."""
    check_placement(env, ORIGIN, ue_pos)
    paths = []
    if include_los and not _blocked(ORIGIN, ue_pos, env.walls):
        total = ue_pos.norm()
        paths.append(GroundTruthPath(
            order=0, rp_points=(), total_len_m=total,
            aoa_rad=aoa_from_direction(ORIGIN - ue_pos),
            power_db=-fspl_db(total, env.carrier_freq_hz)))

    chains = [(w,) for w in env.walls]
    if max_order >= 2:
        chains += [(wi, wj) for i, wi in enumerate(env.walls)
                   for j, wj in enumerate(env.walls) if i != j]
    for chain in chains:
        points = _trace(env, ue_pos, chain)
        if points is not None:
            paths.append(_path(env, ue_pos, chain, points))
    return paths


def _round_to(x, q):
    if q == 0:
        return x
    return math.floor(x / q + 0.5) * q


def quantize(obs, opts):
    """Round delays and AoAs to the sounder grid (ground truth is left alone).

    Delays never round below one quantum, so a UE next to the BS keeps a
    positive LoS delay.
    """
    if opts.delay_quantum_s == 0 and opts.angle_quantum_rad == 0:
        return obs
    return obs.with_mpcs(
        MpcRecord(power_db=m.power_db,
                  delay_s=max(_round_to(m.delay_s, opts.delay_quantum_s), opts.delay_quantum_s),
                  aoa_rad=normalize_angle(_round_to(m.aoa_rad, opts.angle_quantum_rad)))
        for m in obs.mpcs
    )


def simulate_observation(env, ue_pos, opts=None, ue_id="ue"):
    """Simulate one UE; the MPC list is aligned one-to-one with the ground truth."""
    opts = opts or SimOptions()
    truth = trace_paths(env, ue_pos, opts.max_order, opts.include_los)
    geometric_los = not _blocked(ORIGIN, ue_pos, env.walls)
    obs = UeObservation(
        ue_id=ue_id,
        ue_pos=ue_pos,
        los=LinkState.LOS if geometric_los else LinkState.NLOS,
        mpcs=[MpcRecord(power_db=gt.power_db, delay_s=gt.total_len_m / opts.c,
                        aoa_rad=gt.aoa_rad) for gt in truth],
    )
    logger.info("UE %s: %d paths (%s)", ue_id, len(truth),
                ", ".join(f"order {k}: {sum(gt.order == k for gt in truth)}" for k in (0, 1, 2)))
    return quantize(obs, opts), truth
