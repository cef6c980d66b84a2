"""
Reconstruction error against a surveyed outline
Perpendicular point-to-wall deviations, nearest-wall assignment and the
summary statistics (min / max / mean / spread / RMS / ECDF).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from sensing.errors import EmptyInput, VerticalLine
from sensing.model import ReferenceLine, ReferenceSegment

logger = logging.getLogger(__name__)


def fit_line(p1, p2, name="", decimals=None):
    """Line y = a_l*x + b_l through two surveyed points.

    decimals rounds both coefficients (survey maps quote two).
    """
    if p1.x == p2.x:
        raise VerticalLine(f"wall {name or '?'} is vertical (x = {p1.x}); use x = a*y + b")
    a = (p2.y - p1.y) / (p2.x - p1.x)
    b = p1.y - a * p1.x
    if decimals is not None:
        a, b = round(a, decimals), round(b, decimals)
    return ReferenceLine(a_l=a, b_l=b, name=name)


def point_line_deviation(rp, line, unnormalized=False):
    """Perpendicular distance from rp to the line.

    unnormalized switches to |y + a*x - b| / (1 + a^2), a sign-flipped form
    without the square root; kept for comparison only.
    """
    u, v = (rp.y, rp.x) if line.swapped else (rp.x, rp.y)
    a, b = line.a_l, line.b_l
    if unnormalized:
        return abs(v + a * u - b) / (1.0 + a * a)
    return abs(v - a * u - b) / math.sqrt(1.0 + a * a)


def point_segment_deviation(rp, seg):
    d = seg.p2 - seg.p1
    t = min(1.0, max(0.0, (rp - seg.p1).dot(d) / d.dot(d)))
    return rp.distance_to(seg.p1 + d * t)


def deviation(rp, ref, unnormalized=False):
    if isinstance(ref, ReferenceSegment):
        return point_segment_deviation(rp, ref)
    return point_line_deviation(rp, ref, unnormalized)


def assign_nearest_reference(rp, refs, unnormalized=False):
    """(index of nearest wall, deviation); ties go to the earlier wall."""
    if not refs:
        raise EmptyInput("no reference walls")
    best, best_dev = 0, deviation(rp, refs[0], unnormalized)
    for k, ref in enumerate(refs[1:], start=1):
        dev = deviation(rp, ref, unnormalized)
        if dev < best_dev:
            best, best_dev = k, dev
    return best, best_dev


@dataclass
class DeviationReport:
    min: float
    max: float
    mean: float
    paper_rmse: float          # population standard deviation
    true_rmse: float           # root mean square
    cdf: List[Tuple[float, float]]
    per_point: List[Tuple[str, float]] = field(default_factory=list)
    label_key: str = "wall"
    unmatched: Optional[List[str]] = None

    def to_dict(self):
        out = {
            "per_point": [{self.label_key: w, "deviation_m": d} for w, d in self.per_point],
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "paper_rmse": self.paper_rmse,
            "true_rmse": self.true_rmse,
            "cdf": [[x, p] for x, p in self.cdf],
        }
        if self.unmatched is not None:
            out["unmatched"] = self.unmatched
        return out


def error_stats(devs):
    devs = np.asarray(list(devs), dtype=float)
    if devs.size == 0:
        raise EmptyInput("no deviations to summarize")
    ordered = np.sort(devs)
    probs = np.arange(1, devs.size + 1) / devs.size
    report = DeviationReport(
        min=float(ordered[0]),
        max=float(ordered[-1]),
        mean=float(np.mean(devs)),
        paper_rmse=float(np.std(devs)),
        true_rmse=float(np.sqrt(np.mean(devs ** 2))),
        cdf=[(float(x), float(p)) for x, p in zip(ordered, probs)],
    )
    logger.info("Error over %d points: min %.4f max %.4f mean %.4f std %.4f rms %.4f m",
                devs.size, report.min, report.max, report.mean, report.paper_rmse,
                report.true_rmse)
    return report


def evaluate_points(points, refs, unnormalized=False):
    """Assign every point to its nearest wall and summarize the deviations."""
    per_point = []
    for rp in points:
        k, dev = assign_nearest_reference(rp, refs, unnormalized)
        per_point.append((refs[k].name or str(k), dev))
    report = error_stats([d for _, d in per_point])
    report.per_point = per_point
    return report


def rp_errors(estimates, truth):
    """Euclidean error of each estimate against its simulated reflection point.

    truth maps (ue_id, mpc_index) to (order, bounce point). Estimates with no
    first-order truth row are listed as unmatched instead of scored.
    """
    per_point, unmatched = [], []
    for est in estimates:
        est = getattr(est, "estimate", est)
        label = f"{est.ue_id}/{est.mpc_index}"
        order, point = truth.get((est.ue_id, est.mpc_index), (None, None))
        if order != 1 or point is None:
            unmatched.append(label)
            continue
        per_point.append((label, est.o.distance_to(point)))
    if unmatched:
        logger.warning("%d estimate(s) have no first-order truth path: %s",
                       len(unmatched), ", ".join(unmatched))
    report = error_stats([d for _, d in per_point])
    report.per_point = per_point
    report.label_key = "path"
    report.unmatched = unmatched
    return report
