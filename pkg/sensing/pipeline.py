"""
Per-UE reconstruction pipeline
Cluster the MPCs, pick each cluster's peak, compute its reflection loss,
drop peaks above twice the reference loss (and the LoS peak), solve the
survivors for reflection points and merge them across UEs.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

import config
from sensing.errors import (
    AmbiguousRoot,
    BehindBaseline,
    EllipseDegenerate,
    EmptyInput,
    InvariantError,
    NoConvergence,
    TooFewClusters,
)
from sensing.model import LinkState, TWO_PI
from sensing.solver import SolveInput, solve_rp

logger = logging.getLogger(__name__)

# Solver failures that skip a peak instead of aborting the UE
SKIPPABLE = (EllipseDegenerate, BehindBaseline, NoConvergence, AmbiguousRoot)


@dataclass(frozen=True)
class ClusterParams:
    delay_gap_s: float = config.CLUSTERING["delay_gap_s"]
    angle_gap_rad: float = math.radians(config.CLUSTERING["angle_gap_deg"])
    power_floor_db: float = config.CLUSTERING["power_floor_db"]

    def __post_init__(self):
        if not (self.delay_gap_s > 0.0 and self.angle_gap_rad > 0.0):
            raise InvariantError("cluster gates must be positive")


@dataclass(frozen=True)
class Cluster:
    members: Tuple[int, ...]
    peak_index: int
    cluster_id: int = 0


@dataclass(frozen=True)
class ReconstructParams:
    cluster: ClusterParams = field(default_factory=ClusterParams)
    c: float = config.SPEED_OF_LIGHT
    delay_quantum_s: float = config.DELAY_QUANTUM_S
    solver: str = "closed_form"


@dataclass(frozen=True)
class PeakDecision:
    cluster_id: int
    mpc_index: int
    rl_db: float
    threshold_db: Optional[float]
    outcome: str          # kept | rejected | los | skipped:<reason>


@dataclass
class UeReconstruction:
    """Estimates of one UE plus the bookkeeping behind them."""

    ue_id: str
    estimates: List = field(default_factory=list)
    rl_ref_db: Optional[float] = None
    peaks: List[PeakDecision] = field(default_factory=list)
    los_cluster: Optional[int] = None

    @property
    def rejected(self):
        return [p.cluster_id for p in self.peaks if p.outcome == "rejected"]

    @property
    def skipped(self):
        return [p for p in self.peaks if p.outcome.startswith("skipped")]

    def to_dict(self):
        return {
            "ue_id": self.ue_id,
            "rl_ref_db": self.rl_ref_db,
            "los_cluster": self.los_cluster,
            "estimates": len(self.estimates),
            "peaks": [
                {"cluster_id": p.cluster_id, "mpc_index": p.mpc_index, "rl_db": p.rl_db,
                 "threshold_db": p.threshold_db, "outcome": p.outcome}
                for p in self.peaks
            ],
        }


@dataclass(frozen=True)
class CloudPoint:
    """A merged estimate; duplicate_of is the index of the earlier point it repeats."""

    estimate: object
    duplicate_of: Optional[int] = None


# ---------- clustering ----------

def cluster_mpcs(obs, params=None):
    """Single-linkage clusters over (delay, AoA); ordered by peak delay."""
    return cluster_records(obs.mpcs, params)


def cluster_records(mpcs, params=None):
    params = params or ClusterParams()
    idx = [i for i, m in enumerate(mpcs) if m.power_db >= params.power_floor_db]
    if not idx:
        return []

    delays = np.array([mpcs[i].delay_s for i in idx])
    aoas = np.array([mpcs[i].aoa_rad for i in idx])
    d_delay = np.abs(delays[:, None] - delays[None, :])
    d_aoa = np.abs(np.mod(aoas[:, None] - aoas[None, :] + math.pi, TWO_PI) - math.pi)
    linked = (d_delay <= params.delay_gap_s) & (d_aoa <= params.angle_gap_rad)
    n, labels = connected_components(csr_matrix(linked), directed=False)

    groups = [[] for _ in range(n)]
    for k, label in enumerate(labels):
        groups[label].append(idx[k])

    def rank(i):
        m = mpcs[i]
        return (-m.power_db, m.delay_s, i)

    clusters = [Cluster(members=tuple(sorted(g)), peak_index=min(g, key=rank)) for g in groups]
    clusters.sort(key=lambda cl: (mpcs[cl.peak_index].delay_s, cl.peak_index))
    return [replace(cl, cluster_id=k) for k, cl in enumerate(clusters)]


# ---------- losses ----------

def fspl_db(distance_m, freq_hz, c=config.SPEED_OF_LIGHT):
    """Friis free-space path loss, dB."""
    if distance_m <= 0:
        raise InvariantError(f"distance must be positive, got {distance_m!r}")
    if freq_hz <= 0:
        raise InvariantError(f"frequency must be positive, got {freq_hz!r}")
    return 20.0 * math.log10(4.0 * math.pi * distance_m * freq_hz / c)


def reflection_loss(peak, freq_hz, c=config.SPEED_OF_LIGHT):
    """Excess loss of a peak beyond free space at its path length."""
    return -peak.power_db - fspl_db(peak.path_length(c), freq_hz, c)


def reference_loss(rls, los):
    """a-th smallest reflection loss, a = 2 with LoS and 1 without."""
    a = los.reference_rank
    if len(rls) < a:
        raise TooFewClusters(f"{los.value} threshold needs {a} cluster peaks, got {len(rls)}")
    return sorted(rls)[a - 1]


def power_threshold(peaks, los, freq_hz, c=config.SPEED_OF_LIGHT):
    """Per-peak power thresholds for [(MpcRecord, RL), ...].

    A peak passes when its power exceeds -FSPL(delay * c) - 2 * RL_ref,
    i.e. when RL < 2 * RL_ref.
    """
    rl_ref = reference_loss([rl for _, rl in peaks], los)
    return [-fspl_db(m.path_length(c), freq_hz, c) - 2.0 * rl_ref for m, _ in peaks]


# ---------- per-UE reconstruction ----------

def _los_peak(obs, peaks, params):
    """Cluster whose peak path length is closest to the baseline, within one quantum."""
    if not peaks:
        return None
    window = params.delay_quantum_s * params.c
    best = min(peaks, key=lambda p: (abs(p[1].path_length(params.c) - obs.baseline_m),
                                     p[0].cluster_id))
    if abs(best[1].path_length(params.c) - obs.baseline_m) <= window:
        return best[0].cluster_id
    return None


def reconstruct_ue_report(obs, freq_hz, params=None):
    params = params or ReconstructParams()
    result = UeReconstruction(ue_id=obs.ue_id)

    clusters = cluster_mpcs(obs, params.cluster)
    peaks = [(cl, obs.mpcs[cl.peak_index]) for cl in clusters]
    rls = [reflection_loss(m, freq_hz, params.c) for _, m in peaks]

    if obs.los is LinkState.LOS:
        result.los_cluster = _los_peak(obs, peaks, params)
        if result.los_cluster is None:
            logger.info("UE %s: no peak within one delay quantum of the baseline", obs.ue_id)
    if all(cl.cluster_id == result.los_cluster for cl, _ in peaks):
        for k, (cl, _) in enumerate(peaks):
            result.peaks.append(PeakDecision(cl.cluster_id, cl.peak_index, rls[k], None, "los"))
        logger.info("UE %s: no reflected peaks", obs.ue_id)
        return result

    # the LoS peak still counts towards the a-th smallest loss
    result.rl_ref_db = reference_loss(rls, obs.los)
    thresholds = power_threshold([(m, rl) for (_, m), rl in zip(peaks, rls)],
                                 obs.los, freq_hz, params.c)
    for k, (cl, m) in enumerate(peaks):
        if cl.cluster_id == result.los_cluster:
            logger.info("UE %s: deleted LoS peak (cluster %d)", obs.ue_id, cl.cluster_id)
            result.peaks.append(PeakDecision(cl.cluster_id, cl.peak_index, rls[k], None, "los"))
            continue
        threshold = thresholds[k]
        if not m.power_db > threshold:
            logger.info("UE %s: rejected cluster %d (RL %.2f dB >= %.2f dB)",
                        obs.ue_id, cl.cluster_id, rls[k], 2.0 * result.rl_ref_db)
            result.peaks.append(PeakDecision(cl.cluster_id, cl.peak_index, rls[k], threshold,
                                             "rejected"))
            continue
        try:
            est = solve_rp(SolveInput.from_mpc(obs.ue_pos, m, params.c), params.solver)
        except SKIPPABLE as exc:
            logger.info("UE %s: skipped cluster %d: %s", obs.ue_id, cl.cluster_id, exc)
            result.peaks.append(PeakDecision(cl.cluster_id, cl.peak_index, rls[k], threshold,
                                             f"skipped:{type(exc).__name__}"))
            continue
        result.estimates.append(replace(
            est, ue_id=obs.ue_id, cluster_id=cl.cluster_id,
            source_power_db=m.power_db, mpc_index=cl.peak_index))
        result.peaks.append(PeakDecision(cl.cluster_id, cl.peak_index, rls[k], threshold, "kept"))

    logger.info("UE %s: %d estimates from %d clusters", obs.ue_id, len(result.estimates),
                len(clusters))
    return result


def reconstruct_ue(obs, freq_hz, params=None):
    return reconstruct_ue_report(obs, freq_hz, params).estimates


def _reconstruct_job(job):
    obs, freq_hz, params = job
    return reconstruct_ue_report(obs, freq_hz, params)


def reconstruct_all(observations, freq_hz, params=None, workers=1):
    """Reconstruct every UE; results are ordered by ue_id whatever the worker count."""
    params = params or ReconstructParams()
    ordered = sorted(observations, key=lambda o: o.ue_id)
    jobs = [(obs, freq_hz, params) for obs in ordered]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_reconstruct_job, jobs))
    return [_reconstruct_job(job) for job in jobs]


# ---------- merge ----------

def merge_rps(per_ue, dedupe_eps_m=config.MERGE_DEDUPE_EPS_M):
    """Concatenate estimates ordered by (ue_id, cluster_id), flagging near repeats.

    A point within dedupe_eps_m of an earlier point is kept and marked with
    the index of the first such point.
    """
    flat = sorted((est for group in per_ue for est in group),
                  key=lambda e: (str(e.ue_id), e.cluster_id))
    if not flat:
        return []
    xy = np.array([e.o.as_tuple() for e in flat])
    tree = cKDTree(xy)
    cloud = []
    for i, est in enumerate(flat):
        earlier = [j for j in tree.query_ball_point(xy[i], dedupe_eps_m) if j < i]
        cloud.append(CloudPoint(est, min(earlier) if earlier else None))
    dupes = sum(p.duplicate_of is not None for p in cloud)
    logger.info("Merged %d points (%d flagged duplicate)", len(cloud), dupes)
    return cloud


# ---------- DAPS ----------

def daps_grid(mpcs, delay_bins=config.DAPS["delay_bins"], angle_bins=config.DAPS["angle_bins"]):
    """Delay-angular power spectrum: linear power summed per (delay, AoA) bin.

    Returns (delay bin centres in s, angle bin centres in deg, grid[delay, angle]).
    """
    if not mpcs:
        raise EmptyInput("no MPCs to bin")
    delays = np.array([m.delay_s for m in mpcs])
    angles = np.array([m.aoa_deg for m in mpcs])
    power = 10.0 ** (np.array([m.power_db for m in mpcs]) / 10.0)
    lo, hi = delays.min(), delays.max()
    if hi <= lo:
        lo -= config.DELAY_QUANTUM_S / 2.0
        hi += config.DELAY_QUANTUM_S / 2.0
    grid, delay_edges, angle_edges = np.histogram2d(
        delays, angles, bins=[delay_bins, angle_bins],
        range=[[lo, hi], [0.0, 360.0]], weights=power)
    delay_centres = 0.5 * (delay_edges[:-1] + delay_edges[1:])
    angle_centres = 0.5 * (angle_edges[:-1] + angle_edges[1:])
    return delay_centres, angle_centres, grid
