#!/usr/bin/env python3
"""
ERM - environment reconstruction from multipath
Batch front end:

- simulate    = image-source MPCs (+ ground truth) for a scenario
- reconstruct = reflection points from measured/simulated MPCs
- evaluate    = deviation report against a reference map, or RP error against simulated truth
- daps        = delay-angular power grid (+ optional polar image) of one UE
- plot        = SVG of walls, UEs and reconstructed points
"""

import argparse
import logging
import math
import os
import sys
from pathlib import Path

import config
from figures import DapsFigure, SceneFigure
from sensing.errors import UsageError, ValidationError
from sensing.io import (
    load_mpcs_csv,
    load_point_cloud,
    load_truth_csv,
    load_reference,
    load_scenario,
    read_point_positions,
    save_point_cloud,
    write_json,
    write_mpcs_csv,
    write_truth_csv,
    write_csv,
)
from sensing.metrics import evaluate_points, rp_errors
from sensing.pipeline import (
    ClusterParams,
    ReconstructParams,
    cluster_records,
    daps_grid,
    merge_rps,
    reconstruct_all,
)
from sensing.simulator import SimOptions, simulate_observation

logger = logging.getLogger("erm")


class ErmArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so dispatch owns exit codes."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def setup_logging():
    """Configure the root logger from ERM_LOG (off | info | debug)."""
    value = os.environ.get(config.LOG_ENV_VAR, "").strip().lower()
    if value == "off":
        logging.disable(logging.CRITICAL)
        return
    logging.disable(logging.NOTSET)
    level = config.LOG_LEVELS.get(value) or config.LOG_DEFAULT_LEVEL
    logging.basicConfig(level=level, format=config.LOG_FORMAT, stream=sys.stderr, force=True)


class ReconstructionApp:
    """One subcommand per method; each returns an exit code."""

    def __init__(self, args):
        self.args = args

    def _cluster_params(self):
        a = self.args
        return ClusterParams(
            delay_gap_s=a.delay_gap_ns * 1e-9,
            angle_gap_rad=math.radians(a.angle_gap_deg),
            power_floor_db=a.power_floor_db,
        )

    def simulate(self):
        a = self.args
        env, observations, cfg = load_scenario(a.scenario)
        opts = SimOptions(
            max_order=a.order,
            delay_quantum_s=config.DELAY_QUANTUM_S if a.quantize else 0.0,
            angle_quantum_rad=math.radians(a.angle_quantum_deg) if a.quantize else 0.0,
            include_los=not a.no_los,
        )
        mpc_rows, truth_rows = [], []
        for obs in sorted(observations, key=lambda o: o.ue_id):
            sim, truth = simulate_observation(env, obs.ue_pos, opts, ue_id=obs.ue_id)
            mpc_rows += [(obs.ue_id, m) for m in sim.mpcs]
            truth_rows += [(obs.ue_id, i, gt) for i, gt in enumerate(truth)]

        # written powers are raw (antenna gains included), as a sounder reports them
        write_mpcs_csv(mpc_rows, a.out, gain_db=cfg.total_gain_db)
        if a.truth:
            write_truth_csv(truth_rows, a.truth)
        logger.info("Simulated %d MPCs for %d UEs", len(mpc_rows), len(observations))
        return 0

    def reconstruct(self):
        a = self.args
        env, observations, cfg = load_scenario(
            a.scenario, a.mpcs, compensate_gains=not a.no_gain_compensation, c=a.c)
        params = ReconstructParams(cluster=self._cluster_params(), c=a.c, solver=a.solver)
        results = reconstruct_all(observations, cfg.carrier_freq_hz, params, workers=a.workers)
        cloud = merge_rps([r.estimates for r in results], a.dedupe_eps)
        save_point_cloud(cloud, a.out)

        out = Path(a.out)
        write_json({
            "c": a.c,
            "solver": a.solver,
            "gain_compensation": not a.no_gain_compensation,
            "delay_gap_s": params.cluster.delay_gap_s,
            "angle_gap_deg": math.degrees(params.cluster.angle_gap_rad),
            "power_floor_db": None if math.isinf(a.power_floor_db) else a.power_floor_db,
            "dedupe_eps_m": a.dedupe_eps,
            "points": len(cloud),
            "ues": [r.to_dict() for r in results],
        }, out.with_name(out.name + ".meta.json"))
        return 0

    def evaluate(self):
        a = self.args
        if a.truth:
            report = rp_errors(load_point_cloud(a.cloud), load_truth_csv(a.truth))
        else:
            refs = load_reference(a.reference)
            points = read_point_positions(a.cloud)
            report = evaluate_points(points, refs, unnormalized=a.unnormalized)
        write_json(report.to_dict(), a.out)
        return 0

    def daps(self):
        a = self.args
        table = load_mpcs_csv(a.mpcs)
        if a.ue not in table:
            raise ValidationError(f"UE {a.ue!r} not found in {a.mpcs}")
        mpcs = table[a.ue]
        delays, angles, grid = daps_grid(mpcs, a.delay_bins, a.angle_bins)
        write_csv(a.out, ["delay_s"] + [float(x) for x in angles],
                  [[float(d)] + [float(v) for v in row] for d, row in zip(delays, grid)])
        if a.image:
            DapsFigure().render(a.ue, mpcs, cluster_records(mpcs)).save(a.image)
            logger.info("DAPS image saved to %s", a.image)
        return 0

    def plot(self):
        a = self.args
        env, observations, _ = load_scenario(a.scenario)
        cloud = merge_rps([load_point_cloud(a.cloud)])
        SceneFigure().save(a.out, env, observations, cloud)
        return 0

    def run(self):
        return getattr(self, self.args.command)()


def build_parser():
    parser = ErmArgumentParser(prog="main.py", description="Environment reconstruction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="image-source MPCs for every UE of a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--order", type=int, choices=(1, 2), default=config.SIMULATION["max_order"])
    p.add_argument("--quantize", action="store_true",
                   help="round delay to 1/1.2 GHz and AoA to --angle-quantum-deg")
    p.add_argument("--angle-quantum-deg", type=float, default=config.ANGLE_QUANTUM_DEG)
    p.add_argument("--no-los", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--truth")

    p = sub.add_parser("reconstruct", help="reflection points from MPCs")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mpcs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--c", type=float, default=config.SPEED_OF_LIGHT,
                   help=f"speed of light, m/s ({config.ROUNDED_SPEED_OF_LIGHT:g} for rounded arithmetic)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--solver", choices=("closed_form", "root_find"), default="closed_form")
    p.add_argument("--no-gain-compensation", action="store_true")
    p.add_argument("--delay-gap-ns", type=float, default=config.CLUSTERING["delay_gap_s"] * 1e9)
    p.add_argument("--angle-gap-deg", type=float, default=config.CLUSTERING["angle_gap_deg"])
    p.add_argument("--power-floor-db", type=float, default=config.CLUSTERING["power_floor_db"])
    p.add_argument("--dedupe-eps", type=float, default=config.MERGE_DEDUPE_EPS_M)

    p = sub.add_parser("evaluate", help="deviation report against a reference map or simulated truth")
    p.add_argument("--cloud", required=True)
    against = p.add_mutually_exclusive_group(required=True)
    against.add_argument("--reference", help="reference walls (JSON)")
    against.add_argument("--truth", help="ground-truth CSV written by simulate --truth")
    p.add_argument("--out", required=True)
    p.add_argument("--paper-eq6", dest="unnormalized", action="store_true",
                   help="use the sign-flipped deviation without the square root")

    p = sub.add_parser("daps", help="delay-angular power grid of one UE")
    p.add_argument("--mpcs", required=True)
    p.add_argument("--ue", required=True)
    p.add_argument("--delay-bins", type=int, default=config.DAPS["delay_bins"])
    p.add_argument("--angle-bins", type=int, default=config.DAPS["angle_bins"])
    p.add_argument("--out", required=True)
    p.add_argument("--image", help="also write a polar PNG")

    p = sub.add_parser("plot", help="SVG scatter of the reconstruction")
    p.add_argument("--cloud", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    return parser


def dispatch(argv=None):
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
        return ReconstructionApp(args).run()
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(dispatch())
