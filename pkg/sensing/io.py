"""
Scenario and artifact files
Scenario JSON, MPC / ground-truth / point-cloud CSV, reference-map JSON and
evaluation reports. CSV output is UTF-8 with LF line endings; floats are
written with repr so a read-back is exact.
"""

import csv
import json
import logging
import math
from pathlib import Path

import config
from sensing.errors import InvariantError, ScenarioError
from sensing.metrics import fit_line
from sensing.model import (
    Environment,
    LinkState,
    MpcRecord,
    Point2,
    ReferenceLine,
    ReferenceSegment,
    RpEstimate,
    ScenarioConfig,
    UeObservation,
    Wall,
)

logger = logging.getLogger(__name__)

MPC_COLUMNS = ["ue_id", "power_db", "delay_s", "aoa_deg"]
TRUTH_COLUMNS = ["ue_id", "order", "rp_x", "rp_y", "total_len_m", "aoa_deg", "power_db"]
CLOUD_COLUMNS = ["ue_id", "cluster_id", "x", "y", "r_m", "theta_deg", "power_db"]
# trailing join key between cloud points and ground-truth rows
PATH_KEY = "mpc_index"


# ---------- small I/O helpers ----------

def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    logger.info("Wrote %d rows to %s", len(rows), path)


def _read_csv(path, required):
    """Yield (line_number, row) for each data row, checking the header first."""
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ScenarioError(f"missing column(s) {', '.join(missing)}", path=path, line=1)
        for row in reader:
            yield reader.line_num, row


def _number(value, path, line, name):
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ScenarioError(f"expected a number, got {value!r}", path, line, name) from None
    if not math.isfinite(number):
        raise ScenarioError(f"value must be finite, got {value!r}", path, line, name)
    return number


def _point(value, path, name):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ScenarioError(f"expected [x, y], got {value!r}", path, field=name)
    return Point2(_number(value[0], path, None, name), _number(value[1], path, None, name))


def _load_json(path):
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, path=path, line=exc.lineno) from None


def _entries(doc, key, path):
    """The list under key, every element checked to be an object."""
    items = doc.get(key, [])
    if not isinstance(items, list):
        raise ScenarioError(f"expected a list, got {items!r}", path=path, field=key)
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise ScenarioError(f"expected an object, got {item!r}", path=path, field=f"{key}[{i}]")
    return items


def write_json(obj, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info("Wrote %s", path)


# ---------- scenario ----------

def _mpc(raw_power, delay, aoa_deg, gain_db, where):
    path, line = where
    try:
        return MpcRecord(power_db=raw_power - gain_db, delay_s=delay,
                         aoa_rad=math.radians(aoa_deg))
    except InvariantError as exc:
        raise ScenarioError(str(exc), path=path, line=line) from None


def load_mpcs_csv(path, gain_db=0.0):
    """Read an MPC table into {ue_id: [MpcRecord, ...]} in file order."""
    table = {}
    for line, row in _read_csv(path, MPC_COLUMNS):
        record = _mpc(
            _number(row["power_db"], path, line, "power_db"),
            _number(row["delay_s"], path, line, "delay_s"),
            _number(row["aoa_deg"], path, line, "aoa_deg"),
            gain_db,
            (path, line),
        )
        table.setdefault(row["ue_id"], []).append(record)
    return table


def _check_physical(obs, c, path):
    """Reject MPCs shorter than the BS-UE baseline by more than one delay quantum."""
    floor = obs.baseline_m - config.DELAY_QUANTUM_S * c
    for i, mpc in enumerate(obs.mpcs):
        if mpc.path_length(c) < floor:
            raise ScenarioError(
                f"UE {obs.ue_id}: nonphysical delay {mpc.delay_s!r} s in MPC {i} "
                f"(path {mpc.path_length(c):.6g} m < baseline {obs.baseline_m:.6g} m)",
                path=path, field="delay_s")


def load_scenario(path, mpcs_path=None, compensate_gains=config.GAIN_COMPENSATION,
                  c=config.SPEED_OF_LIGHT):
    """Load a scenario file, optionally attaching MPCs from a CSV.

    Returns (Environment, [UeObservation], ScenarioConfig). MPC powers are
    gain-compensated (raw - tx_gain - rx_gain) unless compensate_gains is off.
    """
    path = Path(path)
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object", path=path)

    freq = _number(doc.get("carrier_freq_hz"), path, None, "carrier_freq_hz")
    cfg = ScenarioConfig(
        carrier_freq_hz=freq,
        tx_gain_db=_number(doc.get("tx_gain_db", 0.0), path, None, "tx_gain_db"),
        rx_gain_db=_number(doc.get("rx_gain_db", 0.0), path, None, "rx_gain_db"),
        gains_compensated=compensate_gains,
    )
    gain_db = cfg.total_gain_db if compensate_gains else 0.0

    bs = _point(doc.get("bs", [0, 0]), path, "bs")
    if bs.x != 0.0 or bs.y != 0.0:
        raise ScenarioError("BS must sit at the origin; translate the scenario first",
                            path=path, field="bs")

    walls = []
    for i, w in enumerate(_entries(doc, "walls", path)):
        name = str(w.get("name", f"wall{i}"))
        try:
            walls.append(Wall(
                p1=_point(w.get("p1"), path, f"walls[{i}].p1"),
                p2=_point(w.get("p2"), path, f"walls[{i}].p2"),
                reflection_loss_db=_number(w.get("rl_db", 0.0), path, None, f"walls[{i}].rl_db"),
                name=name,
            ))
        except InvariantError as exc:
            raise ScenarioError(str(exc), path=path, field=f"walls[{i}]") from None
    try:
        env = Environment(walls=walls, carrier_freq_hz=freq)
    except InvariantError as exc:
        raise ScenarioError(str(exc), path=path, field="carrier_freq_hz") from None

    table = load_mpcs_csv(mpcs_path, gain_db) if mpcs_path is not None else {}

    observations = []
    for i, u in enumerate(_entries(doc, "ues", path)):
        if "id" not in u:
            raise ScenarioError("missing UE id", path=path, field=f"ues[{i}].id")
        ue_id = str(u["id"])
        inline = [
            _mpc(_number(m.get("power_db"), path, None, f"ues[{i}].mpcs[{k}].power_db"),
                 _number(m.get("delay_s"), path, None, f"ues[{i}].mpcs[{k}].delay_s"),
                 _number(m.get("aoa_deg"), path, None, f"ues[{i}].mpcs[{k}].aoa_deg"),
                 gain_db, (path, None))
            for k, m in enumerate(_entries(u, "mpcs", path))
        ]
        try:
            obs = UeObservation(
                ue_id=ue_id,
                ue_pos=_point(u.get("pos"), path, f"ues[{i}].pos"),
                los=LinkState.LOS if u.get("los", True) else LinkState.NLOS,
                mpcs=inline + table.pop(ue_id, []),
            )
        except InvariantError as exc:
            raise ScenarioError(str(exc), path=path, field=f"ues[{i}]") from None
        _check_physical(obs, c, mpcs_path or path)
        observations.append(obs)

    if table:
        raise ScenarioError(f"MPCs for unknown UE id(s) {', '.join(sorted(table))}",
                            path=mpcs_path, field="ue_id")
    logger.info("Loaded %d walls and %d UEs from %s", len(walls), len(observations), path)
    return env, observations, cfg


# ---------- simulator output ----------

def write_mpcs_csv(rows, path, gain_db=0.0):
    """rows: iterable of (ue_id, MpcRecord); gain_db is added back to the power."""
    write_csv(path, MPC_COLUMNS, [
        [ue_id, m.power_db + gain_db, m.delay_s, m.aoa_deg] for ue_id, m in rows
    ])


def write_truth_csv(rows, path):
    """rows: iterable of (ue_id, mpc_index, GroundTruthPath).

    Order-0 rows leave rp_x, rp_y empty; mpc_index is the row of the same
    path in that UE's MPC list.
    """
    out = []
    for ue_id, mpc_index, gt in rows:
        last = gt.rp_points[-1] if gt.rp_points else None
        out.append([
            ue_id, gt.order,
            "" if last is None else last.x,
            "" if last is None else last.y,
            gt.total_len_m, math.degrees(gt.aoa_rad), gt.power_db, mpc_index,
        ])
    write_csv(path, TRUTH_COLUMNS + [PATH_KEY], out)


def load_truth_csv(path):
    """Read a ground-truth table into {(ue_id, mpc_index): (order, last bounce or None)}."""
    truth = {}
    for line, row in _read_csv(path, TRUTH_COLUMNS + [PATH_KEY]):
        key = (row["ue_id"], int(_number(row[PATH_KEY], path, line, PATH_KEY)))
        if key in truth:
            raise ScenarioError(f"duplicate path {key[0]}/{key[1]}", path=path, line=line)
        point = None
        if row["rp_x"] != "" or row["rp_y"] != "":
            point = Point2(_number(row["rp_x"], path, line, "rp_x"),
                           _number(row["rp_y"], path, line, "rp_y"))
        truth[key] = (int(_number(row["order"], path, line, "order")), point)
    return truth


# ---------- point cloud ----------

def save_point_cloud(points, path):
    """Write estimates (or merged cloud points) as CSV.

    A duplicate_of column is added when any point carries merge flags.
    """
    flagged = any(hasattr(p, "duplicate_of") for p in points)
    header = CLOUD_COLUMNS + [PATH_KEY] + (["duplicate_of"] if flagged else [])
    rows = []
    for p in points:
        est = getattr(p, "estimate", p)
        row = [est.ue_id, est.cluster_id, est.o.x, est.o.y, est.r_m, est.theta_deg,
               "" if est.source_power_db is None else est.source_power_db,
               "" if est.mpc_index < 0 else est.mpc_index]
        if flagged:
            dup = getattr(p, "duplicate_of", None)
            row.append("" if dup is None else dup)
        rows.append(row)
    write_csv(path, header, rows)


def load_point_cloud(path):
    estimates = []
    for line, row in _read_csv(path, CLOUD_COLUMNS):
        power = row["power_db"]
        index = row.get(PATH_KEY) or ""
        try:
            estimates.append(RpEstimate(
                o=Point2(_number(row["x"], path, line, "x"), _number(row["y"], path, line, "y")),
                r_m=_number(row["r_m"], path, line, "r_m"),
                theta_rad=math.radians(_number(row["theta_deg"], path, line, "theta_deg")),
                ue_id=row["ue_id"],
                cluster_id=int(_number(row["cluster_id"], path, line, "cluster_id")),
                source_power_db=None if power == "" else _number(power, path, line, "power_db"),
                mpc_index=-1 if index == "" else int(_number(index, path, line, PATH_KEY)),
            ))
        except InvariantError as exc:
            raise ScenarioError(str(exc), path=path, line=line) from None
    return estimates


def read_point_positions(path):
    """Read x, y from any CSV carrying those columns (cloud or survey export)."""
    return [
        Point2(_number(row["x"], path, line, "x"), _number(row["y"], path, line, "y"))
        for line, row in _read_csv(path, ["x", "y"])
    ]


# ---------- reference maps ----------

def load_reference(path):
    """Load reference walls.

    Each wall is one of {"p1","p2"}, {"a_l","b_l"[,"swapped"]}, {"y"} or
    {"x"}. With "segment": true, endpoint walls are kept as bounded segments;
    otherwise they are fitted to lines, rounded to "decimals" if given.
    Returns a list of ReferenceLine / ReferenceSegment.
    """
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object", path=path)
    decimals = doc.get("decimals")
    refs = []
    for i, w in enumerate(_entries(doc, "walls", path)):
        where = f"walls[{i}]"
        name = str(w.get("name", f"wall{i}"))
        if "p1" in w and "p2" in w:
            p1 = _point(w["p1"], path, f"{where}.p1")
            p2 = _point(w["p2"], path, f"{where}.p2")
            if w.get("segment", False):
                refs.append(ReferenceSegment(p1=p1, p2=p2, name=name))
            else:
                refs.append(fit_line(p1, p2, name=name, decimals=decimals))
        elif "a_l" in w and "b_l" in w:
            refs.append(ReferenceLine(
                a_l=_number(w["a_l"], path, None, f"{where}.a_l"),
                b_l=_number(w["b_l"], path, None, f"{where}.b_l"),
                name=name, swapped=bool(w.get("swapped", False))))
        elif "y" in w:
            refs.append(ReferenceLine(0.0, _number(w["y"], path, None, f"{where}.y"), name=name))
        elif "x" in w:
            refs.append(ReferenceLine(0.0, _number(w["x"], path, None, f"{where}.x"),
                                      name=name, swapped=True))
        else:
            raise ScenarioError("wall needs p1/p2, a_l/b_l, y or x", path=path, field=where)
    if not refs:
        raise ScenarioError("reference map has no walls", path=path, field="walls")
    return refs
