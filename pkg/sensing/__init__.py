from sensing.model import (
    Environment,
    LinkState,
    MpcRecord,
    Point2,
    ReferenceLine,
    ReferenceSegment,
    RpEstimate,
    UeObservation,
    Wall,
)
from sensing.solver import (
    SolveInput,
    mirror_point,
    solve_rp_closed_form,
    solve_rp_root_find,
    wall_tangent_from_bisector,
)
from sensing.pipeline import (
    ClusterParams,
    ReconstructParams,
    cluster_mpcs,
    fspl_db,
    merge_rps,
    power_threshold,
    reconstruct_ue,
    reflection_loss,
)
from sensing.simulator import SimOptions, quantize, simulate_observation
from sensing.metrics import (
    assign_nearest_reference,
    error_stats,
    fit_line,
    point_line_deviation,
    rp_errors,
)

__all__ = [
    "Environment", "LinkState", "MpcRecord", "Point2", "ReferenceLine", "ReferenceSegment",
    "RpEstimate", "UeObservation", "Wall",
    "SolveInput", "mirror_point", "solve_rp_closed_form", "solve_rp_root_find",
    "wall_tangent_from_bisector",
    "ClusterParams", "ReconstructParams", "cluster_mpcs", "fspl_db", "merge_rps",
    "power_threshold", "reconstruct_ue", "reflection_loss",
    "SimOptions", "quantize", "simulate_observation",
    "assign_nearest_reference", "error_stats", "fit_line", "point_line_deviation", "rp_errors",
]
