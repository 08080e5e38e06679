# clusters/__init__.py
from .arms import (
    ArmEventKind,
    ArmKind,
    Setting,
    check_radii,
    count_crossing,
    count_outermost,
    four_arm_event,
    outermost_crossing,
    two_arm_halfplane_event,
)
from .decompose import (
    ClusterDecomposition,
    ClusterRecord,
    cluster_frame,
    decompose_discrete,
    decompose_metric,
)
from .hull import (
    as_mask,
    cluster_hull,
    hull_mask,
    lambda_and_gamma,
    mask_points,
    outer_boundary,
    outer_boundary_within,
    surrounds,
)

__all__ = [
    "ArmEventKind",
    "ArmKind",
    "Setting",
    "check_radii",
    "count_crossing",
    "count_outermost",
    "four_arm_event",
    "outermost_crossing",
    "two_arm_halfplane_event",
    "ClusterDecomposition",
    "ClusterRecord",
    "cluster_frame",
    "decompose_discrete",
    "decompose_metric",
    "as_mask",
    "cluster_hull",
    "hull_mask",
    "lambda_and_gamma",
    "mask_points",
    "outer_boundary",
    "outer_boundary_within",
    "surrounds",
]
