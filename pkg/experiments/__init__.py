# experiments/__init__.py
from .boundary import (
    estimate_gff_segment_connection,
    estimate_point_connection,
    reflection_probability,
    resistance_drops,
    segment_grid,
    verify_resistance_drop,
)
from .estimate import Estimate, estimate_arm, joint_se, run_event
from .fit import ExponentFit, FitMode, fit_exponent
from .landmarks import estimate_outer_boundary_event, estimate_surrounding_loop
from .nlambda import estimate_N_lambda
from .quasi import QuasiResult, quasi_mult_ratio

__all__ = [
    "estimate_gff_segment_connection",
    "estimate_point_connection",
    "reflection_probability",
    "resistance_drops",
    "segment_grid",
    "verify_resistance_drop",
    "Estimate",
    "estimate_arm",
    "joint_se",
    "run_event",
    "ExponentFit",
    "FitMode",
    "fit_exponent",
    "estimate_outer_boundary_event",
    "estimate_surrounding_loop",
    "estimate_N_lambda",
    "QuasiResult",
    "quasi_mult_ratio",
]
