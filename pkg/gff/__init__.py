# gff/__init__.py
from .field import (
    FieldSampler,
    ScalarField,
    as_rng,
    field_frame,
    sample_gff,
    segment_boundary,
    zero_boundary,
)
from .metric import (
    MetricSignSample,
    bridge_zero_hit_prob,
    bridge_zero_hit_probs,
    edge_frame,
    extend_to_metric,
)

__all__ = [
    "FieldSampler",
    "ScalarField",
    "as_rng",
    "field_frame",
    "sample_gff",
    "segment_boundary",
    "zero_boundary",
    "MetricSignSample",
    "bridge_zero_hit_prob",
    "bridge_zero_hit_probs",
    "edge_frame",
    "extend_to_metric",
]
