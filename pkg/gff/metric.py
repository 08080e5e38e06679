# gff/metric.py

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .field import ScalarField, as_rng


@dataclass
class MetricSignSample:
    """Vertex values plus one open/closed mark per domain edge (domain.edges order)."""

    field: ScalarField
    edge_open: np.ndarray

    @property
    def domain(self):
        return self.field.domain

    def is_open(self, a, b) -> bool:
        d = self.domain
        i, j = sorted((d.index_of(a), d.index_of(b)))
        e = d.edges
        hit = np.nonzero((e[:, 0] == i) & (e[:, 1] == j))[0]
        if not len(hit):
            raise ValueError(f"{tuple(a)} and {tuple(b)} are not joined by a domain edge")
        return bool(self.edge_open[hit[0]])


def bridge_zero_hit_prob(a: float, b: float) -> float:
    """P[unit-duration Brownian bridge from a to b touches 0]."""
    if a * b <= 0:
        return 1.0
    return math.exp(-2.0 * abs(a) * abs(b))


def bridge_zero_hit_probs(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    prod = np.asarray(a, dtype=float) * np.asarray(b, dtype=float)
    return np.where(prod <= 0, 1.0, np.exp(-2.0 * np.abs(prod)))


def extend_to_metric(field: ScalarField, rng) -> MetricSignSample:
    """
    Each edge stays open (no zero inside it) with probability 1 - bridge_zero_hit_prob(a, b),
    independently given the vertex values; a·b <= 0 closes it. An edge between two
    boundary vertices carries the boundary data along its length, so it is open
    exactly when both values are positive.
    """
    rng = as_rng(rng)
    domain = field.domain
    bnd = field.values[domain.boundary_mask]
    if len(bnd) and bnd.min() < 0:
        raise ValueError(f"metric extension needs boundary values >= 0, got min {bnd.min():.4g}")
    e = domain.edges
    a = field.values[e[:, 0]]
    b = field.values[e[:, 1]]
    p_hit = bridge_zero_hit_probs(a, b)
    u = rng.random(len(e))
    on_boundary = domain.boundary_mask[e[:, 0]] & domain.boundary_mask[e[:, 1]]
    edge_open = (a * b > 0) & (on_boundary | (u >= p_hit))
    return MetricSignSample(field=field, edge_open=edge_open)


def edge_frame(sample: MetricSignSample) -> pd.DataFrame:
    d = sample.domain
    e = d.edges
    c = d.coords
    return pd.DataFrame(
        {
            "x1": c[e[:, 0], 0],
            "y1": c[e[:, 0], 1],
            "x2": c[e[:, 1], 0],
            "y2": c[e[:, 1], 1],
            "open": sample.edge_open.astype(int),
        }
    )
