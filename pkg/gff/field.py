# gff/field.py

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np
import pandas as pd

from lattice import Domain, segment
from potential import PotentialSolver, constant_boundary, indicator_boundary


@dataclass
class ScalarField:
    domain: Domain
    values: np.ndarray

    def __getitem__(self, point) -> float:
        return float(self.values[self.domain.index_of(point)])

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.domain, -self.values)


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def zero_boundary(solver: PotentialSolver) -> dict:
    return constant_boundary(solver, 0.0)


def segment_boundary(solver: PotentialSolver, k: int) -> dict:
    """1 on the segment l_{3k/2} of the real axis, 0 on the rest of the killing set."""
    return indicator_boundary(solver, segment(k), 1.0)


class FieldSampler:
    """Repeated draws with fixed boundary data; the harmonic mean is solved once."""

    def __init__(self, solver: PotentialSolver, boundary_data: Union[Mapping, np.ndarray]):
        self.solver = solver
        self.mean = solver.harmonic_extension(boundary_data).values
        self.mean.setflags(write=False)

    def sample(self, rng) -> ScalarField:
        rng = as_rng(rng)
        values = self.mean.copy()
        values[self.solver.free] += self.solver.sample_centered(rng)
        return ScalarField(domain=self.solver.domain, values=values)


def sample_gff(solver: PotentialSolver, boundary_data: Union[Mapping, np.ndarray], rng) -> ScalarField:
    """
    Exact draw: harmonic extension of the boundary data plus a centered Gaussian
    with covariance G = L^{-1}, density ∝ exp(-½ Σ_edges (φx - φy)²).
    """
    return FieldSampler(solver, boundary_data).sample(rng)


def field_frame(field: ScalarField) -> pd.DataFrame:
    c = field.domain.coords
    return pd.DataFrame({"x": c[:, 0], "y": c[:, 1], "value": field.values})
