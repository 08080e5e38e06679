# potential/solver.py

from __future__ import annotations

import os
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

import numpy as np
import pandas as pd
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from config import CG_RTOL, CG_THRESHOLD, DENSE_FALLBACK_LIMIT
from lattice import Domain, LatticePoint

GREEN_CACHE_SIZE = 64


@dataclass
class HarmonicData:
    domain: Domain
    values: np.ndarray
    boundary_data: dict = field(default_factory=dict)

    def __getitem__(self, point) -> float:
        return float(self.values[self.domain.index_of(point)])


class PotentialSolver:
    """
    Killed Laplacian L = 4I - A on the non-killed vertices (unit conductances).

    Killed = domain boundary ∪ extra killing set. Lattice neighbours outside the
    domain are absorbing as well, so every component of L is nonsingular.
    G(x, y) = L^{-1}[x, y]; expected visits of the walk = 4·G.
    """

    def __init__(self, domain: Domain, killing: Iterable = ()):
        self.domain = domain
        killed = domain.boundary_mask.copy()
        extra = []
        for p in killing:
            i = domain.index_of(p)
            killed[i] = True
            extra.append(domain.points[i])
        self.extra_killing = tuple(sorted(set(extra)))
        self.killed_mask = killed
        self.free = np.nonzero(~killed)[0]
        if len(self.free) == 0:
            raise ValueError(f"{domain!r} has no non-killed vertex")

        self.pos = np.full(len(domain), -1, dtype=np.int64)
        self.pos[self.free] = np.arange(len(self.free))

        adj = domain.adjacency
        a_ff = adj[self.free][:, self.free]
        self.matrix = (4.0 * sp.identity(len(self.free), format="csc") - a_ff).tocsc()
        self.coupling = adj[self.free].tocsc()  # free rows, all domain columns

        self._lock = threading.Lock()
        self._columns: OrderedDict = OrderedDict()
        self._lu = None
        self._sqrt = None
        self.method = "direct" if len(self.free) <= CG_THRESHOLD else "cg"
        if self.method == "direct":
            self._lu = spla.splu(
                self.matrix,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )

    @property
    def size(self) -> int:
        return len(self.free)

    def with_killing(self, extra: Iterable) -> "PotentialSolver":
        return PotentialSolver(self.domain, killing=list(self.extra_killing) + list(extra))

    # --- solves

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        with self._lock:
            if self._lu is not None:
                return self._lu.solve(rhs)
        if rhs.ndim == 2:
            return np.column_stack([self._cg(rhs[:, j]) for j in range(rhs.shape[1])])
        return self._cg(rhs)

    def _cg(self, b: np.ndarray) -> np.ndarray:
        x, info = spla.cg(self.matrix, b, rtol=CG_RTOL, maxiter=20 * self.size)
        if info != 0:
            raise RuntimeError(f"CG did not converge (info={info}, size={self.size})")
        return x

    def _free_pos(self, point, what: str) -> int:
        i = self.domain.index_of(point)
        if self.killed_mask[i]:
            raise ValueError(f"{what} {tuple(point)} is killed")
        return int(self.pos[i])

    def _killed_index(self, point, what: str) -> int:
        i = self.domain.index_of(point)
        if not self.killed_mask[i]:
            raise ValueError(f"{what} {tuple(point)} is not in the killing set")
        return i

    def green_column(self, y) -> np.ndarray:
        j = self._free_pos(y, "y")
        with self._lock:
            col = self._columns.get(j)
            if col is not None:
                self._columns.move_to_end(j)
                return col
        e = np.zeros(self.size)
        e[j] = 1.0
        col = self.solve(e)
        col.setflags(write=False)
        with self._lock:
            self._columns[j] = col
            if len(self._columns) > GREEN_CACHE_SIZE:
                self._columns.popitem(last=False)
        return col

    def green(self, x, y) -> float:
        i = self._free_pos(x, "x")
        return float(self.green_column(y)[i])

    def effective_resistance(self, x) -> float:
        return self.green(x, x)

    def _absorption_rhs(self, killed_indices: Iterable[int]) -> np.ndarray:
        g = np.zeros(len(self.domain))
        g[list(killed_indices)] = 1.0
        return self.coupling @ g

    def harmonic_measure(self, u, v) -> float:
        i = self._free_pos(u, "u")
        j = self._killed_index(v, "v")
        return float(self.solve(self._absorption_rhs([j]))[i])

    def harmonic_measure_of(self, u, targets: Iterable) -> float:
        i = self._free_pos(u, "u")
        js = [self._killed_index(v, "target") for v in targets]
        return float(self.solve(self._absorption_rhs(js))[i])

    def boundary_vector(self, boundary_data: Union[Mapping, np.ndarray]) -> np.ndarray:
        """Full-length vector carrying the data on killed vertices (zero elsewhere)."""
        n = len(self.domain)
        killed = np.nonzero(self.killed_mask)[0]
        if isinstance(boundary_data, np.ndarray):
            if boundary_data.shape != (n,):
                raise ValueError(f"boundary vector must have shape ({n},), got {boundary_data.shape}")
            g = np.zeros(n)
            g[killed] = boundary_data[killed]
            return g
        g = np.zeros(n)
        seen = np.zeros(n, dtype=bool)
        for p, val in boundary_data.items():
            i = self.domain.index_of(p)
            if not self.killed_mask[i]:
                raise ValueError(f"boundary data given at non-killed vertex {tuple(p)}")
            g[i] = float(val)
            seen[i] = True
        missing = killed[~seen[killed]]
        if len(missing):
            sample = [tuple(self.domain.points[i]) for i in missing[:5]]
            raise ValueError(f"boundary data missing at {len(missing)} killed vertices, e.g. {sample}")
        return g

    def harmonic_extension(self, boundary_data: Union[Mapping, np.ndarray]) -> HarmonicData:
        g = self.boundary_vector(boundary_data)
        values = g.copy()
        values[self.free] = self.solve(self.coupling @ g)
        data = (
            {p: float(g[i]) for i, p in enumerate(self.domain.points) if self.killed_mask[i]}
            if isinstance(boundary_data, np.ndarray)
            else dict(boundary_data)
        )
        return HarmonicData(domain=self.domain, values=values, boundary_data=data)

    # --- Gaussian sampling

    def _sqrt_factor(self):
        """
        C with L = C Cᵀ, from the symmetric-mode LU (U = D Lᵀ when no pivoting happened).
        Falls back to a dense Cholesky for small systems.
        """
        if self._sqrt is not None:
            return self._sqrt
        if self._lu is None:
            raise RuntimeError(f"exact sampling needs a direct factorization (size={self.size})")

        lu = self._lu
        d = lu.U.diagonal()
        ok = np.array_equal(lu.perm_r, lu.perm_c) and bool(np.all(d > 0))
        if ok:
            c_factor = (lu.L @ sp.diags(np.sqrt(d))).tocsr()
            perm = np.asarray(lu.perm_r)
            trial = np.random.default_rng(0).standard_normal(self.size)
            t = np.empty(self.size)
            t[perm] = trial
            back = (c_factor @ (c_factor.T @ t))[perm]
            ok = np.allclose(back, self.matrix @ trial, rtol=1e-8, atol=1e-8)
        if ok:
            self._sqrt = ("lu", c_factor, perm)
        elif self.size <= DENSE_FALLBACK_LIMIT:
            chol = sla.cholesky(self.matrix.toarray(), lower=True)
            self._sqrt = ("dense", chol, None)
        else:
            raise RuntimeError("symmetric factorization pivoted; cannot build a square-root factor")
        return self._sqrt

    def sample_centered(self, rng: np.random.Generator) -> np.ndarray:
        """Centered Gaussian vector on the free vertices with covariance L^{-1}."""
        kind, c_factor, perm = self._sqrt_factor()
        xi = rng.standard_normal(self.size)
        if kind == "lu":
            return self.solve((c_factor @ xi)[perm])
        return self.solve(c_factor @ xi)

    # --- debugging

    def dump_green_column(self, y, path: str) -> None:
        col = self.green_column(y)
        pts = self.domain.coords[self.free]
        df = pd.DataFrame({"x": pts[:, 0], "y": pts[:, 1], "green": col})
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        df.to_csv(path, index=False)


def green(solver: PotentialSolver, x, y) -> float:
    return solver.green(x, y)


def effective_resistance(solver: PotentialSolver, x) -> float:
    return solver.effective_resistance(x)


def harmonic_measure(solver: PotentialSolver, u, v) -> float:
    return solver.harmonic_measure(u, v)


def harmonic_extension(solver: PotentialSolver, boundary_data) -> HarmonicData:
    return solver.harmonic_extension(boundary_data)


def constant_boundary(solver: PotentialSolver, value: float) -> dict:
    return {solver.domain.points[i]: float(value) for i in np.nonzero(solver.killed_mask)[0]}


def indicator_boundary(solver: PotentialSolver, sites: Iterable, value: float = 1.0) -> dict:
    data = constant_boundary(solver, 0.0)
    for p in sites:
        key = LatticePoint(int(p[0]), int(p[1]))
        if key not in data:
            raise ValueError(f"{tuple(p)} is not a killed vertex")
        data[key] = float(value)
    return data
