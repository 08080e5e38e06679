# rwls/laws.py

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from lattice import Domain, custom_domain
from potential import PotentialSolver

# banded storage above this many cells switches to a sparse natural-order LU
BANDED_CELL_LIMIT = 50_000_000
DRAW_CHUNK = 256


class RejectionExcursions:
    """
    Excursions v -> v inside the residual domain D_i = {rank >= i}.

    Simple random walk from v, restarted whenever it steps onto a vertex of
    lower rank, a boundary vertex or outside the domain, kept once it returns
    to v. The kept path has the law of the h-transformed walk.
    """

    def __init__(self, neighbors: list, rank: list, base_index: int, level: int):
        self.neighbors = neighbors
        self.rank = rank
        self.base_index = base_index
        self.level = level

    def sample(self, rng: np.random.Generator) -> list:
        v = self.base_index
        nb = self.neighbors
        rank = self.rank
        lvl = self.level
        dirs = rng.integers(0, 4, size=DRAW_CHUNK)
        pos = 0
        while True:
            path = [v]
            x = v
            while True:
                if pos == DRAW_CHUNK:
                    dirs = rng.integers(0, 4, size=DRAW_CHUNK)
                    pos = 0
                y = nb[x][dirs[pos]]
                pos += 1
                if y < 0 or rank[y] < lvl:
                    break
                if y == v:
                    return path
                path.append(y)
                x = y


@dataclass
class ExcursionTable:
    """
    Explicit h-transform: h(y) = P^y[hit v before leaving D_i], h(v) = 1.
    From x != v the walk steps to y with probability h(y) / (4 h(x));
    from v with probability h(y) / (4 r).
    """

    base_index: int
    return_prob: float
    rows: dict = field(default_factory=dict)  # state -> (targets, probs)
    h: dict = field(default_factory=dict)

    @classmethod
    def build(cls, domain: Domain, rank: np.ndarray, base_index: int, level: int) -> "ExcursionTable":
        residual = np.nonzero(rank >= level)[0]
        pts = [domain.points[i] for i in residual]
        base = domain.points[base_index]
        sub = custom_domain(pts, boundary=[base])
        if len(sub) == 1:
            return cls(base_index=base_index, return_prob=0.0)

        solver = PotentialSolver(sub)
        ext = solver.harmonic_extension({base: 1.0}).values
        h_full = {int(residual[j]): float(ext[sub.index[p]]) for j, p in enumerate(pts)}

        nb = domain.neighbors
        rows = {}
        r = 0.25 * sum(h_full.get(int(y), 0.0) for y in nb[base_index] if y >= 0)
        for x, hx in h_full.items():
            if hx <= 0:
                continue
            targets, weights = [], []
            for y in nb[x]:
                hy = h_full.get(int(y), 0.0) if y >= 0 else 0.0
                if hy > 0:
                    targets.append(int(y))
                    weights.append(0.25 * hy)
            if not targets:
                continue
            denom = r if x == base_index else hx
            rows[x] = (np.asarray(targets, dtype=np.int64), np.asarray(weights) / denom)
        return cls(base_index=base_index, return_prob=r, rows=rows, h=h_full)

    def row_sums(self) -> dict:
        return {x: float(p.sum()) for x, (_, p) in self.rows.items()}

    def sample(self, rng: np.random.Generator) -> list:
        v = self.base_index
        if v not in self.rows:
            raise RuntimeError(f"no excursion from vertex index {v}: return probability is 0")
        path = [v]
        x = v
        while True:
            targets, probs = self.rows[x]
            cdf = np.cumsum(probs)
            j = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(targets) - 1)
            y = int(targets[j])
            if y == v:
                return path
            path.append(y)
            x = y


@dataclass
class VertexLoopLaw:
    base_vertex: tuple
    base_index: int
    rank: int
    return_prob: float
    excursion_sampler: Union[RejectionExcursions, ExcursionTable]

    @property
    def loop_mass(self) -> float:
        """-ln(1 - r) = Σ_j r^j / j"""
        return -math.log1p(-self.return_prob)


@dataclass
class SoupLaws:
    domain: Domain
    laws: list
    rank: np.ndarray  # -1 off the interior

    def __len__(self) -> int:
        return len(self.laws)

    def __iter__(self):
        return iter(self.laws)

    def __getitem__(self, i) -> VertexLoopLaw:
        return self.laws[i]

    @property
    def return_probs(self) -> np.ndarray:
        return np.array([law.return_prob for law in self.laws])

    @property
    def masses(self) -> np.ndarray:
        return -np.log1p(-self.return_probs)

    def total_mass(self) -> float:
        return float(self.masses.sum())

    def law_at(self, point) -> VertexLoopLaw:
        r = int(self.rank[self.domain.index_of(point)])
        if r < 0:
            raise ValueError(f"{tuple(point)} is not an interior vertex")
        return self.laws[r]


def _resolve_order(domain: Domain, order: Optional[Sequence]) -> np.ndarray:
    interior = domain.interior
    if order is None:
        return interior.copy()
    idx = np.array([domain.index_of(p) for p in order], dtype=np.int64)
    if len(idx) != len(interior) or set(idx.tolist()) != set(interior.tolist()):
        raise ValueError(f"order must enumerate the {len(interior)} interior vertices exactly once, got {len(idx)}")
    return idx


def interior_pivots(domain: Domain, order: np.ndarray) -> np.ndarray:
    """
    pivots[i] = 1 / G_{D_i}(v_i, v_i), D_i = {v_i, ..., v_m}.

    Eliminating v_m, ..., v_{i+1} first leaves the Schur pivot of v_i, so a
    Cholesky factor of the reversed-order interior Laplacian carries them all
    on its diagonal.
    """
    m = len(order)
    if m == 0:
        return np.zeros(0)
    rev = order[::-1]
    adj = domain.adjacency
    a = adj[rev][:, rev]
    mat = (4.0 * sp.identity(m, format="csr") - a).tocoo()
    upper = mat.row <= mat.col
    rows, cols, vals = mat.row[upper], mat.col[upper], mat.data[upper]
    u = int((cols - rows).max()) if len(rows) else 0

    if (u + 1) * m <= BANDED_CELL_LIMIT:
        ab = np.zeros((u + 1, m))
        ab[u + rows - cols, cols] = vals
        c = sla.cholesky_banded(ab, lower=False)
        piv_rev = c[u] ** 2
    else:
        lu = spla.splu(mat.tocsc(), permc_spec="NATURAL", diag_pivot_thresh=0.0, options={"SymmetricMode": True})
        piv_rev = lu.U.diagonal()
    return piv_rev[::-1].copy()


def build_vertex_laws(domain: Domain, order: Optional[Iterable] = None, tables: bool = False) -> SoupLaws:
    """
    Minimal-vertex decomposition of the loop measure over the interior.

    Law i covers the loops whose lowest-ranked vertex is v_i: excursions from
    v_i inside D_i, return probability r_i = 1 - 1/(4 G_{D_i}(v_i, v_i)).
    Lattice neighbours off the interior are absorbing, so disconnected residual
    pieces need no special treatment and isolated vertices get r = 0.
    """
    idx = _resolve_order(domain, None if order is None else list(order))
    rank = np.full(len(domain), -1, dtype=np.int64)
    rank[idx] = np.arange(len(idx))

    pivots = interior_pivots(domain, idx)
    r = np.clip(1.0 - pivots / 4.0, 0.0, None)
    r[r < 1e-14] = 0.0

    nb_list = [tuple(int(y) for y in row) for row in domain.neighbors]
    rank_list = rank.tolist()
    laws = []
    for i, v in enumerate(idx):
        v = int(v)
        if tables:
            sampler = ExcursionTable.build(domain, rank, v, i)
        else:
            sampler = RejectionExcursions(nb_list, rank_list, v, i)
        laws.append(
            VertexLoopLaw(
                base_vertex=domain.points[v],
                base_index=v,
                rank=i,
                return_prob=float(r[i]),
                excursion_sampler=sampler,
            )
        )
    return SoupLaws(domain=domain, laws=laws, rank=rank)
