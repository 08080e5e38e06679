# clusters/decompose.py

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from lattice import Domain


@dataclass(frozen=True)
class ClusterRecord:
    cid: int
    vertices: np.ndarray  # sorted domain indices
    min_norm: int
    max_norm: int
    sign: int = 0  # 0 for loop clusters, ±1 for sign clusters
    touches: frozenset = frozenset()

    def __len__(self) -> int:
        return len(self.vertices)

    def crosses(self, k: int, n: int) -> bool:
        return self.min_norm <= k and self.max_norm >= n


@dataclass
class ClusterDecomposition:
    domain: Domain
    assignment: np.ndarray  # cluster id per vertex, -1 when unoccupied
    clusters: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    @property
    def occupied(self) -> np.ndarray:
        return self.assignment >= 0

    def cluster_of(self, point) -> Optional[ClusterRecord]:
        c = int(self.assignment[self.domain.index_of(point)])
        return self.clusters[c] if c >= 0 else None

    def mask_of(self, cid: int) -> np.ndarray:
        m = np.zeros(len(self.domain), dtype=bool)
        m[self.clusters[cid].vertices] = True
        return m

    def points_of(self, cid: int) -> frozenset:
        pts = self.domain.points
        return frozenset(pts[i] for i in self.clusters[cid].vertices)

    def crossing(self, k: int, n: int) -> list:
        return [c.cid for c in self.clusters if c.crosses(k, n)]

    def touching(self, marker: str) -> list:
        return [c.cid for c in self.clusters if marker in c.touches]

    def meeting(self, mask: np.ndarray) -> list:
        ids = np.unique(self.assignment[mask & self.occupied])
        return [int(c) for c in ids]


def _marker_masks(domain: Domain, markers: Optional[Mapping]) -> dict:
    masks = {"boundary": domain.boundary_mask, "exposed": domain.exposed_mask}
    for name, sites in (markers or {}).items():
        m = np.zeros(len(domain), dtype=bool)
        for p in sites:
            if domain.contains(p):
                m[domain.index_of(p)] = True
        masks[name] = m
    return masks


def _build(domain: Domain, occupied: np.ndarray, labels: np.ndarray, signs: Optional[np.ndarray], markers) -> ClusterDecomposition:
    """Relabel components of occupied vertices by their smallest vertex index."""
    assignment = np.full(len(domain), -1, dtype=np.int64)
    occ = np.nonzero(occupied)[0]
    if not len(occ):
        return ClusterDecomposition(domain=domain, assignment=assignment, clusters=[])

    raw = labels[occ]
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    remap = np.empty(raw.max() + 1, dtype=np.int64)
    remap[np.unique(raw)[order]] = np.arange(len(order))
    assignment[occ] = remap[raw]

    norms = domain.norms
    masks = _marker_masks(domain, markers)
    members = np.argsort(assignment[occ], kind="stable")
    sorted_occ = occ[members]
    bounds = np.searchsorted(assignment[sorted_occ], np.arange(len(order) + 1))

    clusters = []
    for cid in range(len(order)):
        verts = sorted_occ[bounds[cid]:bounds[cid + 1]]
        touches = frozenset(name for name, m in masks.items() if m[verts].any())
        sign = int(np.sign(signs[verts[0]])) if signs is not None else 0
        clusters.append(
            ClusterRecord(
                cid=cid,
                vertices=verts,
                min_norm=int(norms[verts].min()),
                max_norm=int(norms[verts].max()),
                sign=sign,
                touches=touches,
            )
        )
    return ClusterDecomposition(domain=domain, assignment=assignment, clusters=clusters)


def _components(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    g = sp.coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n)).tocsr()
    _, labels = connected_components(g, directed=False)
    return labels


def decompose_discrete(sample, markers: Optional[Mapping] = None) -> ClusterDecomposition:
    """Loops sharing a vertex are in one cluster; a cluster's vertices are its loops' vertices."""
    domain = sample.domain
    n = len(domain)
    occupied = np.zeros(n, dtype=bool)
    src, dst = [], []
    for verts in sample.vertex_index_sets:
        occupied[verts] = True
        src.append(np.full(len(verts) - 1, verts[0]))
        dst.append(verts[1:])
    if src:
        labels = _components(n, np.concatenate(src), np.concatenate(dst))
    else:
        labels = np.arange(n)
    return _build(domain, occupied, labels, None, markers)


def decompose_metric(sample, markers: Optional[Mapping] = None) -> ClusterDecomposition:
    """Components of (nonzero vertices, open edges); open edges join equal strict signs only."""
    domain = sample.domain
    values = sample.field.values
    e = domain.edges[sample.edge_open]
    labels = _components(len(domain), e[:, 0], e[:, 1])
    return _build(domain, values != 0, labels, values, markers)


def cluster_frame(decomp: ClusterDecomposition) -> pd.DataFrame:
    occ = np.nonzero(decomp.occupied)[0]
    c = decomp.domain.coords[occ]
    cid = decomp.assignment[occ]
    signs = np.array([decomp.clusters[i].sign for i in cid], dtype=np.int64) if len(cid) else np.zeros(0, dtype=np.int64)
    return pd.DataFrame({"x": c[:, 0], "y": c[:, 1], "cluster": cid, "sign": signs})
