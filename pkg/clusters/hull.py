# clusters/hull.py

from __future__ import annotations

from typing import Iterable, Optional, Union

import numpy as np
from scipy import ndimage
from scipy.sparse.csgraph import connected_components

from lattice import Domain

from .decompose import ClusterDecomposition

# l∞ fattening of radius 2 and the one-step ring around it
FATTEN = np.ones((5, 5), dtype=bool)
RING = np.ones((3, 3), dtype=bool)


def as_mask(vertices: Union[np.ndarray, Iterable], ambient: Domain) -> np.ndarray:
    if isinstance(vertices, np.ndarray) and vertices.dtype == bool:
        if vertices.shape != (len(ambient),):
            raise ValueError(f"mask must have shape ({len(ambient)},), got {vertices.shape}")
        return vertices
    m = np.zeros(len(ambient), dtype=bool)
    if isinstance(vertices, np.ndarray):
        m[vertices] = True
        return m
    for p in vertices:
        m[ambient.index_of(p)] = True
    return m


def mask_points(ambient: Domain, mask: np.ndarray) -> frozenset:
    pts = ambient.points
    return frozenset(pts[i] for i in np.nonzero(mask)[0])


def hull_mask(vertices, ambient: Domain) -> np.ndarray:
    """
    Filled hull: the set plus every vertex not reachable from the exposed
    vertices of the ambient domain by nearest-neighbour paths avoiding it.
    """
    mask = as_mask(vertices, ambient)
    free = np.nonzero(~mask)[0]
    if not len(free):
        return np.ones(len(ambient), dtype=bool)
    adj = ambient.adjacency
    _, labels = connected_components(adj[free][:, free], directed=False)
    outside_labels = np.unique(labels[ambient.exposed_mask[free]])
    outside = np.zeros(len(ambient), dtype=bool)
    outside[free[np.isin(labels, outside_labels)]] = True
    return ~outside


def outer_boundary(vertices, ambient: Domain) -> np.ndarray:
    """Hull vertices with a lattice neighbour outside the hull (or outside the domain)."""
    hull = hull_mask(vertices, ambient)
    nb = ambient.neighbors
    off = (nb < 0) | ~hull[np.where(nb < 0, 0, nb)]
    return hull & off.any(axis=1)


def cluster_hull(decomp: ClusterDecomposition, cid: int, ambient: Optional[Domain] = None) -> frozenset:
    ambient = ambient or decomp.domain
    if ambient is decomp.domain:
        return mask_points(ambient, hull_mask(decomp.mask_of(cid), ambient))
    return mask_points(ambient, hull_mask(decomp.points_of(cid), ambient))


def surrounds(vertices, radius: int, ambient: Domain) -> bool:
    """The set avoids B_radius and its filled hull covers B_radius."""
    mask = as_mask(vertices, ambient)
    ball = ambient.ball_mask(radius)
    if (mask & ball).any():
        return False
    return bool(hull_mask(mask, ambient)[ball].all())


def outer_boundary_within(vertices, ambient: Domain, lo: int, hi: int) -> bool:
    ob = outer_boundary(vertices, ambient)
    norms = ambient.norms[ob]
    return bool(len(norms)) and bool(norms.min() >= lo and norms.max() <= hi)


def lambda_and_gamma(decomp: ClusterDecomposition, n: int) -> tuple:
    """
    Λ = B_{n/8} plus every cluster meeting it.
    Γ = vertices at l∞ distance exactly 3 from Λ (the ring around its
    2-fattening) that connect to the exposed boundary avoiding the fattening.
    Returns (Λ mask, Γ mask) over decomp.domain.
    """
    d = decomp.domain
    ball = d.ball_mask(n // 8)
    lam = ball.copy()
    for cid in decomp.meeting(ball):
        lam[decomp.clusters[cid].vertices] = True

    inside = d.grid_mask
    lam_g = d.to_grid(lam, fill=False)
    fat = ndimage.binary_dilation(lam_g, structure=FATTEN) & inside
    ring = ndimage.binary_dilation(fat, structure=RING) & ~fat & inside

    labels, _ = ndimage.label(inside & ~fat)
    exposed_g = d.to_grid(d.exposed_mask, fill=False)
    outside_labels = np.unique(labels[exposed_g & (labels > 0)])
    reach = np.isin(labels, outside_labels) & (labels > 0)
    gamma = d.from_grid(ring & reach)
    return lam, gamma
