# lattice/geometry.py

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

# right, up, left, down
STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


class LatticePoint(NamedTuple):
    x: int
    y: int

    def norm(self) -> int:
        return max(abs(self.x), abs(self.y))

    def is_adjacent(self, other) -> bool:
        return abs(self.x - other[0]) + abs(self.y - other[1]) == 1


class DomainKind(str, Enum):
    BOX = "box"
    HALF_PLANE_BOX = "halfplane"
    ANNULUS = "annulus"
    CUSTOM = "custom"


def linf_norm(p) -> int:
    return max(abs(p[0]), abs(p[1]))


@dataclass(frozen=True, eq=False)
class Domain:
    """
    Finite vertex set of Z^2 with its induced unit edges and a killing boundary.

    points are sorted lexicographically, so vertex indices follow (x, y) order.
    Lattice neighbours missing from the domain are absorbing for every walk.
    """

    kind: DomainKind
    params: tuple
    points: tuple
    boundary_mask: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def coords(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 2), dtype=np.int64)
        return np.asarray(self.points, dtype=np.int64)

    @cached_property
    def norms(self) -> np.ndarray:
        return np.abs(self.coords).max(axis=1) if len(self) else np.zeros(0, dtype=np.int64)

    @cached_property
    def neighbors(self) -> np.ndarray:
        """(N, 4) neighbour indices in STEPS order; -1 where the neighbour is outside."""
        nb = np.full((len(self), 4), -1, dtype=np.int64)
        idx = self.index
        for i, (x, y) in enumerate(self.points):
            for d, (dx, dy) in enumerate(STEPS):
                j = idx.get((x + dx, y + dy))
                if j is not None:
                    nb[i, d] = j
        return nb

    @cached_property
    def edges(self) -> np.ndarray:
        """(E, 2) index pairs, one per unit edge, from the right/up neighbours."""
        nb = self.neighbors
        out = []
        for d in (0, 1):
            src = np.nonzero(nb[:, d] >= 0)[0]
            out.append(np.stack([src, nb[src, d]], axis=1))
        return np.concatenate(out, axis=0).astype(np.int64)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        e = self.edges
        n = len(self)
        data = np.ones(2 * len(e))
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    @cached_property
    def interior_mask(self) -> np.ndarray:
        return ~self.boundary_mask

    @cached_property
    def interior(self) -> np.ndarray:
        return np.nonzero(self.interior_mask)[0]

    @cached_property
    def boundary(self) -> frozenset:
        return frozenset(self.points[i] for i in np.nonzero(self.boundary_mask)[0])

    @cached_property
    def exposed_mask(self) -> np.ndarray:
        """Vertices with a lattice neighbour outside the domain (the ambient outer boundary)."""
        if not len(self):
            return np.zeros(0, dtype=bool)
        return (self.neighbors < 0).any(axis=1)

    # grid view (bounding box), used by dilations and labelling

    @cached_property
    def origin(self) -> tuple:
        c = self.coords
        return int(c[:, 0].min()), int(c[:, 1].min())

    @cached_property
    def grid_shape(self) -> tuple:
        c = self.coords
        return int(c[:, 0].max() - c[:, 0].min() + 1), int(c[:, 1].max() - c[:, 1].min() + 1)

    @cached_property
    def grid_rows(self) -> np.ndarray:
        return self.coords[:, 0] - self.origin[0]

    @cached_property
    def grid_cols(self) -> np.ndarray:
        return self.coords[:, 1] - self.origin[1]

    def to_grid(self, values: np.ndarray, fill=0) -> np.ndarray:
        arr = np.full(self.grid_shape, fill, dtype=np.asarray(values).dtype)
        arr[self.grid_rows, self.grid_cols] = values
        return arr

    def from_grid(self, grid: np.ndarray) -> np.ndarray:
        return grid[self.grid_rows, self.grid_cols]

    @cached_property
    def grid_mask(self) -> np.ndarray:
        return self.to_grid(np.ones(len(self), dtype=bool), fill=False)

    # lookups

    def index_of(self, point) -> int:
        try:
            return self.index[(int(point[0]), int(point[1]))]
        except KeyError:
            raise ValueError(f"Point {tuple(point)} is not in domain {self.descriptor_or_kind()}") from None

    def contains(self, point) -> bool:
        return (int(point[0]), int(point[1])) in self.index

    def is_boundary(self, point) -> bool:
        return bool(self.boundary_mask[self.index_of(point)])

    def ball_mask(self, radius: int) -> np.ndarray:
        return self.norms <= radius

    # descriptors

    @property
    def descriptor(self) -> str:
        if self.kind == DomainKind.CUSTOM:
            raise ValueError("Custom domains have no plain-text descriptor")
        return " ".join([self.kind.value] + [str(p) for p in self.params])

    def descriptor_or_kind(self) -> str:
        return self.kind.value if self.kind == DomainKind.CUSTOM else self.descriptor

    def __repr__(self) -> str:
        return f"Domain({self.descriptor_or_kind()}, vertices={len(self)}, boundary={int(self.boundary_mask.sum())})"


def _make(kind: DomainKind, params: tuple, points: Iterable, is_boundary) -> Domain:
    pts = tuple(sorted(LatticePoint(int(x), int(y)) for x, y in set(points)))
    mask = np.fromiter((bool(is_boundary(p)) for p in pts), dtype=bool, count=len(pts))
    return Domain(kind=kind, params=tuple(params), points=pts, boundary_mask=mask)


def _check_radius(name: str, value: int, minimum: int) -> int:
    try:
        v = int(value)
    except Exception:
        raise ValueError(f"{name} must be an integer, got {value!r}") from None
    if v != value or v < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return v


def build_domain(kind, *params) -> Domain:
    """
    Box(n):          {‖v‖∞ <= n}, boundary ‖v‖∞ = n
    HalfPlaneBox(n): {‖v‖∞ <= n, y >= 0}, boundary = row y = 0 plus outer square
    Annulus(k, n):   {k <= ‖v‖∞ <= n}, boundary = both squares
    """
    kind = DomainKind(kind)

    if kind == DomainKind.BOX:
        if len(params) != 1:
            raise ValueError(f"box takes one radius, got {params}")
        n = _check_radius("n", params[0], 0)
        r = range(-n, n + 1)
        return _make(kind, (n,), itertools.product(r, r), lambda p: p.norm() == n)

    if kind == DomainKind.HALF_PLANE_BOX:
        if len(params) != 1:
            raise ValueError(f"halfplane takes one radius, got {params}")
        n = _check_radius("n", params[0], 1)
        pts = itertools.product(range(-n, n + 1), range(0, n + 1))
        return _make(kind, (n,), pts, lambda p: p.y == 0 or p.norm() == n)

    if kind == DomainKind.ANNULUS:
        if len(params) != 2:
            raise ValueError(f"annulus takes (k, n), got {params}")
        k = _check_radius("k", params[0], 1)
        n = _check_radius("n", params[1], 1)
        if k >= n:
            raise ValueError(f"annulus needs k < n, got k={k}, n={n}")
        r = range(-n, n + 1)
        pts = (p for p in itertools.product(r, r) if linf_norm(p) >= k)
        return _make(kind, (k, n), pts, lambda p: p.norm() in (k, n))

    raise ValueError("use custom_domain() for custom vertex sets")


def custom_domain(points: Iterable, boundary: Optional[Iterable] = None) -> Domain:
    pts = [(int(p[0]), int(p[1])) for p in points]
    if not pts:
        raise ValueError("custom domain needs at least one vertex")
    bnd = {(int(p[0]), int(p[1])) for p in (boundary or ())}
    missing = bnd.difference(pts)
    if missing:
        raise ValueError(f"boundary sites outside the vertex set: {sorted(missing)[:5]}")
    return _make(DomainKind.CUSTOM, (), pts, lambda p: (p.x, p.y) in bnd)


def parse_descriptor(text: str) -> Domain:
    parts = str(text).replace(",", " ").split()
    if not parts:
        raise ValueError("empty domain descriptor")
    try:
        params = [int(p) for p in parts[1:]]
    except ValueError:
        raise ValueError(f"bad domain descriptor {text!r}") from None
    return build_domain(parts[0].strip().lower(), *params)


def segment(k: int) -> list:
    """Boundary segment l_{3k/2} on the real axis."""
    half = (3 * int(k)) // 2
    return [LatticePoint(x, 0) for x in range(-half, half + 1)]


def nearest_axis_point(height: float) -> LatticePoint:
    """Lattice point nearest (0, height); half-integers are floored."""
    return LatticePoint(0, int(np.floor(height)))
