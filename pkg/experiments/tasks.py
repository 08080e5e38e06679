# experiments/tasks.py

"""
Picklable per-replica workers. Each task maps a replica seed to a tuple of
floats; heavy read-only state (domains, factorizations, vertex laws) is built
once per process through the cached context builders.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import ndimage

from clusters import (
    ArmEventKind,
    decompose_discrete,
    decompose_metric,
    four_arm_event,
    lambda_and_gamma,
    outer_boundary_within,
    surrounds,
    two_arm_halfplane_event,
)
from config import DEFAULT_ALPHA
from gff import FieldSampler, extend_to_metric
from lattice import build_domain, nearest_axis_point, segment
from potential import PotentialSolver, constant_boundary, indicator_boundary
from rwls import build_vertex_laws, sample_rwls

SEGMENT = "segment"


@lru_cache(maxsize=8)
def domain_for(kind: str, radius: int):
    return build_domain(kind, radius)


@lru_cache(maxsize=8)
def field_context(kind: str, radius: int, seg_k: int = 0, level: float = 1.0):
    """Solver plus sampler for zero boundary data, or `level` on segment(seg_k) when seg_k > 0."""
    domain = domain_for(kind, radius)
    solver = PotentialSolver(domain)
    data = indicator_boundary(solver, segment(seg_k), level) if seg_k else constant_boundary(solver, 0.0)
    return solver, FieldSampler(solver, data)


@lru_cache(maxsize=4)
def soup_context(kind: str, radius: int):
    return build_vertex_laws(domain_for(kind, radius))


def metric_clusters(kind: str, radius: int, rng, seg_k: int = 0, level: float = 1.0):
    _, sampler = field_context(kind, radius, seg_k, level)
    markers = {SEGMENT: segment(seg_k)} if seg_k else None
    return decompose_metric(extend_to_metric(sampler.sample(rng), rng), markers=markers)


def soup_clusters(kind: str, radius: int, rng, alpha: float):
    return decompose_discrete(sample_rwls(soup_context(kind, radius), alpha, rng))


def clusters_for(setting: str, kind: str, radius: int, rng, alpha: float = DEFAULT_ALPHA):
    if setting == "metric":
        return metric_clusters(kind, radius, rng)
    return soup_clusters(kind, radius, rng, alpha)


@dataclass(frozen=True)
class ArmTask:
    """(outermost-filtered hit, unfiltered hit) for one arm event."""

    kind: str
    setting: str
    k: int
    n: int
    alpha: float = DEFAULT_ALPHA

    def __call__(self, seed: int) -> tuple:
        event = ArmEventKind(self.kind, self.setting, self.k, self.n)
        dom_kind = "box" if event.kind.value == "four" else "halfplane"
        rng = np.random.default_rng(seed)
        decomp = clusters_for(event.setting.value, dom_kind, 2 * self.n, rng, self.alpha)
        if dom_kind == "box":
            loose = four_arm_event(decomp, self.k, self.n, outermost=False)
            strict = loose and four_arm_event(decomp, self.k, self.n, outermost=True)
            return float(strict), float(loose)
        hit = float(two_arm_halfplane_event(decomp, self.k, self.n))
        return hit, hit


@dataclass(frozen=True)
class SegmentTask:
    """Positive cluster from segment(k) reaching norm >= n in HalfPlaneBox(2n), boundary 1 on the segment."""

    n: int
    k: int

    def __call__(self, seed: int) -> tuple:
        rng = np.random.default_rng(seed)
        decomp = metric_clusters("halfplane", 2 * self.n, rng, seg_k=self.k)
        hit = any(c.sign > 0 and c.max_norm >= self.n for c in decomp.clusters if SEGMENT in c.touches)
        return (float(hit),)


@dataclass(frozen=True)
class PointTask:
    """Sign cluster of (0, 1) reaching norm >= n in HalfPlaneBox(2n), zero boundary."""

    n: int

    def __call__(self, seed: int) -> tuple:
        rng = np.random.default_rng(seed)
        decomp = metric_clusters("halfplane", 2 * self.n, rng)
        c = decomp.cluster_of((0, 1))
        return (float(c is not None and c.max_norm >= self.n),)


@lru_cache(maxsize=4)
def drop_context(n: int, k: int, level: float = 1.0):
    solver, sampler = field_context("halfplane", 2 * n, k, level)
    x0 = nearest_axis_point(1.5 * n)
    return solver, x0, solver.effective_resistance(x0), float(sampler.mean[solver.domain.index_of(x0)])


@dataclass(frozen=True)
class DropTask:
    """
    R(x0, ∂D) - R(x0, ∂D ∪ Λ0) with Λ0 the positive clusters meeting segment(k),
    followed by the indicator drop > threshold.
    """

    n: int
    k: int
    threshold: float = 0.0
    level: float = 1.0

    def __call__(self, seed: int) -> tuple:
        drop = self._drop(seed)
        return (drop, float(drop > self.threshold))

    def _drop(self, seed: int) -> float:
        solver, x0, r0, _ = drop_context(self.n, self.k, self.level)
        rng = np.random.default_rng(seed)
        decomp = metric_clusters("halfplane", 2 * self.n, rng, seg_k=self.k, level=self.level)
        domain = solver.domain
        lam = np.zeros(len(domain), dtype=bool)
        for c in decomp.clusters:
            if c.sign > 0 and SEGMENT in c.touches:
                lam[c.vertices] = True
        if lam[domain.index_of(x0)]:
            return r0
        extra = np.nonzero(lam & ~solver.killed_mask)[0]
        if not len(extra):
            return 0.0
        r1 = solver.with_killing(domain.points[i] for i in extra).effective_resistance(x0)
        return r0 - r1


def _fat(mask_grid: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return mask_grid
    return ndimage.binary_dilation(mask_grid, structure=np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool))


@dataclass(frozen=True)
class NLambdaTask:
    """
    Points u of Γ joined to ∂B_{n/2} by a cluster outside Λ. With k > 0 the
    cluster only has to meet B_k(u) and the count is divided by k².
    """

    n: int
    setting: str = "metric"
    k: int = 0
    alpha: float = DEFAULT_ALPHA

    def __call__(self, seed: int) -> tuple:
        rng = np.random.default_rng(seed)
        decomp = clusters_for(self.setting, "box", self.n, rng, self.alpha)
        d = decomp.domain
        lam, gamma = lambda_and_gamma(decomp, self.n)
        good = np.zeros(len(d), dtype=bool)
        half = self.n // 2
        for c in decomp.clusters:
            if c.max_norm >= half and not lam[c.vertices[0]]:
                good[c.vertices] = True
        reach = d.from_grid(_fat(d.to_grid(good, fill=False), self.k))
        count = int(np.count_nonzero(gamma & reach))
        return (count / self.k ** 2 if self.k else float(count),)


@dataclass(frozen=True)
class SurroundTask:
    """Some loop of the soup in Box(k) surrounds B_{k/2}."""

    k: int
    alpha: float = DEFAULT_ALPHA

    def __call__(self, seed: int) -> tuple:
        laws = soup_context("box", self.k)
        d = laws.domain
        r = self.k // 2
        sample = sample_rwls(laws, self.alpha, np.random.default_rng(seed))
        for verts in sample.vertex_index_sets:
            c = d.coords[verts]
            # a surrounding loop has sites beyond r on all four sides
            if c[:, 0].max() <= r or c[:, 0].min() >= -r or c[:, 1].max() <= r or c[:, 1].min() >= -r:
                continue
            if surrounds(verts, r, d):
                return (1.0,)
        return (0.0,)


@dataclass(frozen=True)
class OuterBoundaryTask:
    """A cluster of the soup in Box(n) meeting B_{n/8} with outer boundary inside A_{n/8, n/4}."""

    n: int
    setting: str = "metric"
    alpha: float = DEFAULT_ALPHA

    def __call__(self, seed: int) -> tuple:
        rng = np.random.default_rng(seed)
        decomp = clusters_for(self.setting, "box", self.n, rng, self.alpha)
        lo, hi = self.n // 8, self.n // 4
        for c in decomp.clusters:
            if c.min_norm > lo or c.max_norm > hi:
                continue
            if outer_boundary_within(c.vertices, decomp.domain, lo, hi):
                return (1.0,)
        return (0.0,)


def make_arm_task(event: ArmEventKind, alpha: Optional[float] = None) -> ArmTask:
    return ArmTask(event.kind.value, event.setting.value, event.k, event.n, DEFAULT_ALPHA if alpha is None else alpha)
