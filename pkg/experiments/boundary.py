# experiments/boundary.py

from __future__ import annotations

import math
import time
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from clusters import check_radii
from scheduler import resolve_replicas, run_replicas

from .estimate import Estimate, run_event
from .tasks import DropTask, PointTask, SegmentTask, drop_context


def reflection_probability(m: float, c: float) -> float:
    """P[max_{[0, c]} W < m] = 2Φ(m / √c) - 1 for standard Brownian motion W."""
    if m <= 0:
        return 0.0
    if c <= 0:
        return 1.0
    return float(2.0 * norm.cdf(m / math.sqrt(c)) - 1.0)


def resistance_drops(
    n: int,
    k: int,
    replicas,
    seed: int,
    jobs: Optional[int] = None,
    max_seconds: Optional[float] = None,
    threshold: float = 0.0,
    level: float = 1.0,
) -> np.ndarray:
    """
    Per-replica resistance drops. With replicas="auto" the count comes from a
    pilot run of the event drop > threshold.
    """
    check_radii(k, n)
    task = DropTask(n=n, k=k, threshold=threshold, level=level)
    n_rep = resolve_replicas(task, replicas, seed, jobs=jobs, max_seconds=max_seconds, column=1)
    return run_replicas(task, n_rep, seed, jobs=jobs)[:, 0]


def verify_resistance_drop(
    n: int,
    k: int,
    c_threshold: float,
    replicas,
    seed: int,
    jobs: Optional[int] = None,
    drops: Optional[np.ndarray] = None,
    max_seconds: Optional[float] = None,
    level: float = 1.0,
) -> tuple:
    """
    Boundary data `level` on segment(k), 0 on the rest of ∂HalfPlaneBox(2n);
    x0 = (0, ⌊3n/2⌋). Returns (Estimate of P[drop > c], 2Φ(m/√c) - 1) with m
    the harmonic mean at x0.
    """
    check_radii(k, n)
    if c_threshold <= 0:
        raise ValueError(f"c_threshold must be positive, got {c_threshold}")
    if replicas != "auto" and int(replicas) <= 0:
        raise ValueError(f"replicas must be positive or 'auto', got {replicas}")
    _, x0, r0, m = drop_context(n, k, level)
    t0 = time.perf_counter()
    if drops is None:
        drops = resistance_drops(n, k, replicas, seed, jobs=jobs, max_seconds=max_seconds,
                                 threshold=c_threshold, level=level)
    hits = int(np.count_nonzero(drops > c_threshold))
    est = Estimate.from_hits(
        f"verify/resistance-drop/k={k}/n={n}/c={c_threshold:g}",
        hits,
        len(drops),
        seed,
        params={"n": n, "k": k, "c": c_threshold},
        wall_time=round(time.perf_counter() - t0, 3),
    )
    analytic = reflection_probability(m, c_threshold)
    est.extras.update({"analytic": analytic, "harmonic_mean_x0": m, "resistance_x0": r0})
    print(f"[Verify] resistance drop k={k} n={n} c={c_threshold:g}: {est.summary()} vs analytic {analytic:.4g}")
    return est, analytic


def estimate_gff_segment_connection(n: int, k: int, replicas, seed: int, jobs: Optional[int] = None,
                                    max_seconds: Optional[float] = None) -> Estimate:
    check_radii(k, n)
    est, _ = run_event(SegmentTask(n=n, k=k), f"verify/segment/k={k}/n={n}", {"n": n, "k": k},
                       replicas, seed, jobs=jobs, max_seconds=max_seconds)
    print(f"[Verify] segment k={k} n={n}: {est.summary()}")
    return est


def estimate_point_connection(n: int, replicas, seed: int, jobs: Optional[int] = None,
                              max_seconds: Optional[float] = None) -> Estimate:
    """Sign cluster of (0, 1) reaches norm n in HalfPlaneBox(2n) under zero boundary data."""
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    est, _ = run_event(PointTask(n=n), f"verify/low1/n={n}", {"n": n}, replicas, seed, jobs=jobs,
                       max_seconds=max_seconds)
    print(f"[Verify] low1 n={n}: {est.summary()}")
    return est


def segment_grid(n: int, ks: Sequence[int], replicas, seed: int, jobs: Optional[int] = None) -> list:
    return [estimate_gff_segment_connection(n, k, replicas, seed, jobs=jobs) for k in ks]
