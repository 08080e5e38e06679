# experiments/landmarks.py

from __future__ import annotations

from typing import Optional

from config import DEFAULT_ALPHA

from .estimate import Estimate, run_event
from .tasks import OuterBoundaryTask, SurroundTask


def estimate_surrounding_loop(k: int, replicas, seed: int, alpha: float = DEFAULT_ALPHA,
                              jobs: Optional[int] = None) -> Estimate:
    """P[some loop of the soup in Box(k) surrounds B_{k/2}]."""
    if k < 4:
        raise ValueError(f"need k >= 4, got k={k}")
    est, _ = run_event(SurroundTask(k=k, alpha=alpha), f"verify/surrounding/k={k}", {"k": k, "alpha": alpha},
                       replicas, seed, jobs=jobs)
    print(f"[Verify] surrounding loop k={k}: {est.summary()}")
    return est


def estimate_outer_boundary_event(n: int, replicas, seed: int, setting: str = "metric",
                                  alpha: float = DEFAULT_ALPHA, jobs: Optional[int] = None) -> Estimate:
    """P[a cluster meets B_{n/8} and its outer boundary lies in A_{n/8, n/4}]."""
    if n < 16:
        raise ValueError(f"need n >= 16, got n={n}")
    if setting not in ("metric", "discrete"):
        raise ValueError(f"unknown setting {setting!r}")
    params = {"n": n, "setting": setting}
    if setting == "discrete":
        params["alpha"] = alpha
    est, _ = run_event(OuterBoundaryTask(n=n, setting=setting, alpha=alpha), f"verify/outer-boundary/{setting}/n={n}",
                       params, replicas, seed, jobs=jobs)
    print(f"[Verify] outer boundary {setting} n={n}: {est.summary()}")
    return est
