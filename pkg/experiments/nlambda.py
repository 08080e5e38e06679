# experiments/nlambda.py

from __future__ import annotations

import time
from typing import Optional

from config import DEFAULT_ALPHA
from scheduler import run_replicas

from .estimate import Estimate
from .tasks import NLambdaTask


def estimate_N_lambda(
    n: int,
    replicas: int,
    seed: int,
    setting: str = "metric",
    k: Optional[int] = None,
    alpha: float = DEFAULT_ALPHA,
    jobs: Optional[int] = None,
) -> Estimate:
    """
    Mean number of Γ points joined to ∂B_{n/2} outside Λ, from the same sample
    that defines Λ. setting="discrete" needs k >= 1 and reports count / k².
    """
    if n < 32:
        raise ValueError(f"N(Λ) needs n >= 32 so that n/8 >= 4, got n={n}")
    if setting not in ("metric", "discrete"):
        raise ValueError(f"unknown setting {setting!r}")
    if setting == "discrete":
        if k is None or k < 1:
            raise ValueError(f"discrete N(Λ) needs k >= 1, got k={k}")
    else:
        k = 0
    if int(replicas) <= 0:
        raise ValueError(f"replicas must be positive, got {replicas}")

    task = NLambdaTask(n=n, setting=setting, k=k, alpha=alpha)
    t0 = time.perf_counter()
    res = run_replicas(task, int(replicas), seed, jobs=jobs)
    params = {"n": n, "setting": setting}
    if k:
        params["k"] = k
    label = f"nlambda/{setting}/n={n}" + (f"/k={k}" if k else "")
    est = Estimate.from_values(label, res[:, 0], seed, params=params, wall_time=round(time.perf_counter() - t0, 3))
    print(f"[NLambda] {label}: {est.summary()}")
    return est
