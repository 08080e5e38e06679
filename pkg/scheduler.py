# scheduler.py

from __future__ import annotations

import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd

from config import (
    LAST_RUN_PATH,
    MAX_AUTO_REPLICAS,
    MIN_EXPECTED_HITS,
    PILOT_REPLICAS,
    REPLICA_CHUNK,
)

# pilot runs draw from a seed range disjoint from any real run
PILOT_SEED_OFFSET = 1_000_000_007


class BudgetError(RuntimeError):
    pass


@dataclass
class BudgetPlan:
    replicas: int
    pilot_hits: int
    pilot_replicas: int
    seconds_per_replica: float
    projected_seconds: float


def resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None or jobs <= 0:
        return os.cpu_count() or 1
    return int(jobs)


def _run_chunk(task: Callable, seed: int, start: int, stop: int) -> list:
    return [task(seed + i) for i in range(start, stop)]


def run_replicas(task: Callable, replicas: int, seed: int, jobs: Optional[int] = None) -> np.ndarray:
    """
    task(seed + i) for i in range(replicas), stacked in index order as a
    (replicas, m) float array. Output never depends on jobs or scheduling.
    """
    if replicas <= 0:
        raise ValueError(f"replicas must be positive, got {replicas}")
    jobs = resolve_jobs(jobs)
    bounds = list(range(0, replicas, REPLICA_CHUNK)) + [replicas]
    chunks = list(zip(bounds[:-1], bounds[1:]))

    if jobs == 1 or len(chunks) == 1:
        rows = []
        for start, stop in chunks:
            rows.extend(_run_chunk(task, seed, start, stop))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_chunk, task, seed, start, stop) for start, stop in chunks]
            rows = []
            for fut in futures:
                rows.extend(fut.result())
    return np.asarray(rows, dtype=float).reshape(replicas, -1)


def plan_budget(
    task: Callable,
    seed: int,
    jobs: Optional[int] = None,
    column: int = 0,
    min_hits: int = MIN_EXPECTED_HITS,
    pilot: int = PILOT_REPLICAS,
    max_seconds: Optional[float] = None,
    max_replicas: int = MAX_AUTO_REPLICAS,
) -> BudgetPlan:
    """
    Replica count giving >= min_hits expected hits of the event in `column`,
    from a pilot run on a disjoint seed range. Zero pilot hits are treated as
    half a hit.
    """
    jobs = resolve_jobs(jobs)
    t0 = time.perf_counter()
    res = run_replicas(task, pilot, seed + PILOT_SEED_OFFSET, jobs=jobs)
    elapsed = time.perf_counter() - t0
    hits = int(np.count_nonzero(res[:, column] > 0))
    p = max(hits, 0.5) / pilot
    replicas = max(pilot, int(math.ceil(min_hits / p)))
    per = elapsed * jobs / pilot
    projected = per * replicas / jobs
    print(f"[Budget] pilot {hits}/{pilot} hits -> {replicas} replicas, ~{projected:.0f}s projected")

    if replicas > max_replicas:
        msg = f"auto budget needs {replicas} replicas (> {max_replicas}); pilot hit rate {p:.3g}"
        warnings.warn(msg)
        raise BudgetError(msg)
    if max_seconds is not None and projected > max_seconds:
        msg = f"auto budget projected {projected:.0f}s exceeds the {max_seconds:.0f}s cap"
        warnings.warn(msg)
        raise BudgetError(msg)
    return BudgetPlan(
        replicas=replicas,
        pilot_hits=hits,
        pilot_replicas=pilot,
        seconds_per_replica=per,
        projected_seconds=projected,
    )


def resolve_replicas(
    task: Callable,
    replicas,
    seed: int,
    jobs: Optional[int] = None,
    max_seconds: Optional[float] = None,
    column: int = 0,
) -> int:
    if replicas == "auto":
        return plan_budget(task, seed, jobs=jobs, column=column, max_seconds=max_seconds).replicas
    replicas = int(replicas)
    if replicas <= 0:
        raise ValueError(f"replicas must be positive or 'auto', got {replicas}")
    return replicas


# --- run ledger


def _load_last_run(path: str = LAST_RUN_PATH) -> Dict[str, dict]:
    if not os.path.exists(path):
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except Exception:
        return {}


def _save_last_run(state: Dict[str, dict], path: str = LAST_RUN_PATH) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        json.dump(state, f, indent=2, sort_keys=True)
    os.replace(tmp, path)


def record_run(label: str, info: dict, path: str = LAST_RUN_PATH) -> None:
    """Remember the last completed run per experiment label."""
    state = _load_last_run(path)
    entry = dict(info)
    entry["finished_at"] = pd.Timestamp.now(tz="UTC").isoformat()
    state[label] = entry
    _save_last_run(state, path)


def last_run(label: str, path: str = LAST_RUN_PATH) -> Optional[dict]:
    return _load_last_run(path).get(label)
