# experiments/estimate.py

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from clusters import ArmEventKind
from config import DEFAULT_ALPHA
from scheduler import resolve_replicas, run_replicas

from .tasks import make_arm_task


@dataclass
class Estimate:
    label: str
    mean: float
    std_error: float
    replicas: int
    seed: int
    params: dict = field(default_factory=dict)
    wall_time: Optional[float] = field(default=None, compare=False)
    extras: dict = field(default_factory=dict)

    @classmethod
    def from_hits(cls, label: str, hits: int, replicas: int, seed: int, **kw) -> "Estimate":
        """Bernoulli estimate: std_error = sqrt(p (1 - p) / replicas)."""
        if replicas <= 0:
            raise ValueError(f"replicas must be positive, got {replicas}")
        p = hits / replicas
        return cls(label=label, mean=p, std_error=math.sqrt(p * (1 - p) / replicas), replicas=replicas, seed=seed, **kw)

    @classmethod
    def from_values(cls, label: str, values, seed: int, **kw) -> "Estimate":
        v = np.asarray(values, dtype=float)
        if not len(v):
            raise ValueError("no replica values")
        se = float(v.std(ddof=1) / math.sqrt(len(v))) if len(v) > 1 else 0.0
        return cls(label=label, mean=float(v.mean()), std_error=se, replicas=len(v), seed=seed, **kw)

    @property
    def relative_error(self) -> float:
        return self.std_error / self.mean if self.mean else math.inf

    def summary(self) -> str:
        return f"{self.mean:.6g} ± {self.std_error:.2g} ({self.replicas} replicas)"

    def to_record(self) -> dict:
        rec = {
            "type": "estimate",
            "label": self.label,
            "params": dict(self.params),
            "mean": self.mean,
            "std_error": self.std_error,
            "replicas": self.replicas,
            "seed": self.seed,
            "wall_time": self.wall_time,
        }
        if self.extras:
            rec["extras"] = dict(self.extras)
        return rec

    def to_row(self) -> dict:
        row = {"label": self.label, **self.params, "mean": self.mean, "std_error": self.std_error,
               "replicas": self.replicas, "seed": self.seed}
        row.update(self.extras)
        return row

    @classmethod
    def from_record(cls, rec: dict) -> "Estimate":
        return cls(
            label=rec["label"],
            mean=float(rec["mean"]),
            std_error=float(rec["std_error"]),
            replicas=int(rec["replicas"]),
            seed=int(rec["seed"]),
            params=dict(rec.get("params") or {}),
            wall_time=rec.get("wall_time"),
            extras=dict(rec.get("extras") or {}),
        )


def joint_se(a: Estimate, b: Estimate) -> float:
    return math.hypot(a.std_error, b.std_error)


def run_event(task, label: str, params: dict, replicas, seed: int, jobs=None, max_seconds=None, column: int = 0):
    """Budget, run and wrap an event task; returns (Estimate, raw replica array)."""
    n_rep = resolve_replicas(task, replicas, seed, jobs=jobs, max_seconds=max_seconds, column=column)
    t0 = time.perf_counter()
    res = run_replicas(task, n_rep, seed, jobs=jobs)
    est = Estimate.from_hits(
        label,
        int(np.count_nonzero(res[:, column] > 0)),
        n_rep,
        seed,
        params=dict(params),
        wall_time=round(time.perf_counter() - t0, 3),
    )
    return est, res


def estimate_arm(
    kind: ArmEventKind,
    replicas,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
    jobs: Optional[int] = None,
    max_seconds: Optional[float] = None,
) -> Estimate:
    """
    Bernoulli estimate of the arm event, replica i drawn with seed + i.
    Four-arm estimates carry the unfiltered (no outermost condition) result in extras.
    """
    if replicas != "auto" and int(replicas) <= 0:
        raise ValueError(f"replicas must be positive, got {replicas}")
    task = make_arm_task(kind, alpha)
    params = {"kind": kind.kind.value, "setting": kind.setting.value, "k": kind.k, "n": kind.n}
    if kind.setting.value == "discrete":
        params["alpha"] = alpha
    est, res = run_event(task, f"arm/{kind.label}", params, replicas, seed, jobs=jobs, max_seconds=max_seconds)
    if kind.kind.value == "four":
        loose = Estimate.from_hits(est.label, int(np.count_nonzero(res[:, 1] > 0)), est.replicas, seed)
        est.extras["unfiltered_mean"] = loose.mean
        est.extras["unfiltered_std_error"] = loose.std_error
    print(f"[Arm] {kind.label}: {est.summary()}")
    return est
