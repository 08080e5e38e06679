# experiments/fit.py

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union

import numpy as np

from .estimate import Estimate


class FitMode(str, Enum):
    VARY_K = "vary-k"
    VARY_N = "vary-n"


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    slope_stderr: float
    points: list  # (log-abscissa, log-estimate, weight)
    mode: FitMode = FitMode.VARY_K
    label: str = ""
    params: dict = field(default_factory=dict)

    @property
    def exponent(self) -> float:
        """Decay exponent: slope for VaryK, -slope for VaryN."""
        return self.slope if self.mode == FitMode.VARY_K else -self.slope

    def residuals(self) -> np.ndarray:
        x, y, _ = np.asarray(self.points, dtype=float).T
        return y - (self.intercept + self.slope * x)

    def summary(self) -> str:
        return f"slope {self.slope:.4f} ± {self.slope_stderr:.2g}, intercept {self.intercept:.4f} ({len(self.points)} points)"

    def to_record(self) -> dict:
        return {
            "type": "fit",
            "label": self.label,
            "params": dict(self.params),
            "mode": FitMode(self.mode).value,
            "slope": self.slope,
            "intercept": self.intercept,
            "slope_stderr": self.slope_stderr,
            "points": [list(p) for p in self.points],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ExponentFit":
        return cls(
            slope=float(rec["slope"]),
            intercept=float(rec["intercept"]),
            slope_stderr=float(rec["slope_stderr"]),
            points=[tuple(float(v) for v in p) for p in rec["points"]],
            mode=FitMode(rec.get("mode", FitMode.VARY_K.value)),
            label=rec.get("label", ""),
            params=dict(rec.get("params") or {}),
        )


def _keyed(estimates: Union[Mapping, Iterable]) -> list:
    if isinstance(estimates, Mapping):
        return [(int(k), int(n), e) for (k, n), e in estimates.items()]
    return [(int(e.params["k"]), int(e.params["n"]), e) for e in estimates]


def fit_exponent(estimates, mode: Union[FitMode, str] = FitMode.VARY_K, label: str = "") -> ExponentFit:
    """
    Weighted least squares of log(mean) on log(k/n) (VaryK) or log(n) (VaryN),
    weights 1 / (relative SE)². Zero estimates are dropped with a warning.
    When any surviving point has zero SE all weights are equal.
    """
    mode = FitMode(mode)
    pts = []
    for k, n, e in _keyed(estimates):
        if e.mean <= 0:
            warnings.warn(f"fit_exponent: dropping zero estimate at k={k}, n={n} ({e.label})")
            continue
        x = math.log(k / n) if mode == FitMode.VARY_K else math.log(n)
        pts.append((x, math.log(e.mean), e.mean, e.std_error))
    if len(pts) < 3:
        raise ValueError(f"fit_exponent needs >= 3 nonzero estimates, got {len(pts)}")

    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    se = np.array([p[3] for p in pts])
    if np.any(se <= 0):
        w = np.ones(len(pts))
    else:
        w = (np.array([p[2] for p in pts]) / se) ** 2

    coef, cov = np.polyfit(x, y, 1, w=np.sqrt(w), cov="unscaled")
    return ExponentFit(
        slope=float(coef[0]),
        intercept=float(coef[1]),
        slope_stderr=float(math.sqrt(max(cov[0, 0], 0.0))),
        points=[(float(a), float(b), float(c)) for a, b, c in zip(x, y, w)],
        mode=mode,
        label=label,
    )
