# clusters/arms.py

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from lattice import Domain, build_domain

from .decompose import ClusterDecomposition
from .hull import hull_mask


class ArmKind(str, Enum):
    FOUR = "four"
    TWO_PLUS = "two-plus"


class Setting(str, Enum):
    METRIC = "metric"
    DISCRETE = "discrete"


def check_radii(k: int, n: int) -> None:
    if int(k) != k or int(n) != n:
        raise ValueError(f"radii must be integers, got k={k!r}, n={n!r}")
    if k < 1 or 2 * k > n:
        raise ValueError(f"need 1 <= k <= n/2, got k={k}, n={n}")


@dataclass(frozen=True)
class ArmEventKind:
    kind: ArmKind
    setting: Setting
    k: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ArmKind(self.kind))
        object.__setattr__(self, "setting", Setting(self.setting))
        check_radii(self.k, self.n)

    @property
    def label(self) -> str:
        return f"{self.kind.value}/{self.setting.value}/k={self.k}/n={self.n}"

    def domain(self) -> Domain:
        """Box(2n) for four arms, HalfPlaneBox(2n) for the half-plane two-arm event."""
        if self.kind == ArmKind.FOUR:
            return build_domain("box", 2 * self.n)
        return build_domain("halfplane", 2 * self.n)

    def occurs(self, decomp: ClusterDecomposition, outermost: bool = True) -> bool:
        if self.kind == ArmKind.FOUR:
            return four_arm_event(decomp, self.k, self.n, outermost=outermost)
        return two_arm_halfplane_event(decomp, self.k, self.n)


def count_crossing(decomp: ClusterDecomposition, k: int, n: int) -> int:
    return len(decomp.crossing(k, n))


def outermost_crossing(decomp: ClusterDecomposition, k: int, n: int) -> list:
    """
    Crossing clusters not inside the filled hull of another crossing cluster.
    Clusters are disjoint and connected, so one vertex decides containment.
    """
    ids = decomp.crossing(k, n)
    if len(ids) < 2:
        return ids
    hulls = {c: hull_mask(decomp.clusters[c].vertices, decomp.domain) for c in ids}
    keep = []
    for c in ids:
        rep = decomp.clusters[c].vertices[0]
        if not any(hulls[d][rep] for d in ids if d != c):
            keep.append(c)
    return keep


def count_outermost(decomp: ClusterDecomposition, k: int, n: int) -> int:
    return len(outermost_crossing(decomp, k, n))


def four_arm_event(decomp: ClusterDecomposition, k: int, n: int, outermost: bool = True) -> bool:
    """At least two crossing clusters of A_{k,n}; with outermost=True, two of them outermost."""
    check_radii(k, n)
    if count_crossing(decomp, k, n) < 2:
        return False
    if not outermost:
        return True
    return count_outermost(decomp, k, n) >= 2


def two_arm_halfplane_event(decomp: ClusterDecomposition, k: int, n: int) -> bool:
    check_radii(k, n)
    return any(c.crosses(k, n) for c in decomp.clusters)
