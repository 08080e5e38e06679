# lattice/loops.py

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .geometry import STEPS, Domain, LatticePoint


def least_rotation(seq: Sequence) -> int:
    """
    Start offset of the lexicographically least rotation (Booth's algorithm, O(L)).
    Items only need to be comparable.
    """
    s = list(seq) * 2
    f = [-1] * len(s)
    k = 0
    for j in range(1, len(s)):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k % len(seq) if seq else 0


def smallest_period(seq: Sequence) -> int:
    """Smallest p dividing len(seq) with seq invariant under rotation by p."""
    n = len(seq)
    if n == 0:
        return 0
    pi = [0] * n
    for i in range(1, n):
        j = pi[i - 1]
        while j and seq[i] != seq[j]:
            j = pi[j - 1]
        if seq[i] == seq[j]:
            j += 1
        pi[i] = j
    p = n - pi[-1]
    return p if n % p == 0 else n


@dataclass(frozen=True)
class Loop:
    """Oriented unrooted lattice loop, stored as its least rotation."""

    sites: tuple

    def __len__(self) -> int:
        return len(self.sites)

    @property
    def length(self) -> int:
        return len(self.sites)

    @cached_property
    def multiplicity(self) -> int:
        return len(self.sites) // smallest_period(self.sites)

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.sites)

    def rotations(self) -> list:
        s = self.sites
        return [s[i:] + s[:i] for i in range(len(s))]

    def reversed(self) -> "Loop":
        return canonicalize_loop(self.sites[::-1])

    def to_text(self) -> str:
        return " ".join(f"{x},{y}" for x, y in self.sites)


def _check_walk(sites: list) -> list:
    if len(sites) >= 3 and sites[0] == sites[-1]:
        sites = sites[:-1]
    if len(sites) < 2:
        raise ValueError(f"loops need length >= 2, got {len(sites)} sites")
    for a, b in zip(sites[:-1], sites[1:]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise ValueError(f"non-adjacent consecutive sites {tuple(a)} -> {tuple(b)}")
    a, b = sites[-1], sites[0]
    if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
        raise ValueError(f"open walk: last site {tuple(a)} does not step back to {tuple(b)}")
    return sites


def canonicalize_loop(sites: Sequence) -> Loop:
    """
    Accepts the cyclic site sequence, with or without the first site repeated at the end.
    Orientation is kept: a loop and its reversal stay distinct.
    """
    pts = _check_walk([LatticePoint(int(p[0]), int(p[1])) for p in sites])
    k = least_rotation(pts)
    return Loop(tuple(pts[k:] + pts[:k]))


def canonical_from_indices(domain: Domain, cycle: Sequence[int]) -> Loop:
    # index order is lexicographic point order, so rotate on the integers
    idx = list(cycle)
    k = least_rotation(idx)
    pts = domain.points
    return Loop(tuple(pts[i] for i in idx[k:] + idx[:k]))


def loop_nu_mass(loop: Loop) -> float:
    """nu(γ) = 4^{-|γ|} / m_γ"""
    return 0.25 ** loop.length / loop.multiplicity


def parse_loop(text: str) -> Loop:
    pts = []
    for tok in text.split():
        x, y = tok.split(",")
        pts.append((int(x), int(y)))
    return canonicalize_loop(pts)


def enumerate_loops(domain: Domain, max_length: int) -> dict:
    """
    Every loop of length 2..max_length confined to the domain interior, with its nu mass.
    Exhaustive; only meant for small domains and short lengths.
    """
    interior = set(domain.points[i] for i in domain.interior)
    found: dict = {}

    def extend(path: list):
        last = path[-1]
        for dx, dy in STEPS:
            nxt = LatticePoint(last.x + dx, last.y + dy)
            if nxt not in interior:
                continue
            if nxt == path[0] and len(path) >= 2:
                loop = canonicalize_loop(path)
                if loop not in found:
                    found[loop] = loop_nu_mass(loop)
            if len(path) < max_length:
                extend(path + [nxt])

    for root in sorted(interior):
        extend([root])
    return found
