# experiments/oracles.py

"""Brute-force reference computations for small instances."""

from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from lattice import Domain, enumerate_loops


def discretized_bridge_hit_rate(a: float, b: float, m: int, replicas: int, rng, batch: int = 4096) -> float:
    """
    Fraction of Brownian bridges a -> b on [0, 1], sampled at m + 1 grid
    points, that reach 0 at a grid point. Undercounts the continuum value,
    increasingly less as m grows.
    """
    if a * b <= 0:
        return 1.0
    t = np.linspace(0.0, 1.0, m + 1)[1:]
    hits = 0
    done = 0
    while done < replicas:
        size = min(batch, replicas - done)
        w = np.cumsum(rng.standard_normal((size, m)) / np.sqrt(m), axis=1)
        path = a + w + t * ((b - a) - w[:, -1:])
        if a > 0:
            hits += int(np.count_nonzero(path.min(axis=1) <= 0))
        else:
            hits += int(np.count_nonzero(path.max(axis=1) >= 0))
        done += size
    return hits / replicas


def _walk_matrix(domain: Domain) -> sp.csr_matrix:
    """One step of the simple walk; mass stepping off the domain is dropped."""
    return (domain.adjacency * 0.25).tocsr()


def markov_absorption(domain: Domain, killed_mask: np.ndarray, u, steps: int = 500) -> np.ndarray:
    """Power iteration of the walk from u with killed vertices absorbing; absorbed mass per vertex."""
    P = _walk_matrix(domain).T.tocsr()
    dist = np.zeros(len(domain))
    dist[domain.index_of(u)] = 1.0
    absorbed = np.zeros(len(domain))
    for _ in range(steps):
        dist = P @ dist
        absorbed += np.where(killed_mask, dist, 0.0)
        dist = np.where(killed_mask, 0.0, dist)
        if dist.sum() < 1e-16:
            break
    return absorbed


def no_return_probability(domain: Domain, killed_mask: np.ndarray, x, steps: int = 5000) -> float:
    """P^x[killed before returning to x]."""
    P = _walk_matrix(domain).T.tocsr()
    i = domain.index_of(x)
    start = np.zeros(len(domain))
    start[i] = 1.0
    dist = P @ start
    returned = 0.0
    for _ in range(steps):
        returned += dist[i]
        dist = np.where(killed_mask, 0.0, dist)
        dist[i] = 0.0
        if dist.sum() < 1e-16:
            break
        dist = P @ dist
    return 1.0 - returned


def enumeration_masses(domain: Domain, max_length: int) -> dict:
    return enumerate_loops(domain, max_length)


def plaquette_mass(domain: Domain) -> float:
    """Total ν mass of the oriented plaquette loops inside the interior."""
    return sum(mass for loop, mass in enumerate_loops(domain, 4).items() if loop.length == 4 and len(loop.vertex_set) == 4)


def brute_force_clusters(vertex_sets: Iterable) -> list:
    """Transitive closure over overlapping vertex sets, as sorted frozensets."""
    groups = [set(s) for s in vertex_sets if s]
    out = []
    while groups:
        g = groups.pop()
        changed = True
        while changed:
            changed = False
            rest = []
            for h in groups:
                if g & h:
                    g |= h
                    changed = True
                else:
                    rest.append(h)
            groups = rest
        out.append(frozenset(g))
    return sorted(out, key=min)


def flood_fill_sign_clusters(sample) -> list:
    """BFS over nonzero vertices and open edges; clusters as sorted index frozensets."""
    d = sample.domain
    values = sample.field.values
    nbrs = {i: [] for i in range(len(d))}
    for (a, b), ok in zip(d.edges, sample.edge_open):
        if ok:
            nbrs[int(a)].append(int(b))
            nbrs[int(b)].append(int(a))
    seen = set()
    out = []
    for s in range(len(d)):
        if values[s] == 0 or s in seen:
            continue
        comp = {s}
        queue = deque([s])
        seen.add(s)
        while queue:
            v = queue.popleft()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        out.append(frozenset(comp))
    return sorted(out, key=min)


def complement_flood_fill_hull(points: Iterable, ambient: Domain) -> frozenset:
    """Ambient vertices not reachable from exposed ones while avoiding the set, plus the set."""
    inside = set(tuple(p) for p in points)
    pts = set(ambient.points)
    start = [p for i, p in enumerate(ambient.points) if ambient.exposed_mask[i] and p not in inside]
    reach = set(start)
    queue = deque(start)
    while queue:
        x, y = queue.popleft()
        for q in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if q in pts and q not in inside and q not in reach:
                reach.add(q)
                queue.append(q)
    return frozenset(p for p in ambient.points if p not in reach)
