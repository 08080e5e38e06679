# rwls/soup.py

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from config import DEFAULT_ALPHA
from lattice import Domain, Loop, canonical_from_indices, parse_descriptor, parse_loop

from .laws import SoupLaws


@dataclass
class LoopSoupSample:
    loops: list
    alpha: float
    domain: Domain
    seed: Optional[int] = None
    # per-loop vertex indices in loop order, filled by the sampler
    index_loops: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.loops)

    @cached_property
    def vertex_index_sets(self) -> list:
        if self.index_loops and len(self.index_loops) == len(self.loops):
            return [np.unique(np.asarray(c, dtype=np.int64)) for c in self.index_loops]
        idx = self.domain.index
        return [np.unique(np.fromiter((idx[p] for p in lp.sites), dtype=np.int64)) for lp in self.loops]

    def with_loops(self, loops: list) -> "LoopSoupSample":
        return LoopSoupSample(loops=list(loops), alpha=self.alpha, domain=self.domain, seed=self.seed)

    def restricted_to(self, radius: int) -> "LoopSoupSample":
        """Loops staying inside B_radius."""
        keep = [lp for lp in self.loops if max(max(abs(x), abs(y)) for x, y in lp.sites) <= radius]
        return self.with_loops(keep)


def _as_rng(rng) -> tuple:
    if isinstance(rng, np.random.Generator):
        return rng, None
    return np.random.default_rng(rng), rng


def sample_rwls(laws: SoupLaws, alpha: float = DEFAULT_ALPHA, rng=None) -> LoopSoupSample:
    """
    Poisson(α · (-ln(1 - r_i))) loops rooted at each v_i; each loop glues j
    excursions with j from the logarithmic law P(j) = r^j / (j · (-ln(1 - r))).
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    rng, seed = _as_rng(rng)
    domain = laws.domain
    if not len(laws):
        return LoopSoupSample(loops=[], alpha=alpha, domain=domain, seed=seed)

    counts = rng.poisson(alpha * laws.masses)
    loops, index_loops = [], []
    for i in np.nonzero(counts)[0]:
        law = laws[int(i)]
        js = rng.logseries(law.return_prob, size=int(counts[i]))
        exc = law.excursion_sampler
        for j in js:
            cycle = []
            for _ in range(int(j)):
                cycle.extend(exc.sample(rng))
            index_loops.append(cycle)
            loops.append(canonical_from_indices(domain, cycle))
    return LoopSoupSample(loops=loops, alpha=alpha, domain=domain, seed=seed, index_loops=index_loops)


def occupation_array(sample: LoopSoupSample) -> np.ndarray:
    counts = np.zeros(len(sample.domain), dtype=np.int64)
    idx = sample.domain.index
    for lp in sample.loops:
        np.add.at(counts, [idx[p] for p in lp.sites], 1)
    return counts


def occupation_counts(sample: LoopSoupSample) -> dict:
    """Visits per vertex: occurrences in the cyclic site sequences of all loops."""
    counts = occupation_array(sample)
    return {p: int(c) for p, c in zip(sample.domain.points, counts)}


def shape_counts(sample: LoopSoupSample) -> dict:
    out: dict = {}
    for lp in sample.loops:
        out[lp] = out.get(lp, 0) + 1
    return out


# --- text export

def write_soup(sample: LoopSoupSample, path: str) -> None:
    """One loop per line as 'x,y x,y ...'; '#' header lines carry domain, alpha and seed."""
    d = sample.domain
    lines = [
        f"# domain {d.descriptor_or_kind()}",
        f"# alpha {sample.alpha!r}",
        f"# seed {'' if sample.seed is None else sample.seed}",
    ]
    lines.extend(lp.to_text() for lp in sample.loops)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_soup(path: str, domain: Optional[Domain] = None) -> LoopSoupSample:
    header = {}
    loops: list = []
    with open(path, "r", encoding="utf-8") as f:
        for raw in f:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(" ")
                header[key] = val.strip()
                continue
            loops.append(parse_loop(line))

    if domain is None:
        desc = header.get("domain", "")
        if not desc or desc == "custom":
            raise ValueError(f"{path}: custom-domain soups need the domain passed in")
        domain = parse_descriptor(desc)

    for lp in loops:
        bad = [p for p in lp.sites if not domain.contains(p)]
        if bad:
            raise ValueError(f"{path}: loop leaves {domain!r} at {tuple(bad[0])}")

    seed = header.get("seed") or None
    return LoopSoupSample(
        loops=loops,
        alpha=float(header.get("alpha", DEFAULT_ALPHA)),
        domain=domain,
        seed=None if seed is None else int(seed),
    )
