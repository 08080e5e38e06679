"""
Green's function, resistance and harmonic measure against hand values and
the power-iteration walk oracles.
"""

import numpy as np
import pytest
from pytest import approx

from experiments.oracles import markov_absorption, no_return_probability
from lattice import build_domain, custom_domain, segment
from potential import (
    PotentialSolver,
    constant_boundary,
    effective_resistance,
    green,
    harmonic_extension,
    harmonic_measure,
    indicator_boundary,
)


# -- Helpers -----------------------------------------------------------------

def _plus_domain():
    """Origin surrounded by its four killed neighbours."""
    nbrs = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    return custom_domain([(0, 0)] + nbrs, boundary=nbrs)


def _interior_points(domain):
    return [domain.points[i] for i in domain.interior]


# -- Hand values -------------------------------------------------------------

def test_single_vertex():
    s = PotentialSolver(_plus_domain())
    assert green(s, (0, 0), (0, 0)) == approx(0.25, abs=1e-12)
    assert effective_resistance(s, (0, 0)) == approx(0.25, abs=1e-12)
    for v in [(1, 0), (-1, 0), (0, 1), (0, -1)]:
        assert harmonic_measure(s, (0, 0), v) == approx(0.25, abs=1e-12)


@pytest.mark.parametrize("with_boundary", [True, False])
def test_two_vertex_chain(with_boundary):
    pts = [(0, 0), (1, 0)]
    ring = [(-1, 0), (0, 1), (0, -1), (2, 0), (1, 1), (1, -1)]
    d = custom_domain(pts + ring, boundary=ring) if with_boundary else custom_domain(pts)
    s = PotentialSolver(d)
    assert s.green((0, 0), (0, 0)) == approx(4 / 15, abs=1e-12)
    assert s.green((0, 0), (1, 0)) == approx(1 / 15, abs=1e-12)


def test_no_free_vertex_rejected():
    with pytest.raises(ValueError):
        PotentialSolver(build_domain("box", 0))


def test_killed_query_rejected():
    s = PotentialSolver(build_domain("box", 2))
    with pytest.raises(ValueError):
        s.green((2, 0), (0, 0))
    with pytest.raises(ValueError):
        s.harmonic_measure((0, 0), (1, 0))


# -- Symmetry and monotonicity -----------------------------------------------

def test_green_symmetric():
    d = build_domain("box", 6)
    s = PotentialSolver(d)
    pts = _interior_points(d)
    rng = np.random.default_rng(1)
    for _ in range(20):
        x, y = (pts[i] for i in rng.choice(len(pts), 2, replace=False))
        assert s.green(x, y) == approx(s.green(y, x), rel=1e-10)


def test_resistance_monotone_in_killing():
    d = build_domain("box", 8)
    base = PotentialSolver(d)
    x0 = (0, 0)
    r0 = base.effective_resistance(x0)
    pts = [p for p in _interior_points(d) if p != x0]
    rng = np.random.default_rng(2)
    for _ in range(20):
        big = [pts[i] for i in rng.choice(len(pts), 30, replace=False)]
        small = big[: rng.integers(1, 30)]
        r_small = base.with_killing(small).effective_resistance(x0)
        r_big = base.with_killing(big).effective_resistance(x0)
        assert r_big <= r_small + 1e-12
        assert r_small <= r0 + 1e-12


# -- Walk oracles ------------------------------------------------------------

def test_harmonic_measure_matches_absorption():
    d = build_domain("box", 4)
    s = PotentialSolver(d)
    u = (1, -2)
    absorbed = markov_absorption(d, s.killed_mask, u, steps=500)
    for i in np.nonzero(s.killed_mask)[0]:
        assert s.harmonic_measure(u, d.points[i]) == approx(absorbed[i], abs=1e-9)


def test_harmonic_measure_sums_to_one():
    rng = np.random.default_rng(3)
    for _ in range(50):
        d = build_domain("box", int(rng.integers(2, 8)))
        s = PotentialSolver(d)
        pts = _interior_points(d)
        u = pts[rng.integers(len(pts))]
        assert s.harmonic_measure_of(u, d.boundary) == approx(1.0, abs=1e-9)


def test_harmonic_measure_sum_per_site():
    d = build_domain("box", 3)
    s = PotentialSolver(d)
    total = sum(s.harmonic_measure((1, 1), v) for v in d.boundary)
    assert total == approx(1.0, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_green_diagonal_matches_escape(n):
    d = build_domain("box", n)
    s = PotentialSolver(d)
    for x in [(0, 0), (n - 1, 0), (1 - n, n - 1)]:
        esc = no_return_probability(d, s.killed_mask, x)
        assert s.green(x, x) == approx(1 / (4 * esc), rel=1e-8)


def test_halfplane_harmonic_measure_band():
    # Hm(x0, segment(k)) · n / k stays within a fixed factor over k and n
    ratios = []
    for n in (16, 32, 64):
        d = build_domain("halfplane", 2 * n)
        s = PotentialSolver(d)
        x0 = (0, (3 * n) // 4)
        for k in range(1, n // 2 + 1):
            ratios.append(s.harmonic_measure_of(x0, segment(k)) * n / k)
    assert max(ratios) / min(ratios) < 2.0


# -- Harmonic extension ------------------------------------------------------

def test_constant_extension():
    s = PotentialSolver(build_domain("box", 5))
    h = harmonic_extension(s, constant_boundary(s, 2.5))
    assert np.allclose(h.values, 2.5, atol=1e-10)


def test_indicator_extension_is_harmonic_measure():
    n = 8
    d = build_domain("halfplane", 2 * n)
    s = PotentialSolver(d)
    h = s.harmonic_extension(indicator_boundary(s, segment(2)))
    for x in [(0, 1), (3, 5), (0, 12), (-7, 2)]:
        assert h[x] == approx(s.harmonic_measure_of(x, segment(2)), abs=1e-10)
    assert h.values.min() >= -1e-12
    assert h.values.max() <= 1 + 1e-12


def test_extension_is_harmonic_inside():
    d = build_domain("box", 6)
    s = PotentialSolver(d)
    rng = np.random.default_rng(4)
    data = {p: float(rng.normal()) for p in d.boundary}
    h = s.harmonic_extension(data)
    lap = 4 * h.values - d.adjacency @ h.values
    assert np.allclose(lap[d.interior], 0.0, atol=1e-10)
    bnd = np.array(list(data.values()))
    assert h.values.max() <= bnd.max() + 1e-12
    assert h.values.min() >= bnd.min() - 1e-12


def test_extension_rejects_bad_data():
    s = PotentialSolver(build_domain("box", 3))
    data = constant_boundary(s, 0.0)
    data.pop(next(iter(data)))
    with pytest.raises(ValueError):
        s.harmonic_extension(data)
    with pytest.raises(ValueError):
        s.harmonic_extension({**constant_boundary(s, 0.0), (0, 0): 1.0})


def test_extra_killing_takes_boundary_data():
    d = build_domain("box", 4)
    s = PotentialSolver(d, killing=[(0, 0)])
    data = constant_boundary(s, 0.0)
    assert (0, 0) in data
    data[(0, 0)] = 1.0
    h = s.harmonic_extension(data)
    assert h[(0, 0)] == 1.0
    assert 0 < h[(1, 0)] < 1


def test_dump_green_column(tmp_path):
    s = PotentialSolver(build_domain("box", 3))
    path = tmp_path / "g.csv"
    s.dump_green_column((0, 0), str(path))
    text = path.read_text().splitlines()
    assert text[0] == "x,y,green"
    assert len(text) == 1 + s.size
