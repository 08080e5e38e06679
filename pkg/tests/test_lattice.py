"""
Domains and loop canonicalization.

    - box / halfplane / annulus vertex, edge and boundary counts
    - radius validation and descriptor parsing
    - least rotation is rotation invariant, orientation is kept
    - multiplicity times distinct rotations equals the length
    - nu masses of the small loops
"""

import itertools

import numpy as np
import pytest
from pytest import approx

from lattice import (
    LatticePoint,
    build_domain,
    canonical_from_indices,
    canonicalize_loop,
    custom_domain,
    enumerate_loops,
    loop_nu_mass,
    nearest_axis_point,
    parse_descriptor,
    parse_loop,
    segment,
)


# -- Helpers -----------------------------------------------------------------

PLAQUETTE = [(0, 0), (1, 0), (1, 1), (0, 1)]


def _back_and_forth(points):
    """Closed walk along a path and back: p0 .. pL .. p1."""
    pts = list(points)
    return pts + pts[-2:0:-1]


def _random_closed_walk(rng, length):
    half = length // 2
    path = [(0, 0)]
    for _ in range(half):
        dx, dy = [(1, 0), (0, 1), (-1, 0), (0, -1)][rng.integers(4)]
        x, y = path[-1]
        path.append((x + dx, y + dy))
    return _back_and_forth(path)


# -- Domains -----------------------------------------------------------------

def test_box2_counts():
    d = build_domain("box", 2)
    assert len(d) == 25
    assert len(d.edges) == 40
    assert int(d.boundary_mask.sum()) == 16
    assert len(d.interior) == 9


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 16])
def test_box_counts_general(n):
    d = build_domain("box", n)
    assert len(d) == (2 * n + 1) ** 2
    assert len(d.edges) == 4 * n * (2 * n + 1)
    assert int(d.boundary_mask.sum()) == 8 * n


def test_box0_is_a_single_boundary_vertex():
    d = build_domain("box", 0)
    assert len(d) == 1
    assert d.edges.shape == (0, 2)
    assert len(d.interior) == 0


def test_halfplane_box3():
    d = build_domain("halfplane", 3)
    assert len(d) == 28
    bottom = [p for p in d.points if p.y == 0]
    assert len(bottom) == 7
    assert all(d.is_boundary(p) for p in bottom)
    # rest of the boundary: x = ±3 for y = 1..3 and y = 3 for |x| <= 2
    assert int(d.boundary_mask.sum()) == 7 + 6 + 5
    assert not d.is_boundary((0, 1))


def test_annulus_boundary_is_both_squares():
    d = build_domain("annulus", 2, 4)
    assert all(2 <= p.norm() <= 4 for p in d.points)
    assert d.boundary == frozenset(p for p in d.points if p.norm() in (2, 4))


@pytest.mark.parametrize(
    "kind,params",
    [("box", (-1,)), ("box", (1.5,)), ("halfplane", (0,)), ("annulus", (4, 4)), ("annulus", (5, 3)), ("box", (1, 2))],
)
def test_bad_radii_rejected(kind, params):
    with pytest.raises(ValueError):
        build_domain(kind, *params)


def test_descriptor_round_trip():
    for text in ["box 6", "halfplane 4", "annulus 2 5"]:
        assert parse_descriptor(text).descriptor == text
    with pytest.raises(ValueError):
        parse_descriptor("")
    with pytest.raises(ValueError):
        custom_domain([(0, 0)]).descriptor


def test_custom_domain_boundary_must_be_inside():
    with pytest.raises(ValueError):
        custom_domain([(0, 0), (1, 0)], boundary=[(2, 0)])
    with pytest.raises(ValueError):
        custom_domain([])


def test_neighbors_and_exposed():
    d = build_domain("box", 2)
    o = d.index_of((0, 0))
    assert sorted(d.points[j] for j in d.neighbors[o]) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    corner = d.index_of((2, 2))
    assert (d.neighbors[corner] < 0).sum() == 2
    assert np.array_equal(d.exposed_mask, d.boundary_mask)
    with pytest.raises(ValueError):
        d.index_of((3, 0))


def test_segment_and_axis_point():
    assert len(segment(8)) == 25
    assert segment(1) == [LatticePoint(-1, 0), LatticePoint(0, 0), LatticePoint(1, 0)]
    assert nearest_axis_point(1.5 * 33) == (0, 49)
    assert nearest_axis_point(1.5 * 32) == (0, 48)


# -- Loops -------------------------------------------------------------------

def test_edge_loop():
    lp = canonicalize_loop([(0, 0), (1, 0)])
    assert lp.sites == ((0, 0), (1, 0))
    assert lp.multiplicity == 1
    assert loop_nu_mass(lp) == approx(1 / 16)


def test_double_edge_loop():
    lp = canonicalize_loop([(1, 0), (0, 0), (1, 0), (0, 0)])
    assert lp.sites == ((0, 0), (1, 0), (0, 0), (1, 0))
    assert lp.multiplicity == 2
    assert loop_nu_mass(lp) == approx(1 / 512)


def test_plaquette_orientation_kept():
    lp = canonicalize_loop(PLAQUETTE)
    assert loop_nu_mass(lp) == approx(1 / 256)
    for i in range(4):
        assert canonicalize_loop(PLAQUETTE[i:] + PLAQUETTE[:i]) == lp
    rev = canonicalize_loop(PLAQUETTE[::-1])
    assert rev != lp
    assert rev == lp.reversed()


def test_closing_site_repeated_is_accepted():
    assert canonicalize_loop(PLAQUETTE + [PLAQUETTE[0]]) == canonicalize_loop(PLAQUETTE)


@pytest.mark.parametrize(
    "sites",
    [[(0, 0)], [], [(0, 0), (2, 0)], [(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 1)]],
)
def test_invalid_walks_rejected(sites):
    with pytest.raises(ValueError):
        canonicalize_loop(sites)


def test_canonical_form_is_rotation_invariant():
    rng = np.random.default_rng(11)
    walks = [_random_closed_walk(rng, L) for L in (2, 4, 6, 8, 10, 12) for _ in range(20)]
    walks += [PLAQUETTE * 3, [(0, 0), (1, 0)] * 6]
    for w in walks:
        lp = canonicalize_loop(w)
        for i in range(len(w)):
            assert canonicalize_loop(w[i:] + w[:i]) == lp


def test_multiplicity_times_rotations_is_length():
    rng = np.random.default_rng(12)
    walks = [_random_closed_walk(rng, L) for L in (2, 4, 6, 8, 10, 12) for _ in range(20)]
    walks += [PLAQUETTE * 2, PLAQUETTE * 3, [(0, 0), (1, 0)] * 6, [(0, 0), (1, 0), (0, 0), (0, 1)] * 3]
    for w in walks:
        lp = canonicalize_loop(w)
        assert lp.multiplicity * len(set(lp.rotations())) == lp.length


def test_index_canonical_form_matches_point_form():
    d = build_domain("box", 3)
    rng = np.random.default_rng(13)
    for L in (2, 4, 6, 8):
        for _ in range(10):
            w = _random_closed_walk(rng, L)
            if max(max(abs(x), abs(y)) for x, y in w) > 3:
                continue
            cycle = [d.index_of(p) for p in w]
            assert canonical_from_indices(d, cycle) == canonicalize_loop(w)


def test_text_round_trip():
    lp = canonicalize_loop([(2, -1), (2, 0), (1, 0), (1, -1)])
    assert parse_loop(lp.to_text()) == lp


# -- Enumeration -------------------------------------------------------------

def test_enumeration_two_vertices():
    d = custom_domain([(0, 0), (1, 0)])
    loops = enumerate_loops(d, 4)
    assert len(loops) == 2
    assert sorted(loops.values()) == [approx(1 / 512), approx(1 / 16)]


def test_enumeration_rooted_measure():
    # ν(γ) equals the sum of 4^{-L}/L over the distinct rooted representatives
    d = build_domain("box", 2)
    for lp, mass in enumerate_loops(d, 6).items():
        rooted = len(set(lp.rotations())) * 0.25 ** lp.length / lp.length
        assert mass == approx(rooted, rel=1e-12)


def test_enumeration_stays_in_interior():
    d = build_domain("box", 2)
    interior = {d.points[i] for i in d.interior}
    loops = enumerate_loops(d, 4)
    assert all(lp.vertex_set <= interior for lp in loops)
    plaquettes = [lp for lp in loops if lp.length == 4 and len(lp.vertex_set) == 4]
    assert len(plaquettes) == 8
    edges = [lp for lp in loops if lp.length == 2]
    assert len(edges) == 12
    assert set(itertools.chain.from_iterable(lp.sites for lp in edges)) == interior
