from fractions import Fraction
from random import Random

import pytest

from tropeci.cones import Cone, full_space
from tropeci.fans import (
    NotBalanced,
    WeightedFan,
    fans_equal,
    is_balanced,
)
from tropeci.oracles import mixed_volume_ie, polygon_curve_rays, random_lattice_polytope
from tropeci.plfunc import (
    NotADivisor,
    NotConvex,
    PLFunction,
    corner_locus,
    iterated_corner_locus,
    pl_from_polytope,
    pullback_linear,
    reconstruct_polytope,
)
from tropeci.polytopes import LatticePolytope

TRIANGLE = LatticePolytope([(0, 0), (1, 0), (0, 1)])
SQUARE = LatticePolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
AMBIENT2 = WeightedFan(2, [(full_space(2), 1)])


def ray_fan(pairs, ambient=2):
    return WeightedFan(ambient, [(Cone(ambient, rays=[r]), w) for r, w in pairs])


def test_support_function_values():
    m = pl_from_polytope(SQUARE)
    assert m.value((3, 4)) == 7
    assert m.value((-2, 5)) == 5
    assert m.value((-1, -1)) == 0
    assert m.check_continuity()


def test_corner_locus_of_triangle_support():
    d = corner_locus(pl_from_polytope(TRIANGLE), AMBIENT2)
    expected = ray_fan([((1, 1), 1), ((-1, 0), 1), ((0, -1), 1)])
    assert fans_equal(d, expected)


def test_corner_locus_weight_scales_with_edge_length():
    seg = LatticePolytope([(0, 0), (2, 0)])
    d = corner_locus(pl_from_polytope(seg), AMBIENT2)
    wall = Cone(2, rays=[(0, 1)], lineality=[(0, 1)])
    line = Cone(2, rays=[], lineality=[(0, 1)])
    assert fans_equal(d, WeightedFan(2, [(line, 2)]))


def test_corner_locus_of_linear_function_vanishes():
    m = PLFunction(2, [(full_space(2), (3, -2))])
    assert corner_locus(m, AMBIENT2).is_zero()


def test_corner_locus_matches_edge_oracle():
    rng = Random(23)
    for _ in range(8):
        p = random_lattice_polytope(rng, 2, 5)
        d = corner_locus(pl_from_polytope(p), AMBIENT2)
        expected = ray_fan(polygon_curve_rays(p))
        assert fans_equal(d, expected)
        assert is_balanced(d, check_fan=False)


def test_corner_locus_requires_balanced_cycle():
    lop = ray_fan([((1, 0), 1)])
    with pytest.raises(NotBalanced):
        corner_locus(pl_from_polytope(SQUARE), lop)


def test_iterated_corner_locus_degree_is_mixed_volume():
    rng = Random(31)
    for _ in range(6):
        p = random_lattice_polytope(rng, 2, 5)
        q = random_lattice_polytope(rng, 2, 5)
        cycle = iterated_corner_locus(
            [pl_from_polytope(p), pl_from_polytope(q)], AMBIENT2)
        assert cycle.weight_of_point((0, 0)) == mixed_volume_ie([p, q])


def test_iterated_corner_locus_empty_list():
    assert iterated_corner_locus([], AMBIENT2) is AMBIENT2


def test_reconstruct_triangle_from_line():
    d = ray_fan([((1, 1), 1), ((-1, 0), 1), ((0, -1), 1)])
    assert reconstruct_polytope(d) == TRIANGLE


def test_reconstruct_segment_from_point():
    d = WeightedFan(1, [(Cone(1, rays=[], lineality=[]), 3)])
    assert reconstruct_polytope(d) == LatticePolytope([(0,), (3,)])


def test_reconstruct_roundtrip_random_polygons():
    rng = Random(41)
    for _ in range(8):
        p = random_lattice_polytope(rng, 2, 5).normalize_translation()
        d = corner_locus(pl_from_polytope(p), AMBIENT2)
        assert reconstruct_polytope(d) == p


def test_reconstruct_rejects_unbalanced():
    with pytest.raises(NotADivisor):
        reconstruct_polytope(ray_fan([((1, 0), 1)]))


def test_reconstruct_rejects_concave_jumps():
    d = corner_locus(pl_from_polytope(TRIANGLE), AMBIENT2)
    with pytest.raises(NotConvex):
        reconstruct_polytope(d.scale(-1))


def test_reconstruct_parallel_walls():
    # two opposite parallel rays: the facet extensions must separate them
    seg = LatticePolytope([(0, 0), (1, 0)])
    up = LatticePolytope([(0, 0), (0, 1)])
    both = seg.minkowski_sum(up)
    d = corner_locus(pl_from_polytope(both), AMBIENT2)
    assert reconstruct_polytope(d) == both


def test_reconstruct_empty_divisor_is_point():
    d = WeightedFan(2, [], dim=1)
    assert reconstruct_polytope(d) == LatticePolytope([(0, 0)])


def test_pullback_along_diagonal():
    m = pl_from_polytope(SQUARE)
    pb = pullback_linear(m, [[1], [1]])
    assert pb.value((1,)) == 2
    assert pb.value((-1,)) == 0
    d = corner_locus(pb, WeightedFan(1, [(full_space(1), 1)]))
    assert d.weight_of_point((0,)) == 2


def test_pullback_into_wall_keeps_continuity():
    m = pl_from_polytope(SQUARE)
    # embed the t-axis along the wall between the two upper cells
    pb = pullback_linear(m, [[0], [1]])
    assert pb.value((2,)) == 2
    assert pb.value((-3,)) == 0
