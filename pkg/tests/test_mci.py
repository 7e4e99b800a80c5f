"""Matroid thresholds, TCI chains, and generalized BKK numbers."""

from itertools import combinations
from random import Random

import pytest

from tropeci.fans import WeightedFan
from tropeci.linalg import dot
from tropeci.mci import (
    MCI,
    Matroid,
    NotABasis,
    NotZeroDimensional,
    RankDeficient,
    SupportMultiset,
    TCI,
    UnknownElement,
    bkk_number,
    chirotope,
    classical_mci,
    tci_from_mci,
    tci_threshold,
)
from tropeci.oracles import random_lattice_polytope
from tropeci.polytopes import LatticePolytope, mixed_volume_ie


def hexagon_mci():
    pts = [("r1", (0, 0)), ("r2", (1, 0)), ("g1", (2, 1)),
           ("g2", (2, 2)), ("b1", (0, 1)), ("b2", (1, 2))]
    cols = {"r1": (1, 1), "r2": (1, 1), "g1": (1, 2),
            "g2": (1, 2), "b1": (1, 3), "b2": (1, 3)}
    return MCI(SupportMultiset(pts), Matroid.from_matrix(cols), 2)


def threshold_bruteforce(matroid, support, k, l):
    """Largest level m with rank{a : l(a) ≥ m} ≥ k, by direct descent."""
    for m in sorted({dot(l, p) for _, p in support.points}, reverse=True):
        ids = [i for i, p in support.points if dot(l, p) >= m]
        if matroid.rank(ids) >= k:
            return m
    raise RankDeficient(k)


def threshold_by_subsets(matroid, support, k, l):
    """Max over independent k-subsets of the worst value (direct search)."""
    best = None
    for sub in combinations(support.ids(), k):
        if matroid.rank(sub) < k:
            continue
        worst = min(dot(l, support.point(i)) for i in sub)
        best = worst if best is None else max(best, worst)
    if best is None:
        raise RankDeficient(k)
    return best


# -- matroid basics -----------------------------------------------------------


def test_rank_matrix_oracle():
    m = Matroid.from_matrix({"a": (1, 1), "b": (1, 1), "c": (1, 2)})
    assert m.rank([]) == 0
    assert m.rank(["a", "b"]) == 1
    assert m.rank(["a", "c"]) == 2
    with pytest.raises(UnknownElement):
        m.rank(["a", "zzz"])


def test_rank_one_per_binomial_is_two():
    m = hexagon_mci().matroid
    assert m.rank(["r1", "g1", "b1"]) == 2
    assert m.rank(["r1", "g2"]) == 2
    assert m.rank(["g1", "g2"]) == 1


def test_rank_table_roundtrip_and_validation():
    ground = ["a", "b", "c"]
    u23 = {}
    for r in range(4):
        for s in combinations(ground, r):
            u23[frozenset(s)] = min(len(s), 2)
    m = Matroid.from_rank_table(ground, u23)
    assert m.rank(["a", "b", "c"]) == 2

    bad = dict(u23)
    bad[frozenset(["a", "b"])] = 3  # jumps by 2 over {a}
    with pytest.raises(ValueError):
        Matroid.from_rank_table(ground, bad)

    nonsub = {frozenset(): 0}
    for s in [("a",), ("b",), ("c",)]:
        nonsub[frozenset(s)] = 1
    for s in [("a", "b"), ("a", "c"), ("b", "c")]:
        nonsub[frozenset(s)] = 1
    nonsub[frozenset(["a", "b", "c"])] = 2
    with pytest.raises(ValueError):
        Matroid.from_rank_table(ground, nonsub)

    with pytest.raises(ValueError):
        Matroid.from_rank_table(ground, {frozenset(): 1})


def test_truncation():
    cols = {"a": (1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1), "d": (1, 1, 1)}
    m = Matroid.from_matrix(cols)
    assert m.truncate(5).rank(cols.keys()) == 3
    t0 = m.truncate(0)
    assert all(t0.rank([i]) == 0 for i in cols)
    t2 = m.truncate(2)
    for pair in combinations(cols, 2):
        assert t2.rank(pair) == 2
    for triple in combinations(cols, 3):
        assert t2.rank(triple) == 2


def test_chirotope_signs():
    cols = {"a": (1, 0), "b": (0, 1), "c": (2, 0)}
    assert chirotope(cols, ["a", "b"]) == 1
    assert chirotope(cols, ["b", "a"]) == -1
    assert chirotope(cols, ["a", "c"]) == 0
    with pytest.raises(NotABasis):
        chirotope(cols, ["a"])
    with pytest.raises(UnknownElement):
        chirotope(cols, ["a", "zzz"])


# -- thresholds ---------------------------------------------------------------


def test_threshold_k1_is_support_maximum():
    mci = hexagon_mci()
    for l in [(1, 0), (0, -1), (2, 3), (-1, -1)]:
        expected = max(dot(l, p) for _, p in mci.support.points)
        assert tci_threshold(mci.matroid, mci.support, 1, l) == expected


def test_threshold_keeps_top_value_on_mixed_edges():
    # normal to an edge whose maximizers span rank 2: no drop
    mci = hexagon_mci()
    assert tci_threshold(mci.matroid, mci.support, 2, (1, -1)) == 1
    assert tci_threshold(mci.matroid, mci.support, 1, (1, -1)) == 1


def test_threshold_drops_on_rank_one_edges():
    # normals to the edges carried by a single column direction
    mci = hexagon_mci()
    cases = {(0, -1): (0, -1), (1, 0): (2, 1), (-1, 1): (1, 0)}
    for l, (m1, m2) in cases.items():
        assert tci_threshold(mci.matroid, mci.support, 1, l) == m1
        assert tci_threshold(mci.matroid, mci.support, 2, l) == m2


def test_threshold_rank_deficient():
    mci = hexagon_mci()
    with pytest.raises(RankDeficient):
        tci_threshold(mci.matroid, mci.support, 3, (1, 0))


def test_threshold_agrees_with_sublevel_and_subset_oracles():
    rng = Random(404)
    for _ in range(12):
        npts = rng.randint(3, 6)
        pts = [(f"p{j}", (rng.randint(-3, 3), rng.randint(-3, 3)))
               for j in range(npts)]
        cols = {f"p{j}": (rng.randint(-2, 2), rng.randint(-2, 2))
                for j in range(npts)}
        matroid = Matroid.from_matrix(cols)
        support = SupportMultiset(pts)
        l = (rng.randint(-4, 4), rng.randint(-4, 4))
        for k in (1, 2):
            if matroid.rank(support.ids()) < k:
                continue
            got = tci_threshold(matroid, support, k, l)
            assert got == threshold_bruteforce(matroid, support, k, l)
            assert got == threshold_by_subsets(matroid, support, k, l)


# -- the chain ----------------------------------------------------------------


def test_hexagon_chain_frozen():
    tci = tci_from_mci(hexagon_mci())
    assert tci.collapsed_at is None
    t1 = tci.fans[1]
    rays = sorted(c.rays[0] for c, _ in t1.cones)
    assert rays == sorted([(0, -1), (1, -1), (1, 0), (0, 1), (-1, 0), (-1, 1)])
    assert all(w == 1 for _, w in t1.cones)
    m2 = tci.functions[1]
    values = {(1, -1): 1, (0, 1): 2, (-1, 0): 0,
              (0, -1): -1, (1, 0): 1, (-1, 1): 0}
    for r, v in values.items():
        assert m2.value(r) == v
    assert bkk_number(tci) == 3


def test_chain_invariants_recheck():
    tci = tci_from_mci(hexagon_mci())
    assert tci.check()
    # thresholds are continuous and nested on the supporting fans
    for m in tci.functions:
        assert m.check_continuity()
    m1, m2 = tci.functions
    for cone, _ in tci.fans[1].cones:
        x = cone.relint_point()
        assert m2.value(x) <= m1.value(x)


def test_loops_are_dropped():
    pts = [("r1", (0, 0)), ("r2", (1, 0)), ("g1", (2, 1)), ("g2", (2, 2)),
           ("b1", (0, 1)), ("b2", (1, 2)), ("z", (5, 5))]
    cols = {"r1": (1, 1), "r2": (1, 1), "g1": (1, 2), "g2": (1, 2),
            "b1": (1, 3), "b2": (1, 3), "z": (0, 0)}
    mci = MCI(SupportMultiset(pts), Matroid.from_matrix(cols), 2)
    assert mci.loops == ["z"]
    assert len(mci.support) == 6
    assert bkk_number(tci_from_mci(mci)) == 3


def test_repeated_single_point_collapses():
    pts = [("p1", (1, 1)), ("p2", (1, 1))]
    cols = {"p1": (1, 0), "p2": (0, 1)}
    mci = MCI(SupportMultiset(pts), Matroid.from_matrix(cols), 2)
    tci = tci_from_mci(mci)
    assert tci.collapsed_at == 1
    assert bkk_number(tci) == 0


def test_codim_mismatch_raises():
    mci = hexagon_mci()
    short = MCI(mci.support, mci.matroid, 1)
    with pytest.raises(NotZeroDimensional):
        bkk_number(tci_from_mci(short))


def test_rank_deficient_mci():
    pts = [("a", (0, 0)), ("b", (1, 0))]
    cols = {"a": (1, 1), "b": (1, 1)}
    with pytest.raises(RankDeficient):
        MCI(SupportMultiset(pts), Matroid.from_matrix(cols), 2)


def test_determinism():
    a = tci_from_mci(hexagon_mci())
    b = tci_from_mci(hexagon_mci())
    for fa, fb in zip(a.fans, b.fans):
        assert [c.key() for c, _ in fa.cones] == [c.key() for c, _ in fb.cones]
    for ma, mb in zip(a.functions, b.functions):
        assert [(c.key(), l) for c, l in ma.cells] == \
            [(c.key(), l) for c, l in mb.cells]


# -- classical consistency ----------------------------------------------------


def test_classical_two_segments():
    mci = classical_mci([[(0, 0), (1, 0)], [(0, 0), (0, 1)]])
    assert bkk_number(tci_from_mci(mci)) == 1


def test_classical_squares_and_triangles():
    square = [(0, 0), (1, 0), (0, 1), (1, 1)]
    tri = [(0, 0), (1, 0), (0, 1)]
    cases = [([square, square], 2), ([square, tri], 2), ([tri, tri], 1)]
    for supports, expected in cases:
        assert bkk_number(tci_from_mci(classical_mci(supports))) == expected
        polys = [LatticePolytope(s) for s in supports]
        assert mixed_volume_ie(polys) == expected


def test_classical_matches_mixed_volume_randomly():
    rng = Random(77)
    done = 0
    while done < 6:
        ps = [random_lattice_polytope(rng, 2, rng.randint(3, 4), box=2)
              for _ in range(2)]
        supports = [p.vertices for p in ps]
        mci = classical_mci(supports)
        if mci.matroid.rank(mci.support.ids()) < 2:
            continue
        done += 1
        assert bkk_number(tci_from_mci(mci)) == mixed_volume_ie(list(ps))


def test_classical_three_dimensional():
    segs = [[(0, 0, 0), (1, 0, 0)], [(0, 0, 0), (0, 1, 0)],
            [(0, 0, 0), (0, 0, 1)]]
    assert bkk_number(tci_from_mci(classical_mci(segs))) == 1
    cube = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    mci = classical_mci([cube, segs[0] + segs[1], segs[2]])
    expected = mixed_volume_ie([LatticePolytope(cube),
                                LatticePolytope(segs[0] + segs[1]),
                                LatticePolytope(segs[2])])
    assert bkk_number(tci_from_mci(mci)) == expected


def test_bkk_nonnegative_on_random_matrix_mcis():
    rng = Random(909)
    done = 0
    while done < 6:
        npts = rng.randint(3, 6)
        pts = [(f"p{j}", (rng.randint(-2, 2), rng.randint(-2, 2)))
               for j in range(npts)]
        cols = {f"p{j}": (rng.randint(-2, 2), rng.randint(-2, 2))
                for j in range(npts)}
        matroid = Matroid.from_matrix(cols)
        support = SupportMultiset(pts)
        nonloops = [i for i in support.ids() if matroid.rank([i]) == 1]
        if matroid.rank(nonloops) < 2 or not nonloops:
            continue
        done += 1
        mci = MCI(support, matroid, 2)
        assert bkk_number(tci_from_mci(mci)) >= 0
