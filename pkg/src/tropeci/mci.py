"""Matroids over lattice multisets and the threshold construction.

The central algorithm turns a matroid on a finite lattice multiset into a
nested chain of weighted fans: refine covector space by all pair-difference
hyperplanes, run the matroid greedy selection once per chamber (it is
constant there), read off each step's piecewise-linear threshold function,
and fold it through the corner locus.  The weight of the final
zero-dimensional fan is the generalized BKK number.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .cones import Cone, full_space
from .fans import WeightedFan
from .linalg import det, dot, rank as mat_rank, vsub
from .plfunc import PLFunction, corner_locus


class UnknownElement(KeyError):
    pass


class RankDeficient(ValueError):
    pass


class NotZeroDimensional(ValueError):
    pass


class NotABasis(ValueError):
    pass


class SupportMultiset:
    """Lattice points indexed by distinct opaque ids; points may repeat."""

    __slots__ = ("points", "ambient", "_by_id")

    def __init__(self, points: Iterable):
        self.points = [(i, tuple(p)) for i, p in points]
        if not self.points:
            raise ValueError("support multiset must be nonempty")
        dims = {len(p) for _, p in self.points}
        if len(dims) != 1:
            raise ValueError("points of mixed dimension")
        self.ambient = dims.pop()
        self._by_id = {}
        for i, p in self.points:
            if i in self._by_id:
                raise ValueError(f"duplicate id {i!r}")
            self._by_id[i] = p

    def ids(self) -> list:
        return [i for i, _ in self.points]

    def point(self, i):
        if i not in self._by_id:
            raise UnknownElement(i)
        return self._by_id[i]

    def restrict(self, keep: Iterable) -> "SupportMultiset":
        keep = set(keep)
        return SupportMultiset([(i, p) for i, p in self.points if i in keep])

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return f"SupportMultiset({len(self.points)} points in Z^{self.ambient})"


class Matroid:
    """Matroid given by a column matrix or an explicit rank table."""

    __slots__ = ("ground", "_kind", "_columns", "_table", "_fn", "_cache")

    def __init__(self, ground: Sequence, kind: str, columns=None, table=None, fn=None):
        self.ground = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise ValueError("repeated ground ids")
        self._kind, self._columns, self._table, self._fn = kind, columns, table, fn
        self._cache = {}

    @classmethod
    def from_matrix(cls, columns: dict) -> "Matroid":
        cols = {i: tuple(c) for i, c in columns.items()}
        if len({len(c) for c in cols.values()}) > 1:
            raise ValueError("columns of mixed height")
        return cls(sorted(cols), "matrix", columns=cols)

    @classmethod
    def from_rank_table(cls, ground: Sequence, table: dict) -> "Matroid":
        ground = sorted(ground)
        tab = {frozenset(s): r for s, r in table.items()}
        m = cls(ground, "table", table=tab)
        m._validate_table()
        return m

    def _validate_table(self):
        tab, ground = self._table, list(self.ground)
        if frozenset() not in tab or tab[frozenset()] != 0:
            raise ValueError("rank of the empty set must be 0")
        if len(ground) <= 12:
            subsets = [frozenset(s) for r in range(len(ground) + 1)
                       for s in combinations(ground, r)]
            for s in subsets:
                if s not in tab:
                    raise ValueError(f"rank table misses {sorted(s)}")
            for s in subsets:
                for e in ground:
                    if e in s:
                        continue
                    step = tab[s | {e}] - tab[s]
                    if step not in (0, 1):
                        raise ValueError("rank must grow by 0 or 1")
                    for f in ground:
                        if f == e or f in s:
                            continue
                        if tab[s | {e}] + tab[s | {f}] < tab[s | {e, f}] + tab[s]:
                            raise ValueError("rank table is not submodular")
        else:
            for e in ground:
                if tab.get(frozenset([e]), 0) not in (0, 1):
                    raise ValueError("singleton rank out of range")

    def rank(self, subset: Iterable) -> int:
        key = frozenset(subset)
        for i in key:
            if i not in self.ground:
                raise UnknownElement(i)
        if key in self._cache:
            return self._cache[key]
        if self._kind == "matrix":
            r = mat_rank([self._columns[i] for i in key]) if key else 0
        elif self._kind == "table":
            if key not in self._table:
                raise ValueError(f"rank table misses {sorted(key)}")
            r = self._table[key]
        else:
            r = self._fn(key)
        self._cache[key] = r
        return r

    def truncate(self, k: int) -> "Matroid":
        if k < 0:
            raise ValueError("truncation rank must be nonnegative")
        return Matroid(self.ground, "derived",
                       fn=lambda s, self=self, k=k: min(self.rank(s), k))

    def __repr__(self):
        return f"Matroid({len(self.ground)} elements, kind={self._kind})"


def chirotope(columns: dict, basis: Sequence) -> int:
    """Sign of the determinant of the ordered column selection."""
    cols = {i: tuple(c) for i, c in columns.items()}
    heights = {len(c) for c in cols.values()}
    if len(heights) != 1:
        raise ValueError("columns of mixed height")
    h = heights.pop()
    for i in basis:
        if i not in cols:
            raise UnknownElement(i)
    if len(basis) != h:
        raise NotABasis(f"need {h} columns, got {len(basis)}")
    d = det([list(r) for r in zip(*(cols[i] for i in basis))])
    return (d > 0) - (d < 0)


class MCI:
    """Matroid data over a support multiset with a target codimension."""

    __slots__ = ("support", "matroid", "codim", "loops")

    def __init__(self, support: SupportMultiset, matroid: Matroid, codim: int):
        if set(support.ids()) != set(matroid.ground):
            raise ValueError("support ids and matroid ground differ")
        self.loops = [i for i in support.ids() if matroid.rank([i]) == 0]
        self.support = support.restrict(
            [i for i in support.ids() if i not in self.loops]) \
            if self.loops else support
        self.matroid = matroid
        if codim < 0:
            raise ValueError("codimension must be nonnegative")
        if matroid.rank(self.support.ids()) < codim:
            raise RankDeficient(
                f"matroid rank {matroid.rank(self.support.ids())} < codim {codim}")
        self.codim = codim

    @property
    def ambient(self) -> int:
        return self.support.ambient

    def __repr__(self):
        return f"MCI(|A|={len(self.support)}, codim={self.codim})"


class TCI:
    """Chain of weighted fans cut out by successive threshold functions."""

    __slots__ = ("fans", "functions", "codim", "collapsed_at")

    def __init__(self, fans: Sequence[WeightedFan], functions: Sequence[PLFunction],
                 codim: int | None = None, collapsed_at: int | None = None):
        self.fans = list(fans)
        self.functions = list(functions)
        self.codim = len(self.functions) if codim is None else codim
        self.collapsed_at = collapsed_at

    @property
    def ambient(self) -> int:
        return self.fans[0].ambient

    def check(self) -> bool:
        """Recompute every corner locus and compare with the stored chain."""
        from .fans import fans_equal
        for i, m in enumerate(self.functions):
            expected = corner_locus(m, self.fans[i], check=False)
            if not fans_equal(expected, self.fans[i + 1]):
                return False
        return True

    def __repr__(self):
        tail = f", collapsed_at={self.collapsed_at}" if self.collapsed_at else ""
        return f"TCI(codim={self.codim}, steps={len(self.functions)}{tail})"


def _greedy_selection(matroid: Matroid, support: SupportMultiset, l, k: int) -> list:
    """First k ids picked by the matroid greedy walk on l-values (descending).

    Ties are broken by id, which keeps the walk deterministic; tie order
    between ids with equal points never affects the selected values.
    """
    order = sorted(support.ids())
    order.sort(key=lambda i: dot(l, support.point(i)), reverse=True)
    chosen = []
    r = 0
    for i in order:
        if matroid.rank(chosen + [i]) > r:
            chosen.append(i)
            r += 1
            if r == k:
                break
    return chosen


def tci_threshold(matroid: Matroid, support: SupportMultiset, k: int, l):
    """Best worst value l(a) over independent k-subsets of the support.

    Equals the k-th value selected by the matroid greedy walk, and the
    largest m such that {a : l(a) ≥ m} has rank at least k.
    """
    if matroid.rank(support.ids()) < k:
        raise RankDeficient(f"rank < {k}")
    chosen = _greedy_selection(matroid, support, l, k)
    return dot(l, support.point(chosen[-1]))


def _selection_region(mci: MCI, prefix: Sequence):
    """Closed cone of covectors on which the greedy walk can select `prefix`.

    At step t the chosen id must beat every id that would also have grown the
    rank, so the region is cut out by the inequalities l(s_t) ≥ l(a) over the
    eligible a.  The threshold values l(s_t) are correct on the whole region
    even where several selections tie.
    """
    ineqs = []
    chosen = []
    for st in prefix:
        p = mci.support.point(st)
        r = len(chosen)
        for a in mci.support.ids():
            if a in chosen or a == st:
                continue
            if mci.matroid.rank(chosen + [a]) > r:
                d = vsub(p, mci.support.point(a))
                if any(d):
                    ineqs.append(d)
        chosen.append(st)
    if not ineqs:
        return full_space(mci.ambient)
    return Cone(mci.ambient, ineqs=ineqs)


def _prefix_regions(mci: MCI) -> dict:
    """Selection regions of every greedy prefix that covers an open cone.

    Depth-first extension: a prefix is kept when its region is full
    dimensional, and only kept prefixes are extended (regions shrink along a
    prefix, so the pruning is exact).  The union of the kept regions of each
    length covers covector space, and ids sharing a point lead to identical
    regions, so nothing else is ever needed.
    """
    n = mci.ambient
    ids = sorted(mci.support.ids())
    regions = {(): (full_space(n), [])}
    stack = [()]
    while stack:
        prefix = stack.pop()
        if len(prefix) == mci.codim:
            continue
        _, base = regions[prefix]
        chosen = list(prefix)
        r = len(prefix)
        eligible = [a for a in ids
                    if a not in chosen and mci.matroid.rank(chosen + [a]) > r]
        for a in eligible:
            p = mci.support.point(a)
            ineqs = list(base)
            for b in eligible:
                if b == a:
                    continue
                d = vsub(p, mci.support.point(b))
                if any(d):
                    ineqs.append(d)
            cone = Cone(n, ineqs=ineqs) if ineqs else full_space(n)
            if cone.dim == n:
                regions[prefix + (a,)] = (cone, ineqs)
                stack.append(prefix + (a,))
    return regions


def tci_from_mci(mci: MCI) -> TCI:
    """Threshold chain of an MCI.

    Each threshold function is assembled from greedy selection regions: on
    the region of a prefix the k-th selected point is constant, so the
    threshold is linear there, and the regions of one length tile covector
    space.  The cell count stays proportional to the number of distinct
    selections.
    """
    n = mci.ambient
    regions = _prefix_regions(mci)
    fans = [WeightedFan(n, [(full_space(n), 1)])]
    functions = []
    for k in range(1, mci.codim + 1):
        seen = {}
        for prefix in sorted(p for p in regions if len(p) == k):
            region, _ = regions[prefix]
            covector = mci.support.point(prefix[-1])
            seen[(region.key(), covector)] = (region, covector)
        m_k = PLFunction(n, sorted(seen.values(), key=lambda cl: cl[0].key()))
        nxt = corner_locus(m_k, fans[-1], check=True)
        nxt = WeightedFan(n, sorted(nxt.cones, key=lambda cw: cw[0].key()),
                          dim=nxt.dim)
        functions.append(m_k)
        fans.append(nxt)
        if nxt.is_zero() and k < mci.codim:
            return TCI(fans, functions, codim=mci.codim, collapsed_at=k)
    return TCI(fans, functions, codim=mci.codim)


def bkk_number(tci: TCI) -> int:
    """Weight of the zero-dimensional end of a full-codimension chain."""
    if tci.codim != tci.ambient:
        raise NotZeroDimensional(
            f"codim {tci.codim} differs from ambient dimension {tci.ambient}")
    if tci.collapsed_at is not None:
        return 0
    return tci.fans[-1].weight_of_point((0,) * tci.ambient)


def classical_mci(supports: Sequence[Sequence], codim: int | None = None) -> MCI:
    """MCI of a classical system: block i contributes parallel columns e_i.

    Supports are lists of lattice points; ids are "i:j" for point j of
    block i.  The default codimension is the number of blocks.
    """
    k = len(supports)
    points = []
    columns = {}
    for i, block in enumerate(supports):
        for j, p in enumerate(block):
            ident = f"{i}:{j}"
            points.append((ident, tuple(p)))
            columns[ident] = tuple(1 if t == i else 0 for t in range(k))
    return MCI(SupportMultiset(points), Matroid.from_matrix(columns),
               k if codim is None else codim)
