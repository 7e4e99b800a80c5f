"""Piecewise-linear functions, corner loci, and divisor reconstruction.

A PLFunction is given by cells: cones carrying linear covectors that agree on
overlaps.  The corner locus of such a function against a weighted fan is the
codimension-one cycle of its non-linearity, weighted by the defect of the
covectors across each wall; iterating against nested cycles drives most of
the intersection theory in this package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .cones import Chamber, Cone, chamber_complex, full_space, may_meet_full_dim
from .fans import NotBalanced, WeightedFan, is_balanced, wall_lift
from .linalg import (
    dot,
    in_span,
    kernel_basis,
    primitive,
    sign_normalized,
    vadd,
    vscale,
    vsub,
)
from .polytopes import LatticePolytope


class NotADivisor(ValueError):
    pass


class NotConvex(ValueError):
    pass


class PLFunction:
    """Piecewise-linear function as cells (cone, covector)."""

    __slots__ = ("ambient", "cells")

    def __init__(self, ambient: int, cells: Iterable):
        self.ambient = ambient
        self.cells = [(c, tuple(l)) for c, l in cells]

    def value(self, x):
        for cone, l in self.cells:
            if cone.contains(x):
                return dot(l, x)
        raise ValueError(f"point {x} outside the domain")

    def covector_at(self, x):
        """Covector of some cell containing x (unique up to wall agreement)."""
        for cone, l in self.cells:
            if cone.contains(x):
                return l
        raise ValueError(f"point {x} outside the domain")

    def scale(self, c) -> "PLFunction":
        return PLFunction(self.ambient,
                          [(cone, vscale(c, l)) for cone, l in self.cells])

    def check_continuity(self) -> bool:
        cells = self.cells
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                inter = cells[i][0].intersect(cells[j][0])
                if inter.dim == 0:
                    continue
                diff = vsub(cells[i][1], cells[j][1])
                for b in inter.span_rows():
                    if dot(diff, b) != 0:
                        return False
        return True

    def __repr__(self):
        return f"PLFunction(ambient={self.ambient}, ncells={len(self.cells)})"


def pl_from_polytope(poly: LatticePolytope) -> PLFunction:
    """Support function max_{a ∈ P} l·a as a PL function on the normal fan."""
    return PLFunction(poly.ambient, poly.normal_fan())


def pl_add(f: PLFunction, g: PLFunction) -> PLFunction:
    """Pointwise sum on the common refinement of the two cell structures."""
    if f.ambient != g.ambient:
        raise ValueError("ambient mismatch")
    cells = []
    seen = set()
    for cone, l in f.cells:
        for other, m in g.cells:
            if not may_meet_full_dim(cone, other):
                continue
            inter = cone.intersect(other)
            if inter.dim < f.ambient:
                continue
            k = inter.key()
            if k in seen:
                continue
            seen.add(k)
            cells.append((inter, vadd(l, m)))
    return PLFunction(f.ambient, cells)


def pullback_linear(m: PLFunction, rows: Sequence) -> PLFunction:
    """Compose with the linear map x ↦ M x (rows of M are over the new space)."""
    rows = [tuple(r) for r in rows]
    new_dim = len(rows[0]) if rows else 0

    def compose(v):
        return tuple(sum(v[i] * rows[i][j] for i in range(len(rows)))
                     for j in range(new_dim))

    cells = []
    seen = set()
    for cone, l in m.cells:
        pre = Cone(new_dim, ineqs=[compose(a) for a in cone.ineqs],
                   eqs=[compose(e) for e in cone.eqs])
        if pre.dim < new_dim:
            continue
        k = pre.key()
        if k in seen:
            continue
        seen.add(k)
        cells.append((pre, compose(l)))
    return PLFunction(new_dim, cells)


def refine_with_function(t_fan: WeightedFan, m: PLFunction) -> list:
    """Cut the cones of a fan along the cells of m.

    Returns (cone, weight, covector) triples whose cones tile the support of
    the fan and on each of which m is linear.
    """
    out = []
    seen = set()
    for sigma, w in t_fan.cones:
        for cell, l in m.cells:
            if not may_meet_full_dim(sigma, cell):
                continue
            piece = sigma.intersect(cell)
            if piece.dim < t_fan.dim:
                continue
            k = piece.key()
            if k in seen:
                continue
            seen.add(k)
            out.append((piece, w, l))
    return out


def corner_locus(m: PLFunction, t_fan: WeightedFan, check: bool = True) -> WeightedFan:
    """Weighted corner locus of m along a balanced cycle.

    Walls are the codimension-one faces of the refinement of the cycle by the
    cells of m; each wall ρ gets the weight Σ w_j·m(ũ_j) − ℓ_ρ(Σ w_j·ũ_j)
    over incident refined cones with quotient lifts ũ_j.

    The refined pieces must meet along common faces; walls are matched by
    their face keys, so a piece subdivided differently from its neighbour
    would hide the jump across their shared boundary.  Cell structures cut
    from a common arrangement satisfy this automatically.
    """
    if check and not is_balanced(t_fan, check_fan=False):
        raise NotBalanced("corner locus requires a balanced input cycle")
    if t_fan.is_zero():
        return WeightedFan(t_fan.ambient, [], dim=max(t_fan.dim - 1, -1))
    pieces = refine_with_function(t_fan, m)
    groups = {}
    for cone, w, l in pieces:
        for f in cone.facets():
            groups.setdefault(f.key(), (f, []))[1].append((cone, w, l))
    walls = []
    for key, (wall, incident) in groups.items():
        l_wall = incident[0][2]
        total_lift = (0,) * t_fan.ambient
        weight = 0
        for cone, w, l in incident:
            u = wall_lift(wall, cone)
            weight += w * dot(l, u)
            total_lift = vadd(total_lift, vscale(w, u))
        weight -= dot(l_wall, total_lift)
        if isinstance(weight, Fraction) and weight.denominator == 1:
            weight = weight.numerator
        if weight != 0:
            walls.append((wall, weight))
    return WeightedFan(t_fan.ambient, walls, dim=t_fan.dim - 1)


def iterated_corner_locus(ms: Sequence[PLFunction], t_fan: WeightedFan,
                          check: bool = True) -> WeightedFan:
    """Fold corner loci left to right; an empty list returns the input.

    With ``check`` on, every intermediate cycle is verified to balance, so a
    fold that went wrong surfaces at the next step instead of propagating.
    """
    out = t_fan
    for m in ms:
        out = corner_locus(m, out, check=check)
    return out


def _wall_hyperplanes(divisor: WeightedFan) -> list:
    """Span normals of the divisor's cones plus facet-extension hyperplanes.

    The extensions guarantee the arrangement refines the divisor even when a
    cone's affine span continues past its boundary into uncut territory.
    """
    n = divisor.ambient
    normals = set()
    for cone, _ in divisor.cones:
        span = [list(r) for r in cone.span_rows()]
        for h in kernel_basis(span, n):
            normals.add(sign_normalized(h))
        for f in cone.facets():
            for h in kernel_basis([list(r) for r in f.span_rows()], n):
                normals.add(sign_normalized(h))
    return sorted(normals)


def reconstruct_polytope(divisor: WeightedFan) -> LatticePolytope:
    """Lattice polytope whose support function has the given corner locus.

    Raises NotADivisor when no single-valued PL function has these wall
    jumps, and NotConvex when the function exists but is not the maximum of
    its own covectors.  The result is normalized so its lexicographically
    smallest vertex sits at the origin.
    """
    n = divisor.ambient
    if divisor.cones and divisor.dim != n - 1:
        raise NotADivisor("expected a codimension-one cycle")
    for _, w in divisor.cones:
        if isinstance(w, Fraction) and w.denominator != 1:
            raise NotADivisor("weights must be integers")
    normals = _wall_hyperplanes(divisor)
    chambers = chamber_complex(normals, n)
    points = []
    for ch in chambers:
        p = (0,) * n
        for r in ch.rays:
            p = vadd(p, r)
        points.append(p)
    sigs = []
    for p in points:
        sigs.append(tuple(1 if dot(h, p) > 0 else -1 for h in normals))
    covectors = {0: (0,) * n}
    queue = [0]
    while queue:
        i = queue.pop()
        for j in range(len(chambers)):
            if j == i:
                continue
            diffs = [k for k in range(len(normals)) if sigs[i][k] != sigs[j][k]]
            if len(diffs) != 1:
                continue
            h = normals[diffs[0]]
            crossing = _crossing_point(points[i], points[j], h)
            weight = sum(w for c, w in divisor.cones if c.contains(crossing))
            u = h if dot(h, points[j]) > 0 else tuple(-x for x in h)
            l_new = vadd(covectors[i], vscale(weight, u))
            if j in covectors:
                if covectors[j] != tuple(l_new):
                    raise NotADivisor("incompatible jumps around a wall")
            else:
                covectors[j] = tuple(l_new)
                queue.append(j)
    if len(covectors) != len(chambers):
        raise NotADivisor("support of the cycle disconnects the space")
    verts = sorted(set(covectors.values()))
    for i, p in enumerate(points):
        best = max(dot(v, p) for v in verts)
        if dot(covectors[i], p) != best:
            raise NotConvex("jump data does not majorize its covectors")
    poly = LatticePolytope(verts)
    return poly.normalize_translation()


def _crossing_point(p, q, h):
    a, b = dot(h, p), dot(h, q)
    t = Fraction(a, a - b)
    return tuple(Fraction(x) + t * (y - x) for x, y in zip(p, q))
