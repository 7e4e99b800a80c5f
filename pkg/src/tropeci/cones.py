"""Rational polyhedral cones with exact dual-representation conversion.

A cone is stored as extreme rays plus a lineality basis (V-side) and as
irredundant inequalities plus equations (H-side); whichever side was not
supplied is computed lazily by the double description method.  All data are
integer vectors; every conversion is exact.

The module also provides the incremental hyperplane-arrangement builder used
by the threshold pipeline: it splits cells hyperplane by hyperplane while
maintaining tightness bitmasks, so no from-scratch conversion is ever needed
inside that hot path.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .linalg import (
    _reduce_row,
    canonical_span_rows,
    dot,
    inverse_rows,
    is_zero,
    kernel_basis,
    primitive,
    rank,
    saturation_basis,
    vadd,
    vneg,
    vscale,
    vsub,
)


class NotAFan(ValueError):
    pass


def _dedupe(vectors: Iterable[tuple]) -> list:
    seen, out = set(), []
    for v in vectors:
        t = tuple(v)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def dual_description(ineqs: Sequence, eqs: Sequence, ambient: int):
    """Extreme rays and lineality of {x : a·x ≥ 0 ∀a ∈ ineqs, e·x = 0 ∀e ∈ eqs}."""
    ineqs = _dedupe(tuple(a) for a in ineqs if not is_zero(a))
    eqs = [tuple(e) for e in eqs if not is_zero(e)]
    constraints = ineqs + eqs
    lin = kernel_basis(constraints, ambient) if constraints else \
        [tuple(1 if j == i else 0 for j in range(ambient)) for i in range(ambient)]
    if len(lin) == ambient or not constraints:
        return [], lin

    # work in coordinates of a lattice complement of the lineality space
    if lin:
        from .linalg import complement_basis
        w = complement_basis(lin)
    else:
        w = [tuple(1 if j == i else 0 for j in range(ambient)) for i in range(ambient)]
    m = len(w)
    rows = [tuple(dot(a, wi) for wi in w) for a in ineqs]
    rows += [tuple(dot(e, wi) for wi in w) for e in eqs]
    rows += [vneg(r) for r in rows[len(ineqs):]]  # equations as opposite pairs
    rows = [r for r in rows if not is_zero(r)]

    # initial simplicial cone from a nonsingular subsystem
    base_idx, base, red = [], [], []
    for i, r in enumerate(rows):
        work = list(r)
        piv = _reduce_row(work, red)
        if piv is not None:
            red.append((piv, work))
            base_idx.append(i)
            base.append(r)
            if len(base) == m:
                break
    if len(base) < m:  # cannot happen: lineality was fully removed
        raise AssertionError("pointed part is not pointed")

    order = base_idx + [i for i in range(len(rows)) if i not in base_idx]
    inv_mat, _ = inverse_rows(base)
    rays = []
    for j in range(m):
        r = primitive(tuple(row[j] for row in inv_mat))
        mask = 0
        for b, row in enumerate(base):
            if dot(row, r) == 0:
                mask |= 1 << b
        rays.append((r, mask))

    for step in range(m, len(order)):
        a = rows[order[step]]
        bit = 1 << step
        vals = [dot(a, r) for r, _ in rays]
        if all(v >= 0 for v in vals):
            rays = [(r, mk | bit if v == 0 else mk) for (r, mk), v in zip(rays, vals)]
            continue
        if all(v <= 0 for v in vals):
            # opposite member of an equation pair already cut everything
            rays = [(r, mk | bit) for (r, mk), v in zip(rays, vals) if v == 0]
            continue
        idx = list(range(len(rays)))
        pos = [(i, r, mk, v) for i, ((r, mk), v) in enumerate(zip(rays, vals)) if v > 0]
        neg = [(i, r, mk, v) for i, ((r, mk), v) in enumerate(zip(rays, vals)) if v < 0]
        zero = [(r, mk | bit) for (r, mk), v in zip(rays, vals) if v == 0]
        masks_all = [mk for _, mk in rays]
        new = [(r, mk) for _, r, mk, _ in pos] + zero
        for ip, rp, mp, vp in pos:
            for im, rn, mn, vn in neg:
                if not _adjacent(mp & mn, ip, im, masks_all):
                    continue
                comb = primitive(vsub(vscale(vp, rn), vscale(vn, rp)))
                new.append((comb, (mp & mn) | bit))
        # dedupe combined rays (can coincide when several pairs share a face)
        seen, rays = {}, []
        for r, mk in new:
            if r in seen:
                rays[seen[r]] = (r, rays[seen[r]][1] | mk)
            else:
                seen[r] = len(rays)
                rays.append((r, mk))

    out = []
    for r, _ in rays:
        x = tuple(sum(r[i] * w[i][j] for i in range(m)) for j in range(ambient))
        out.append(primitive(x))
    return sorted(_dedupe(out)), lin


def _adjacent(z, i, j, masks_all) -> bool:
    """Combinatorial adjacency: no third ray's tight set contains z."""
    for t, mk in enumerate(masks_all):
        if t == i or t == j:
            continue
        if z & ~mk == 0:
            return False
    return True


class Cone:
    """Immutable rational cone; dual representations computed on demand."""

    __slots__ = ("ambient", "_rays", "_lin", "_ineqs", "_eqs",
                 "_raw_ineqs", "_raw_eqs", "_dim", "_span", "_key")

    def __init__(self, ambient: int, rays=None, lineality=None, ineqs=None, eqs=None,
                 _trusted: bool = False):
        self.ambient = ambient
        self._rays = self._lin = self._ineqs = self._eqs = None
        self._raw_ineqs = self._raw_eqs = None
        self._dim = self._span = self._key = None
        if rays is None and ineqs is None:
            raise ValueError("need generators or inequalities")
        if rays is not None:
            rays = sorted(_dedupe(primitive(r) for r in rays if not is_zero(r)))
            lineality = [tuple(v) for v in (lineality or [])]
            if _trusted:
                self._rays, self._lin = rays, lineality
            else:
                # canonicalize arbitrary generators by a double conversion
                hi, he = dual_description(rays, lineality, ambient)
                self._ineqs, self._eqs = hi, he
                self._rays, self._lin = dual_description(hi, he, ambient)
        else:
            # raw constraints stay available for cheap containment tests; the
            # public H-rep is always the irredundant one derived from the rays
            self._raw_ineqs = sorted(_dedupe(tuple(a) for a in ineqs if not is_zero(a)))
            self._raw_eqs = [tuple(e) for e in (eqs or []) if not is_zero(e)]

    # -- representations ----------------------------------------------------

    @property
    def rays(self) -> list:
        if self._rays is None:
            self._rays, self._lin = dual_description(
                self._raw_ineqs, self._raw_eqs, self.ambient)
        return self._rays

    @property
    def lineality(self) -> list:
        if self._lin is None:
            self.rays
        return self._lin

    @property
    def ineqs(self) -> list:
        if self._ineqs is None:
            self._ineqs, self._eqs = dual_description(self.rays, self.lineality, self.ambient)
        return self._ineqs

    @property
    def eqs(self) -> list:
        if self._eqs is None:
            self.ineqs
        return self._eqs

    # -- basic geometry ------------------------------------------------------

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._dim = rank(list(self.rays) + list(self.lineality))
        return self._dim

    def span_rows(self) -> list:
        """Saturated lattice basis of the linear span."""
        if self._span is None:
            gens = list(self.rays) + list(self.lineality)
            self._span = saturation_basis(gens) if gens else []
        return self._span

    def key(self):
        if self._key is None:
            self._key = (tuple(self.rays), canonical_span_rows(self.lineality))
        return self._key

    def contains(self, x) -> bool:
        if self._raw_ineqs is not None:
            return all(dot(a, x) >= 0 for a in self._raw_ineqs) and \
                all(dot(e, x) == 0 for e in self._raw_eqs)
        return all(dot(a, x) >= 0 for a in self.ineqs) and \
            all(dot(e, x) == 0 for e in self.eqs)

    def relint_point(self) -> tuple:
        if not self.rays:
            return (0,) * self.ambient
        out = self.rays[0]
        for r in self.rays[1:]:
            out = vadd(out, r)
        return out

    def facets(self) -> list:
        """Codimension-1 faces (empty for a linear subspace)."""
        out = []
        for a in self.ineqs:
            tight = [r for r in self.rays if dot(a, r) == 0]
            out.append(Cone(self.ambient, rays=tight, lineality=self.lineality,
                            _trusted=True))
        return out

    def intersect(self, other: "Cone") -> "Cone":
        return Cone(self.ambient, ineqs=list(self.ineqs) + list(other.ineqs),
                    eqs=list(self.eqs) + list(other.eqs))

    def is_face_point(self, x) -> bool:
        """Containment test usable with rational coordinates."""
        return self.contains(x)

    def __repr__(self):
        return f"Cone(dim={self.dim}, rays={self.rays}, lin={len(self.lineality)})"

    def __eq__(self, other):
        return isinstance(other, Cone) and self.ambient == other.ambient and \
            self.key() == other.key()

    def __hash__(self):
        return hash((self.ambient, self.key()))


def may_meet_full_dim(sigma: Cone, cell: Cone) -> bool:
    """Cheap necessary test for dim(σ ∩ cell) = dim σ.

    Uses only dot products of cell constraints against σ's generators, so a
    False verdict proves the intersection lies in a proper face of σ without
    running any conversion.  True is inconclusive.
    """
    rays, lin = sigma.rays, sigma.lineality
    if cell._raw_ineqs is not None:
        ineqs, eqs = cell._raw_ineqs, cell._raw_eqs
    else:
        ineqs, eqs = cell.ineqs, cell.eqs
    for e in eqs:
        if any(dot(e, g) != 0 for g in rays) or any(dot(e, g) != 0 for g in lin):
            return False
    for a in ineqs:
        if any(dot(a, l) != 0 for l in lin):
            continue
        pos = neg = False
        for r in rays:
            v = dot(a, r)
            if v > 0:
                pos = True
                break
            if v < 0:
                neg = True
        if neg and not pos:
            return False
    return True


def full_space(ambient: int) -> Cone:
    basis = [tuple(1 if j == i else 0 for j in range(ambient)) for i in range(ambient)]
    return Cone(ambient, rays=[], lineality=basis, _trusted=True)


def origin_cone(ambient: int) -> Cone:
    return Cone(ambient, rays=[], lineality=[], _trusted=True)


# ---------------------------------------------------------------------------
# incremental hyperplane arrangement


class Chamber:
    """A full-dimensional cell of a central hyperplane arrangement.

    ``masks[i]`` is a bitmask over the arrangement's hyperplanes marking where
    ray ``i`` is tight; the masks double as the adjacency bookkeeping of the
    incremental splitting, so cells never go through a full conversion.
    """

    __slots__ = ("rays", "masks", "lin", "index")

    def __init__(self, rays, masks, lin):
        self.rays = rays
        self.masks = masks
        self.lin = lin
        self.index = -1

    def cone(self, ambient: int) -> Cone:
        return Cone(ambient, rays=self.rays, lineality=self.lin, _trusted=True)


def chamber_complex(normals: Sequence, ambient: int) -> list[Chamber]:
    """All chambers of the central arrangement with the given normals."""
    normals = [tuple(h) for h in normals]
    basis = [tuple(1 if j == i else 0 for j in range(ambient)) for i in range(ambient)]
    cells = [Chamber([], [], basis)]
    for step, h in enumerate(normals):
        bit = 1 << step
        nxt = []
        for cell in cells:
            lin_vals = [dot(h, l) for l in cell.lin]
            if any(v != 0 for v in lin_vals):
                nxt.extend(_split_lineality(cell, h, lin_vals, bit, step))
                continue
            vals = [dot(h, r) for r in cell.rays]
            if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                cell.masks = [mk | bit if v == 0 else mk
                              for mk, v in zip(cell.masks, vals)]
                nxt.append(cell)
                continue
            nxt.extend(_split_rays(cell, h, vals, bit))
        cells = nxt
    for i, c in enumerate(cells):
        c.index = i
    return cells


def _split_lineality(cell: Chamber, h, lin_vals, bit, step):
    k = min((i for i, v in enumerate(lin_vals) if v != 0),
            key=lambda i: abs(lin_vals[i]))
    l0, c = cell.lin[k], lin_vals[k]
    new_lin = []
    for i, (l, v) in enumerate(zip(cell.lin, lin_vals)):
        if i == k:
            continue
        new_lin.append(primitive(vsub(vscale(c, l), vscale(v, l0))) if v else l)
    prev_mask = bit - 1  # tight at every earlier hyperplane
    proj, pmasks = [], []
    for r, mk, v in zip(cell.rays, cell.masks, [dot(h, r) for r in cell.rays]):
        rr = primitive(vsub(vscale(abs(c), r), vscale((1 if c > 0 else -1) * v, l0))) \
            if v else r
        proj.append(rr)
        pmasks.append(mk | bit)
    up = primitive(l0) if c > 0 else primitive(vneg(l0))
    plus = Chamber(proj + [up], pmasks + [prev_mask], new_lin)
    minus = Chamber(list(proj) + [vneg(up)], list(pmasks) + [prev_mask], new_lin)
    return [plus, minus]


def _split_rays(cell: Chamber, h, vals, bit):
    pos = [(i, r, mk, v) for i, (r, mk, v) in
           enumerate(zip(cell.rays, cell.masks, vals)) if v > 0]
    neg = [(i, r, mk, v) for i, (r, mk, v) in
           enumerate(zip(cell.rays, cell.masks, vals)) if v < 0]
    zero = [(r, mk | bit) for r, mk, v in zip(cell.rays, cell.masks, vals) if v == 0]
    masks_all = cell.masks
    combos = []
    for ip, rp, mp, vp in pos:
        for im, rn, mn, vn in neg:
            if not _adjacent(mp & mn, ip, im, masks_all):
                continue
            combos.append((primitive(vsub(vscale(vp, rn), vscale(vn, rp))),
                           (mp & mn) | bit))
    seen = {}
    for r, mk in combos:
        if r in seen:
            seen[r] |= mk
        else:
            seen[r] = mk
    combos = [(r, mk) for r, mk in seen.items()]
    plus = Chamber([r for _, r, _, _ in pos] + [r for r, _ in zero] + [r for r, _ in combos],
                   [mk for _, _, mk, _ in pos] + [mk for _, mk in zero] + [mk for _, mk in combos],
                   cell.lin)
    minus = Chamber([r for _, r, _, _ in neg] + [r for r, _ in zero] + [r for r, _ in combos],
                    [mk for _, _, mk, _ in neg] + [mk for _, mk in zero] + [mk for _, mk in combos],
                    cell.lin)
    return [plus, minus]
