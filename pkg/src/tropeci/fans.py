"""Weighted fans and the cycle-level operations on them.

A weighted fan is a pure-dimensional collection of rational cones with
integer (occasionally rational, during intermediate computations) weights.
The operations here treat fans as cycles: addition, equality up to
refinement, balancing verification through quotient-lattice lifts,
pushforward along surjective lattice maps, and stable (generically
displaced) intersection numbers.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random
from typing import Iterable, Sequence

from .cones import Chamber, Cone, NotAFan, chamber_complex
from .linalg import (
    canonical_span_rows,
    coordinates_in_basis,
    dot,
    in_span,
    kernel_basis,
    primitive,
    rank,
    saturation_basis,
    sign_normalized,
    smith_with_basis,
    solve_dot_one,
    sublattice_index,
    vadd,
    vscale,
)


class NotBalanced(ValueError):
    pass


class NotSurjective(ValueError):
    pass


class NotComplementary(ValueError):
    pass


class WeightedFan:
    """Pure-dimensional weighted fan; duplicate cones are merged on build."""

    __slots__ = ("ambient", "dim", "cones")

    def __init__(self, ambient: int, cones: Iterable, dim: int | None = None):
        self.ambient = ambient
        merged = {}
        order = []
        for cone, w in cones:
            if w == 0:
                continue
            k = cone.key()
            if k in merged:
                merged[k] = (merged[k][0], merged[k][1] + w)
            else:
                merged[k] = (cone, w)
                order.append(k)
        self.cones = [merged[k] for k in order if merged[k][1] != 0]
        dims = {c.dim for c, _ in self.cones}
        if len(dims) > 1:
            raise ValueError(f"mixed cone dimensions {sorted(dims)}")
        if dims:
            d = dims.pop()
            if dim is not None and dim != d:
                raise ValueError("declared dimension does not match cones")
            self.dim = d
        else:
            self.dim = dim if dim is not None else -1

    def is_zero(self) -> bool:
        return not self.cones

    def scale(self, c) -> "WeightedFan":
        return WeightedFan(self.ambient, [(cone, c * w) for cone, w in self.cones],
                           dim=self.dim)

    def __neg__(self) -> "WeightedFan":
        return self.scale(-1)

    def __add__(self, other: "WeightedFan") -> "WeightedFan":
        if self.ambient != other.ambient:
            raise ValueError("ambient mismatch")
        if self.cones and other.cones and self.dim != other.dim:
            raise ValueError("dimension mismatch")
        d = self.dim if self.cones else other.dim
        return WeightedFan(self.ambient, list(self.cones) + list(other.cones), dim=d)

    def weight_of_point(self, x) -> int:
        """Sum of weights of cones containing x (meaningful away from walls)."""
        return sum(w for c, w in self.cones if c.contains(x))

    def contains_point(self, x) -> bool:
        return any(c.contains(x) for c, w in self.cones)

    def __repr__(self):
        return f"WeightedFan(dim={self.dim}, ncones={len(self.cones)})"


def _int_coords(basis, v):
    coords = coordinates_in_basis(basis, v)
    out = []
    for c in coords:
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise AssertionError("expected integral coordinates")
            c = c.numerator
        out.append(int(c))
    return tuple(out)


def wall_lift(rho: Cone, tau: Cone):
    """Integer lift in span τ of the primitive generator of L_τ/L_ρ toward τ.

    ρ must be a facet of τ; the returned vector ũ satisfies: ũ ∈ L_τ, the
    class of ũ generates L_τ/L_ρ, and ũ points to the side of span ρ that
    contains τ.
    """
    b_tau = tau.span_rows()
    b_rho = rho.span_rows()
    coords = [_int_coords(b_tau, b) for b in b_rho]
    phis = kernel_basis(coords, len(b_tau))
    if len(phis) != 1:
        raise ValueError("wall is not of codimension one in the cone")
    phi = phis[0]
    x = solve_dot_one(phi)
    p = tau.relint_point()
    pc = _int_coords(b_tau, p)
    s = dot(phi, pc)
    if s == 0:
        raise ValueError("cone does not leave the span of the wall")
    if s < 0:
        x = tuple(-t for t in x)
    lift = [0] * tau.ambient
    for xi, b in zip(x, b_tau):
        lift = vadd(lift, vscale(xi, b))
    return tuple(lift)


def _is_face_of(cone: Cone, sub: Cone) -> bool:
    """Whether sub (already known to satisfy sub ⊆ cone) is a face of cone."""
    p = sub.relint_point()
    tight = [a for a in cone.ineqs if dot(a, p) == 0]
    face = Cone(cone.ambient, ineqs=cone.ineqs,
                eqs=list(cone.eqs) + tight)
    return face.key() == sub.key()


def check_fan_structure(fan: WeightedFan) -> None:
    """Raise NotAFan unless cones meet pairwise in common faces."""
    cones = [c for c, _ in fan.cones]
    for i in range(len(cones)):
        for j in range(i + 1, len(cones)):
            inter = cones[i].intersect(cones[j])
            if inter.dim == 0:
                continue  # cones meeting only at the origin never overlap
            if not _is_face_of(cones[i], inter) or not _is_face_of(cones[j], inter):
                raise NotAFan(
                    f"cones {i} and {j} overlap without a common face")


def is_balanced(fan: WeightedFan, check_fan: bool = True) -> bool:
    """Weighted balancing test around every codimension-one wall."""
    if check_fan:
        check_fan_structure(fan)
    if fan.dim <= 0:
        return True
    groups = {}
    for cone, w in fan.cones:
        for f in cone.facets():
            groups.setdefault(f.key(), (f, []))[1].append((cone, w))
    for key, (wall, incident) in groups.items():
        total = (0,) * fan.ambient
        for cone, w in incident:
            total = vadd(total, vscale(w, wall_lift(wall, cone)))
        if not in_span(wall.span_rows(), total):
            return False
    return True


def _group_by_span(pairs: Sequence) -> dict:
    groups = {}
    for cone, w in pairs:
        gens = list(cone.rays) + list(cone.lineality)
        key = canonical_span_rows(gens)
        groups.setdefault(key, []).append((cone, w))
    return groups


def _span_coords_cone(cone: Cone, basis) -> Cone:
    d = len(basis)
    rays = [_int_coords(basis, r) for r in cone.rays]
    lin = [_int_coords(basis, l) for l in cone.lineality]
    return Cone(d, rays=rays, lineality=lin, _trusted=True)


def is_zero_cycle(pairs: Sequence, ambient: int) -> bool:
    """Whether a formal sum of weighted cones is zero as a cycle.

    Cones are grouped by linear span, each group is refined by the
    arrangement of all facet hyperplanes within the span, and every chamber
    must receive total weight zero.
    """
    pairs = [(c, w) for c, w in pairs if w != 0]
    if not pairs:
        return True
    for key, members in _group_by_span(pairs).items():
        if not key:
            # zero-dimensional cones: weights at the origin must cancel
            if sum(w for _, w in members) != 0:
                return False
            continue
        basis = saturation_basis([list(r) for r in key])
        d = len(basis)
        local = [(_span_coords_cone(c, basis), w) for c, w in members]
        normals = set()
        for c, _ in local:
            for a in c.ineqs:
                normals.add(sign_normalized(a))
        chambers = chamber_complex(sorted(normals), d)
        for ch in chambers:
            p = (0,) * d
            for r in ch.rays:
                p = vadd(p, r)
            total = sum(w for c, w in local if c.contains(p))
            if total != 0:
                return False
    return True


def fans_equal(a: WeightedFan, b: WeightedFan) -> bool:
    if a.ambient != b.ambient:
        return False
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    if a.dim != b.dim:
        return False
    pairs = list(a.cones) + [(c, -w) for c, w in b.cones]
    return is_zero_cycle(pairs, a.ambient)


def _image_lattice_check(rows, target_dim: int) -> None:
    cols = [tuple(r[j] for r in rows) for j in range(len(rows[0]))]
    diag, _ = smith_with_basis([list(c) for c in cols])
    if len(diag) != target_dim or any(abs(x) != 1 for x in diag):
        raise NotSurjective("matrix is not a surjective lattice map")


def apply_matrix(rows, v):
    return tuple(dot(r, v) for r in rows)


def pushforward(fan: WeightedFan, rows: Sequence) -> WeightedFan:
    """Image cycle under a surjective lattice map given by matrix rows.

    Cones whose image drops dimension are discarded; the others carry their
    weight multiplied by the index of the image of the cone's span lattice
    inside its saturation.  The resulting cones are refined into a
    face-to-face fan before being returned.
    """
    rows = [tuple(r) for r in rows]
    m = len(rows)
    _image_lattice_check(rows, m)
    images = []
    for cone, w in fan.cones:
        span_img = [apply_matrix(rows, b) for b in cone.span_rows()]
        if rank(span_img) < fan.dim:
            continue
        idx = sublattice_index([list(r) for r in span_img])
        img = Cone(m, rays=[apply_matrix(rows, r) for r in cone.rays],
                   lineality=[apply_matrix(rows, l) for l in cone.lineality])
        images.append((img, w * idx))
    return WeightedFan(m, _refine_to_fan(images, m, fan.dim), dim=fan.dim)


def _cross_span_normals(key_i, key_j, basis_i, ambient: int):
    """Normals (in span-i coordinates) of a (d−1)-dimensional span overlap."""
    d = len(basis_i)
    rows_i = [list(r) for r in key_i]
    rows_j = [list(r) for r in key_j]
    inter_dim = rank(rows_i) + rank(rows_j) - rank(rows_i + rows_j)
    if inter_dim != d - 1:
        return []
    out = []
    for nj in kernel_basis(rows_j, ambient):
        restricted = tuple(dot(nj, b) for b in basis_i)
        if any(restricted):
            out.append(sign_normalized(primitive(restricted)))
    return out


def _refine_to_fan(images: Sequence, ambient: int, dim: int) -> list:
    """Refine overlapping weighted cones into face-to-face cells per span."""
    groups = _group_by_span(images)
    keys = list(groups)
    out = []
    for key in keys:
        if not key:
            total = sum(w for _, w in groups[key])
            if total:
                from .cones import origin_cone
                out.append((origin_cone(ambient), total))
            continue
        basis = saturation_basis([list(r) for r in key])
        d = len(basis)
        local = [(_span_coords_cone(c, basis), w) for c, w in groups[key]]
        normals = set()
        for c, _ in local:
            for a in c.ineqs:
                normals.add(sign_normalized(a))
        for other in keys:
            if other is key:
                continue
            for nrm in _cross_span_normals(key, other, basis, ambient):
                normals.add(nrm)
        chambers = chamber_complex(sorted(normals), d)
        for ch in chambers:
            p = (0,) * d
            for r in ch.rays:
                p = vadd(p, r)
            total = sum(w for c, w in local if c.contains(p))
            if total == 0:
                continue
            amb_rays = [_from_coords(r, basis) for r in ch.rays]
            amb_lin = [_from_coords(l, basis) for l in ch.lin]
            out.append((Cone(ambient, rays=amb_rays, lineality=amb_lin,
                             _trusted=True), total))
    return out


def _from_coords(v, basis):
    out = [0] * len(basis[0])
    for c, b in zip(v, basis):
        out = vadd(out, vscale(c, b))
    return tuple(out)


def consolidate(pairs: Sequence, ambient: int, dim: int) -> WeightedFan:
    """Rebuild a formal sum of weighted cones as a face-to-face fan.

    The cones may overlap arbitrarily; each span group is chambered by the
    arrangement of every inequality occurring in it, weights are summed
    chamber by chamber, and cancelled pieces drop out.
    """
    return WeightedFan(ambient, _refine_to_fan(list(pairs), ambient, dim),
                       dim=dim)


def stable_intersection_number(t_fan: WeightedFan, f_fan: WeightedFan,
                               seed: int = 0) -> int:
    """Degree of the stable intersection of two complementary-dimension fans.

    The second fan is displaced by a generically chosen vector; pairs of
    cones meeting transversally in single relative-interior points contribute
    the product of their weights times the index of the sum of their span
    lattices.  Displacements are resampled until every incidence is generic.
    """
    n = t_fan.ambient
    if f_fan.ambient != n:
        raise ValueError("ambient mismatch")
    if t_fan.is_zero() or f_fan.is_zero():
        return 0
    if t_fan.dim + f_fan.dim != n:
        raise NotComplementary(
            f"dimensions {t_fan.dim} + {f_fan.dim} do not sum to {n}")
    rng = Random(seed)
    for attempt in range(64):
        radius = 611 + 97 * attempt
        v = tuple(rng.randint(-radius, radius) for _ in range(n))
        total = _displaced_count(t_fan, f_fan, v)
        if total is not None:
            return total
    raise RuntimeError("no generic displacement found")


def _displaced_count(t_fan: WeightedFan, f_fan: WeightedFan, v):
    n = t_fan.ambient
    total = 0
    for sigma, ws in t_fan.cones:
        for tau, wf in f_fan.cones:
            span_rows = [list(r) for r in sigma.span_rows()] + \
                [list(r) for r in tau.span_rows()]
            full = rank(span_rows) == n
            point = _meet_point(sigma, tau, v)
            if point is None:
                continue
            if not full:
                return None  # degenerate incidence: displacement not generic
            x = point
            xs = tuple(Fraction(c) for c in x)
            xt = tuple(a - b for a, b in zip(xs, v))
            if not _strictly_inside(sigma, xs) or not _strictly_inside(tau, xt):
                return None
            total += ws * wf * sublattice_index(span_rows)
    return total


def _strictly_inside(cone: Cone, x) -> bool:
    return all(dot(a, x) > 0 for a in cone.ineqs) and \
        all(dot(e, x) == 0 for e in cone.eqs)


def _meet_point(sigma: Cone, tau: Cone, v):
    """Point of σ ∩ (τ + v), or None when the intersection is empty."""
    n = sigma.ambient
    ineqs = [tuple(a) + (0,) for a in sigma.ineqs]
    ineqs += [tuple(b) + (-dot(b, v),) for b in tau.ineqs]
    ineqs.append((0,) * n + (1,))
    eqs = [tuple(e) + (0,) for e in sigma.eqs]
    eqs += [tuple(e) + (-dot(e, v),) for e in tau.eqs]
    hom = Cone(n + 1, ineqs=ineqs, eqs=eqs)
    hits = [r for r in hom.rays if r[-1] > 0]
    if not hits:
        return None
    if len(hits) > 1:
        # a bounded slice can only be a single point here; two rays with
        # positive last coordinate mean the displacement was degenerate
        return tuple(Fraction(hits[0][i], hits[0][-1]) for i in range(n))
    r = hits[0]
    return tuple(Fraction(r[i], r[-1]) for i in range(n))


def support_connected_off_origin(fan: WeightedFan) -> bool:
    """Whether maximal cones form one component via shared nonzero faces."""
    cones = [c for c, _ in fan.cones]
    k = len(cones)
    if k <= 1:
        return True
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            inter = cones[i].intersect(cones[j])
            if inter.dim >= 1:
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[pi] = pj
    return len({find(i) for i in range(k)}) == 1
