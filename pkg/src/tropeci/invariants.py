"""Valuations of virtual polytopes and the invariants built from them.

A virtual polytope is a formal difference of two lattice polytopes,
identified with the difference of their support functions.  Decomposing it
into a signed combination of indicator functions extends the two classical
valuations — lattice-point count and normalized volume — from polytopes to
these formal differences, and both extensions stay polynomial in the
dilation parameter.  That polynomiality is what makes the genus and Euler
formulas below finite sums.

The second half of the module works on threshold chains: characteristic
classes obtained by expanding a product of corner-locus operators, and the
Euler characteristic read off the zero-dimensional class.
"""

from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial

from .fans import WeightedFan, consolidate
from .mci import TCI
from .plfunc import corner_locus
from .polytopes import LatticePolytope


class GenusIndexOutOfRange(ValueError):
    pass


def _origin(ambient: int) -> LatticePolytope:
    return LatticePolytope([(0,) * ambient])


class VirtualPolytope:
    """Formal difference of the support functions of ``plus`` and ``minus``.

    Two pairs represent the same virtual polytope exactly when the cross
    Minkowski sums agree; ``equivalent`` tests that directly.  ``minus``
    defaults to a point, which embeds honest polytopes.
    """

    __slots__ = ("plus", "minus")

    def __init__(self, plus: LatticePolytope, minus: LatticePolytope | None = None):
        if minus is None:
            minus = _origin(plus.ambient)
        if plus.ambient != minus.ambient:
            raise ValueError("plus and minus parts live in different lattices")
        self.plus = plus
        self.minus = minus

    @property
    def ambient(self) -> int:
        return self.plus.ambient

    def dilate(self, t: int) -> "VirtualPolytope":
        return VirtualPolytope(self.plus.dilate(t), self.minus.dilate(t))

    def __add__(self, other: "VirtualPolytope") -> "VirtualPolytope":
        return VirtualPolytope(self.plus.minkowski_sum(other.plus),
                               self.minus.minkowski_sum(other.minus))

    def translate(self, r: LatticePolytope) -> "VirtualPolytope":
        """The equivalent representation with ``r`` added to both parts."""
        return VirtualPolytope(self.plus.minkowski_sum(r),
                               self.minus.minkowski_sum(r))

    def equivalent(self, other: "VirtualPolytope") -> bool:
        return (self.plus.minkowski_sum(other.minus)
                == other.plus.minkowski_sum(self.minus))

    def __repr__(self):
        return f"VirtualPolytope({self.plus!r}, {self.minus!r})"


class IndicatorCombination:
    """Integer combination of indicator functions of lattice polytopes."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = [(int(c), p) for c, p in terms if c != 0]

    def value_at(self, x) -> int:
        """Pointwise value at a rational point."""
        return sum(c for c, p in self.terms if p.contains(x))

    def __repr__(self):
        return f"IndicatorCombination({len(self.terms)} terms)"


class CharClassList:
    """Characteristic classes of a threshold chain, one fan per codimension."""

    __slots__ = ("classes",)

    def __init__(self, classes):
        self.classes = list(classes)

    def fan(self, codim: int) -> WeightedFan:
        for d, f in self.classes:
            if d == codim:
                return f
        raise KeyError(f"no class of codimension {codim}")

    def __repr__(self):
        dims = [d for d, _ in self.classes]
        return f"CharClassList(codims={dims})"


def _reflect(poly: LatticePolytope) -> LatticePolytope:
    return LatticePolytope([tuple(-x for x in v) for v in poly.vertices])


def val_decompose(m: VirtualPolytope) -> IndicatorCombination:
    """Signed indicator decomposition of a virtual polytope.

    Every face f of the reflection of the minus part contributes the term
    (-1)^(dim f) · 1_{plus + f}.  This sign makes the result independent of
    the chosen representation: the combinations obtained from (plus + R,
    minus + R) induce the same count and volume valuations for every
    polytope R, and on honest polytopes (minus a point) the decomposition
    is the plain indicator of the plus part.
    """
    reflected = _reflect(m.minus)
    terms = []
    for fv in reflected.faces():
        face = LatticePolytope(fv)
        terms.append(((-1) ** face.dim, m.plus.minkowski_sum(face)))
    return IndicatorCombination(terms)


def count_valuation(m: VirtualPolytope) -> int:
    """Lattice-point count, extended to virtual polytopes.

    Agrees with ``n_lattice_points`` of the plus part when the minus part
    is a point, and in general is the value at dilation -1 of the
    polynomial extension of t -> #(plus + t·minus).
    """
    return sum(c * p.n_lattice_points() for c, p in val_decompose(m).terms)


def volume_valuation(m: VirtualPolytope) -> int:
    """Normalized volume (n!·vol in the ambient lattice) of a virtual polytope.

    Lower-dimensional polytopes have normalized volume zero, so the value
    depends only on the top-dimensional geometry.
    """
    return sum(c * p.normalized_volume() for c, p in val_decompose(m).terms)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _scaled_sum(ms, coeffs) -> VirtualPolytope:
    n = ms[0].ambient
    out = VirtualPolytope(_origin(n), _origin(n))
    for m, c in zip(ms, coeffs):
        if c:
            out = out + m.dilate(c)
    return out


def _common_ambient(ms) -> int:
    if not ms:
        raise ValueError("at least one virtual polytope is required")
    n = ms[0].ambient
    if any(m.ambient != n for m in ms):
        raise ValueError("virtual polytopes live in different lattices")
    return n


def hirzebruch_chi_p(ms, p: int) -> int:
    """Hirzebruch genus chi_p of the intersection cut out by k virtual polytopes.

    The value is an alternating double sum of count valuations of
    non-negative combinations of the inputs,

        chi_p = sum over j + |beta| = p, gamma in {0,1}^k of
                (-1)^(n - j + |gamma|) · C(n, j) · #( sum (beta_i + gamma_i) m_i ),

    which is the coefficient of y^p in the generating series expansion of
    the count valuation applied to (y-1)^n · prod (1 - m_i)/(1 - y·m_i).
    The admissible range is 0 <= p <= n - k.
    """
    k = len(ms)
    n = _common_ambient(ms)
    if p < 0 or p > n - k:
        raise GenusIndexOutOfRange(
            f"GenusIndexOutOfRange: p must lie in 0..{n - k}, got {p}")
    counts = {}

    def counted(exponents):
        if exponents not in counts:
            counts[exponents] = count_valuation(_scaled_sum(ms, exponents))
        return counts[exponents]

    total = 0
    for j in range(min(n, p) + 1):
        for beta in _compositions(p - j, k):
            for gamma in product((0, 1), repeat=k):
                exponents = tuple(b + g for b, g in zip(beta, gamma))
                sign = (-1) ** (n - j + sum(gamma))
                total += sign * comb(n, j) * counted(exponents)
    return total


def mixed_volume_valuation(ms) -> int:
    """Polarization of the volume valuation at n virtual polytopes.

    Normalized so that n identical copies of an honest polytope give its
    normalized volume; on honest arguments this is the lattice mixed
    volume, hence always an integer.
    """
    n = _common_ambient(ms)
    if len(ms) != n:
        raise ValueError(f"expected {n} arguments, got {len(ms)}")
    cache = {}

    def vol(coeffs):
        if coeffs not in cache:
            cache[coeffs] = volume_valuation(_scaled_sum(ms, coeffs))
        return cache[coeffs]

    acc = 0
    for r in range(1, n + 1):
        for subset in combinations(range(n), r):
            coeffs = [0] * n
            for i in subset:
                coeffs[i] += 1
            acc += (-1) ** (n - r) * vol(tuple(coeffs))
    value = Fraction(acc, factorial(n))
    if value.denominator != 1:
        raise ArithmeticError("volume polarization did not produce an integer")
    return int(value)


def euler_from_genera(ms) -> int:
    """Euler characteristic of the intersection cut out by k virtual polytopes.

    Computed as (-1)^(n-k) times the sum of mixed volume valuations over
    all ways to distribute n slots among the k inputs with every input
    used at least once — the degree-n part of the volume generating series
    of the system.
    """
    k = len(ms)
    n = _common_ambient(ms)
    if k > n:
        raise ValueError("more constraints than ambient dimensions")
    total = 0
    for beta in _compositions(n - k, k):
        args = []
        for m, b in zip(ms, beta):
            args.extend([m] * (b + 1))
        total += mixed_volume_valuation(args)
    return (-1) ** (n - k) * total


def tropical_csm(tci: TCI) -> CharClassList:
    """Characteristic classes of a threshold chain.

    Expands the product of the operators delta_i/(1 + delta_i) — where
    delta_i is the corner locus along the i-th threshold function — to
    total degree at most n, evaluates every monomial as an iterated corner
    locus applied to the ambient fan, and adds the results per degree.
    The classes run from codimension k to n; a collapsed chain has empty
    intersection and all its classes vanish.
    """
    t0 = tci.fans[0]
    n = t0.ambient
    k = tci.codim
    if tci.collapsed_at is not None:
        return CharClassList(
            [(d, WeightedFan(n, [], dim=n - d)) for d in range(k, n + 1)])
    buckets = {d: [] for d in range(k, n + 1)}

    def descend(i, fan, degree):
        if i == k:
            # coefficient of m_1^{a_1}...m_k^{a_k} in prod m_i/(1 + m_i)
            buckets[degree].append(((-1) ** (degree - k), fan))
            return
        remaining = k - 1 - i
        current = fan
        for _ in range(n - degree - remaining):
            current = corner_locus(tci.functions[i], current, check=False)
            if current.is_zero():
                break
            degree += 1
            descend(i + 1, current, degree)

    descend(0, t0, 0)
    classes = []
    for d in range(k, n + 1):
        entries = buckets[d]
        if len(entries) == 1 and entries[0][0] == 1:
            classes.append((d, entries[0][1]))
            continue
        pairs = [(cone, coeff * w)
                 for coeff, fan in entries for cone, w in fan.cones]
        classes.append((d, consolidate(pairs, n, n - d)))
    return CharClassList(classes)


def euler_from_csm(tci: TCI) -> int:
    """Weight at the origin of the codimension-n characteristic class."""
    n = tci.ambient
    for d, fan in tropical_csm(tci).classes:
        if d == n:
            return fan.weight_of_point((0,) * n)
    return 0
