"""Exact integer/rational linear algebra used by every geometric kernel.

Everything here works on tuples of ``int`` or ``fractions.Fraction``; no
floats, ever.  Matrices are sequences of row tuples.  The workhorse is
:func:`smith_with_basis`, which diagonalizes an integer matrix by unimodular
operations while tracking the inverse column transform — that single routine
yields saturations, lattice complements and sublattice indices.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vec = tuple
Mat = Sequence[Sequence]


class ZeroVector(ValueError):
    pass


# ---------------------------------------------------------------------------
# vectors

def vgcd(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive(v) -> Vec:
    """v / gcd(|coords|), preserving direction. Errors on the zero vector."""
    g = vgcd(v)
    if g == 0:
        raise ZeroVector("ZeroVector: the zero vector has no primitive form")
    return tuple(x // g for x in v)


def rational_primitive(v) -> Vec:
    """Primitive integer vector on the ray spanned by a rational vector."""
    den = 1
    for x in v:
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    return primitive(tuple(int(x * den) for x in v))


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def vadd(u, v) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v) -> Vec:
    return tuple(c * a for a in v)


def vneg(v) -> Vec:
    return tuple(-a for a in v)


def is_zero(v) -> bool:
    return all(x == 0 for x in v)


def sign_normalized(v) -> Vec:
    """Flip so the first nonzero coordinate is positive (canonical normals)."""
    for x in v:
        if x != 0:
            return tuple(v) if x > 0 else vneg(v)
    return tuple(v)


# ---------------------------------------------------------------------------
# rank / determinant / solving (exact)

def _int_rows(rows: Mat) -> list:
    """Rescale each row by its denominator lcm: integer rows, same row space."""
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        if den == 1:
            out.append([int(x) for x in r])
        else:
            out.append([int(x * den) for x in r])
    return out


def _reduce_row(row: list, red: list) -> int | None:
    """Eliminate ``row`` in place against reduced rows; return its pivot column.

    ``red`` holds ``(pivot_col, row)`` pairs with primitive rows and positive
    pivots.  Returns None when the row reduces to zero; otherwise the row is
    normalized primitive with a positive pivot entry.
    """
    for pc, pr in red:
        x = row[pc]
        if x:
            p = pr[pc]
            g = gcd(abs(x), p)
            a, b = p // g, x // g
            for j in range(len(row)):
                row[j] = a * row[j] - b * pr[j]
    piv = next((j for j, x in enumerate(row) if x), None)
    if piv is None:
        return None
    g = 0
    for x in row:
        g = gcd(g, abs(x))
    if row[piv] < 0:
        g = -g
    for j in range(len(row)):
        row[j] //= g
    return piv


def _int_echelon(rows: Mat) -> list:
    """Reduced row echelon data: sorted ``(pivot_col, primitive row)`` pairs."""
    red = []
    for r in _int_rows(rows):
        piv = _reduce_row(r, red)
        if piv is not None:
            red.append((piv, r))
    red.sort()
    # back-eliminate so every pivot column is clear in the other rows
    for k in range(len(red) - 1, -1, -1):
        pc, pr = red[k]
        p = pr[pc]
        for i in range(k):
            row = red[i][1]
            x = row[pc]
            if x:
                g = gcd(abs(x), p)
                a, b = p // g, x // g
                for j in range(len(row)):
                    row[j] = a * row[j] - b * pr[j]
                gg = 0
                for y in row:
                    gg = gcd(gg, abs(y))
                if row[red[i][0]] < 0:
                    gg = -gg
                for j in range(len(row)):
                    row[j] //= gg
    return red


def rank(rows: Mat) -> int:
    """Rank over ℚ by fraction-free elimination."""
    red = []
    for r in _int_rows(rows):
        piv = _reduce_row(r, red)
        if piv is not None:
            red.append((piv, r))
    return len(red)


def det(rows: Mat):
    """Determinant of a square matrix; Bareiss on ints, Gaussian on Fractions."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("det of a non-square matrix")
    if all(isinstance(x, int) for r in rows for x in r):
        a = [list(r) for r in rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if piv is None:
                    return 0
                a[k], a[piv] = a[piv], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]
    m = [list(map(Fraction, r)) for r in rows]
    out = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            out = -out
        out *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            if m[i][k] != 0:
                f = m[i][k] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return out


def solve(rows: Mat, rhs) -> tuple | None:
    """One exact solution of rows·x = rhs over ℚ, or None if inconsistent.

    Free variables are set to 0.
    """
    if not rows:
        return ()
    ncols = len(rows[0])
    m = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [a * inv for a in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    return tuple(x)


def inverse_rows(rows: Mat):
    """Exact inverse of a square matrix as ``(M, d)`` with inverse = M/d.

    M has integer entries and d is a positive integer.  Raises ValueError on a
    singular matrix.
    """
    n = len(rows)
    m = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [a * inv for a in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    den = 1
    for r in m:
        for x in r[n:]:
            den = den * x.denominator // gcd(den, x.denominator)
    return [tuple(int(x * den) for x in r[n:]) for r in m], den


def in_span(rows: Mat, v) -> bool:
    """Is v in the ℚ-span of the rows?"""
    base = []
    for r in _int_rows(rows):
        piv = _reduce_row(r, base)
        if piv is not None:
            base.append((piv, r))
    probe = _int_rows([tuple(v)])[0]
    return _reduce_row(probe, base) is None


# ---------------------------------------------------------------------------
# integer normal forms

def smith_with_basis(rows: Mat):
    """Diagonalize an integer matrix A by unimodular row/column operations.

    Returns ``(diag, basis)`` where ``diag`` is the list of nonzero diagonal
    entries (positive, one per matrix rank) and ``basis`` is a unimodular
    ℤ-basis of the ambient column space such that

        row-lattice(A) = span_ℤ { diag[i] · basis[i] }.

    Consequently ``basis[:len(diag)]`` is a basis of the *saturation* of the
    row lattice, ``basis[len(diag):]`` is a complementary basis, and
    ``prod(diag)`` is the index of the row lattice inside its saturation.
    (Divisibility ordering of ``diag`` is not enforced; none of the uses here
    needs it.)
    """
    a = [list(map(int, r)) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    w = [[int(i == j) for j in range(ncols)] for i in range(ncols)]  # V^{-1}

    def col_op(j, i, c):  # col_j += c * col_i  ⇒  row_i of w -= c * row_j
        for k in range(nrows):
            a[k][j] += c * a[k][i]
        w[i] = [x - c * y for x, y in zip(w[i], w[j])]

    def col_swap(i, j):
        for k in range(nrows):
            a[k][i], a[k][j] = a[k][j], a[k][i]
        w[i], w[j] = w[j], w[i]

    def col_neg(i):
        for k in range(nrows):
            a[k][i] = -a[k][i]
        w[i] = [-x for x in w[i]]

    t = 0
    diag = []
    while True:
        piv = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        pi, pj = piv
        if pi != t:
            a[pi], a[t] = a[t], a[pi]
        if pj != t:
            col_swap(pj, t)
        # chase remainders until row t and column t are clean beyond (t, t)
        dirty = True
        while dirty:
            dirty = False
            for j in range(t + 1, ncols):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_op(j, t, -q)
                    if a[t][j] != 0:  # remainder smaller than pivot: swap in
                        col_swap(j, t)
                        dirty = True
            for i in range(t + 1, nrows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t] != 0:
                        a[i], a[t] = a[t], a[i]
                        dirty = True
        if a[t][t] < 0:
            col_neg(t)
        diag.append(a[t][t])
        t += 1
        if t == nrows or t == ncols:
            break
    return diag, [tuple(r) for r in w]


def saturation_basis(rows: Mat) -> list:
    """ℤ-basis of (ℚ-span of rows) ∩ ℤ^n."""
    diag, basis = smith_with_basis(rows)
    return basis[: len(diag)]


def complement_basis(rows: Mat) -> list:
    """ℤ-basis complementary to the saturation of the row lattice."""
    diag, basis = smith_with_basis(rows)
    return basis[len(diag):]


def sublattice_index(rows: Mat) -> int:
    """Index of the row lattice inside its saturation (1 for empty input)."""
    diag, _ = smith_with_basis(rows)
    out = 1
    for d in diag:
        out *= d
    return out


def kernel_basis(rows: Mat, ncols: int) -> list:
    """Saturated ℤ-basis of {x ∈ ℤ^ncols : rows · x = 0}."""
    red = _int_echelon(rows)
    pivots = [pc for pc, _ in red]
    pivot_set = set(pivots)
    vecs = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [0] * ncols
        v[f] = 1
        den = 1
        for pc, pr in red:
            if pr[f]:
                den = den * pr[pc] // gcd(den, pr[pc])
        v[f] = den
        for pc, pr in red:
            if pr[f]:
                v[pc] = -pr[f] * (den // pr[pc])
        vecs.append(primitive(tuple(v)))
    if not vecs:
        return []
    return saturation_basis(vecs)


def canonical_span_rows(rows: Mat) -> tuple:
    """Canonical key for the ℚ-span of the rows: primitive RREF basis."""
    return tuple(tuple(row) for _, row in _int_echelon(rows))


def coordinates_in_basis(basis: Mat, v):
    """Coefficients of v in the given basis (rows), or None if outside."""
    if not basis:
        return () if is_zero(v) else None
    cols = list(zip(*basis))
    sol = solve(cols, v)
    return sol


def solve_dot_one(phi) -> Vec:
    """Integer x with phi·x = 1 for a primitive integer covector phi."""
    n = len(phi)
    g, coeffs = 0, [0] * n
    for i, a in enumerate(phi):
        if a == 0:
            continue
        if g == 0:
            g, coeffs = abs(a), [0] * n
            coeffs[i] = 1 if a > 0 else -1
            continue
        # extended gcd of g and a
        old_r, rr = g, abs(a)
        old_s, s = 1, 0
        while rr:
            q = old_r // rr
            old_r, rr = rr, old_r - q * rr
            old_s, s = s, old_s - q * s
        # old_r = gcd, old_s*g + t*|a| = old_r
        t = (old_r - old_s * g) // abs(a)
        coeffs = [old_s * c for c in coeffs]
        coeffs[i] = t if a > 0 else -t
        g = old_r
        if g == 1:
            break
    if g != 1:
        raise ValueError("covector is not primitive")
    return tuple(coeffs)
