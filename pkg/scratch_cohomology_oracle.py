"""Scratch: freeze oracle values for the cohomology test suite."""
import sys
sys.path.insert(0, "src")

from fractions import Fraction

from tropeci.linalg import det, rank
from tropeci.polytopes import LatticePolytope, mixed_volume_ie

# ---------------------------------------------------------------- Gram / AF
P1 = LatticePolytope([(0, 0), (1, 0), (0, 1)])                  # unit triangle
P2 = LatticePolytope([(0, 0), (1, 0), (1, 1), (0, 1)])          # unit square
P3 = LatticePolytope([(0, 0), (2, 0), (3, 1), (1, 2), (0, 1)])  # pentagon

polys = [P1, P2, P3]
G = [[mixed_volume_ie([a, b]) for b in polys] for a in polys]
print("Gram:", G)

# signature via Descartes on the characteristic polynomial (independent route)
a, b, c = G[0], G[1], G[2]
tr = a[0] + b[1] + c[2]
m2 = (a[0] * b[1] - a[1] * b[0]) + (a[0] * c[2] - a[2] * c[0]) + \
     (b[1] * c[2] - b[2] * c[1])
d3 = det(G)
# p(x) = x^3 - tr x^2 + m2 x - d3
coeffs = [1, -tr, m2, -d3]
print("char poly coeffs:", coeffs)


def sign_changes(cs):
    cs = [x for x in cs if x != 0]
    return sum(1 for u, v in zip(cs, cs[1:]) if (u > 0) != (v > 0))


n_zero = 0
while coeffs[-1] == 0:
    coeffs.pop()
    n_zero += 1
n_pos = sign_changes(coeffs)
neg = [(-1) ** i * c for i, c in enumerate(coeffs)]
n_neg = sign_changes(neg)
print("signature:", (n_pos, n_neg, n_zero))

# AF numbers for (P2, P3)
s11 = mixed_volume_ie([P2, P2])
s22 = mixed_volume_ie([P3, P3])
s12 = mixed_volume_ie([P2, P3])
print("AF:", s11, s22, s12, "holds:", s12 * s12 >= s11 * s22)

# homothetic pair (hexagon, 2*hexagon)
HEX = LatticePolytope([(0, 0), (1, 0), (0, 1), (2, 1), (1, 2), (2, 2)])
HEX2 = HEX.dilate(2)
Gh = [[mixed_volume_ie([x, y]) for y in (HEX, HEX2)] for x in (HEX, HEX2)]
print("homothetic Gram:", Gh)

# ------------------------------------------------- two-plane fan atomics
SQ12 = LatticePolytope([(0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 0), (0, 1, 0, 0)])
SQ34 = LatticePolytope([(0, 0, 0, 0), (0, 0, 1, 0), (0, 0, 1, 1), (0, 0, 0, 1)])
MMF = mixed_volume_ie([SQ12, SQ12, SQ34, SQ34])
MNF_a = mixed_volume_ie([SQ12, SQ34, SQ12, SQ12])
MNF_b = mixed_volume_ie([SQ12, SQ34, SQ34, SQ34])
print("(MMF) oracle:", MMF)           # expect 4
print("(MNF) oracle:", MNF_a + MNF_b)  # expect 0
print("squares degenerate:", mixed_volume_ie([SQ12] * 4))  # expect 0

# ------------------------------------------------- line fixtures (skewness)
def homog(p):
    return tuple(p) + (1,) if len(p) == 3 else tuple(p)


def lines_meet(l1, l2):
    rows = [homog(l1[0]), homog(l1[1]), homog(l2[0]), homog(l2[1])]
    return det([list(r) for r in rows]) == 0


# type 6 fixture: two skew lines + three pairwise-skew transversals
skew1 = ((0, 0, 0), (1, 0, 0))
skew2 = ((0, 0, 1), (0, 1, 1))
trans = [((1, 0, 0), (0, 1, 1)), ((2, 0, 0), (0, 3, 1)), ((-1, 0, 0), (0, -1, 1))]
print("skew pair meets:", lines_meet(skew1, skew2))  # expect False
for i, t in enumerate(trans):
    print(f"t{i} meets skew1/skew2:", lines_meet(t, skew1), lines_meet(t, skew2))
for i in range(3):
    for j in range(i + 1, 3):
        print(f"t{i} meets t{j}:", lines_meet(trans[i], trans[j]))

# type 4 fixture
l1 = ((0, 0, 0), (0, 1, 0))      # y-axis, in z=0, through a1=origin
l2 = ((1, 0, 0), (1, 0, 1))      # in y=0, through a2=(1,0,0)
r1 = ((1, 0, 0), (1, 1, 0))      # in z=0, through a2
r2 = ((0, 0, 0), (0, 0, 1))      # z-axis, in y=0, through a1
print("type4 incidences:", [lines_meet(a, b) for a in (l1, l2) for b in (r1, r2)])
print("l1,l2 skew:", not lines_meet(l1, l2), " r1,r2 skew:", not lines_meet(r1, r2))

# type 5 fixture
axis = ((0, 0, 0), (1, 0, 0))
rr = [((1, 0, 0), (1, 1, 1)), ((2, 0, 0), (2, 1, -1)), ((3, 0, 0), (3, 0, 1))]
print("type5 incidences:", [lines_meet(axis, r) for r in rr])
print("type5 R pairwise:", [lines_meet(rr[i], rr[j])
                            for i in range(3) for j in range(i + 1, 3)])
