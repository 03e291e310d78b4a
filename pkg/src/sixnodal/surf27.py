"""Combinatorics of the cubic-surface Picard lattice.

Basis L, E1..E6 with L^2 = 1, Ei^2 = -1 and distinct basis classes
orthogonal (the off-diagonal sign follows the standard convention; the
printed one would make the form degenerate).  Enumerates the 27 line
classes, the 72 disjoint sextuples, the 36 double-sixes, and realizes the
double-six involution as an explicit lattice automorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._qlinalg import inverse, mat, mat_mul, transpose


class Surf27Error(ValueError):
    pass


@dataclass(frozen=True)
class PicClass:
    """d*L + sum m_i E_i with pairing d d' - sum m_i m_i'."""

    d: int
    m: tuple[int, int, int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if len(self.m) != 6:
            raise Surf27Error("need six exceptional coordinates")

    def dot(self, other: "PicClass") -> int:
        return self.d * other.d - sum(a * b for a, b in zip(self.m, other.m))

    def vector(self) -> tuple[int, ...]:
        return (self.d,) + self.m

    @classmethod
    def from_vector(cls, v) -> "PicClass":
        return cls(int(v[0]), tuple(int(x) for x in v[1:]))

    def __repr__(self):
        bits = []
        if self.d:
            bits.append(f"{self.d}L" if self.d != 1 else "L")
        for i, c in enumerate(self.m):
            if c:
                bits.append(f"{'+' if c > 0 else '-'}{'' if abs(c) == 1 else abs(c)}E{i+1}")
        return "".join(bits) or "0"


K_CLASS = PicClass(-3, (1, 1, 1, 1, 1, 1))

E = [PicClass(0, tuple(1 if j == i else 0 for j in range(6))) for i in range(6)]
L = PicClass(1, (0,) * 6)


@lru_cache(maxsize=1)
def _line_classes_cached() -> tuple[PicClass, ...]:
    out = []
    for d in range(-1, 4):
        for m in itertools.product(range(-2, 3), repeat=6):
            c = PicClass(d, m)
            if c.dot(c) == -1 and c.dot(K_CLASS) == -1:
                out.append(c)
    return tuple(out)


def line_classes() -> list[PicClass]:
    """All classes with C.C = -1 and C.K = -1.

    Brute force over a box that provably contains them: the two conditions
    give 3d + sum(m) = 1 and d^2 - sum(m^2) = -1, and Cauchy-Schwarz then
    pins d to {0,1,2} and |m_i| <= 2.
    """
    return list(_line_classes_cached())


def disjoint_sextuples(lines=None) -> list[tuple[PicClass, ...]]:
    """Unordered sextuples of pairwise-disjoint (C.C' = 0) line classes."""
    lines = list(lines) if lines is not None else line_classes()
    n = len(lines)
    meets = [[lines[i].dot(lines[j]) != 0 for j in range(n)] for i in range(n)]
    out: list[tuple[PicClass, ...]] = []

    def extend(start: int, chosen: list[int]):
        if len(chosen) == 6:
            out.append(tuple(lines[i] for i in chosen))
            return
        for i in range(start, n):
            if all(not meets[i][j] for j in chosen):
                chosen.append(i)
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    return out


def partner_sextuple(sextuple) -> tuple[PicClass, ...]:
    """The unique partner: C_i' meets C_j exactly when i != j."""
    lines = line_classes()
    partners = []
    for i, ci in enumerate(sextuple):
        matches = [c for c in lines
                   if all(c.dot(cj) == (0 if j == i else 1)
                          for j, cj in enumerate(sextuple))]
        if len(matches) != 1:
            raise Surf27Error("input is not a disjoint sextuple")
        partners.append(matches[0])
    return tuple(partners)


def double_sixes() -> list[frozenset]:
    """The 36 ways of pairing the 72 sextuples by the involution."""
    seen = set()
    out = []
    for s in disjoint_sextuples():
        key = frozenset(s)
        if key in seen:
            continue
        p = frozenset(partner_sextuple(s))
        seen.add(key)
        seen.add(p)
        out.append(frozenset((key, p)))
    return out


@dataclass(frozen=True)
class PicAutomorphism:
    """Integer matrix acting on (L, E1..E6) coordinate columns."""

    matrix: tuple

    def apply(self, c: PicClass) -> PicClass:
        v = c.vector()
        image = tuple(sum(self.matrix[i][j] * v[j] for j in range(7)) for i in range(7))
        return PicClass.from_vector(image)

    def is_isometry(self) -> bool:
        gram = [[Fraction(0)] * 7 for _ in range(7)]
        gram[0][0] = Fraction(1)
        for i in range(1, 7):
            gram[i][i] = Fraction(-1)
        m = mat(self.matrix)
        return mat_mul(mat_mul(transpose(m), mat(gram)), m) == mat(gram)

    def order_two(self) -> bool:
        m = mat(self.matrix)
        sq = mat_mul(m, m)
        return all(sq[i][j] == (1 if i == j else 0) for i in range(7) for j in range(7))


def double_six_involution(sextuple) -> PicAutomorphism:
    """Lattice automorphism exchanging a disjoint sextuple with its partner.

    Determined by C_i -> C_i', K -> K: the seven classes K, C_1..C_6 span a
    finite-index sublattice, so the matrix is solved over Q and then checked
    to be integral.
    """
    partner = partner_sextuple(sextuple)
    basis = mat([K_CLASS.vector()] + [c.vector() for c in sextuple])
    images = mat([K_CLASS.vector()] + [c.vector() for c in partner])
    # columns are the basis classes: solve M * basis^T = images^T
    m = mat_mul(transpose(images), inverse(transpose(basis)))
    rows = []
    for row in m:
        ints = []
        for x in row:
            if x.denominator != 1:
                raise Surf27Error("involution matrix is not integral")
            ints.append(int(x))
        rows.append(tuple(ints))
    out = PicAutomorphism(tuple(rows))
    if not (out.is_isometry() and out.order_two()):
        raise Surf27Error("constructed map is not an order-2 isometry")
    return out
