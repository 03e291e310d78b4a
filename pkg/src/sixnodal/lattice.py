"""Exact engine for rank-2 lattices with integral symmetric pairing.

Specialized to the Gram matrix [[6,6],[6,2]] (discriminant -24): reflection
group, (-10)-class orbits, chamber decomposition of the positive cone, and
the transfer of a rank-2 middle-cohomology lattice with <h^2,h^2>=3 to the
degree-2 side.  Coordinates always live in the ordered basis (g, tau);
isometries act by left multiplication on coordinate columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from ._qlinalg import Q


class LatticeError(ValueError):
    pass


@dataclass(frozen=True)
class QuadExtScalar:
    """Exact scalar a + b*sqrt(d) with rational a, b and squarefree d > 0."""

    a: Fraction
    b: Fraction
    d: int = 6

    @classmethod
    def of(cls, x, d: int = 6) -> "QuadExtScalar":
        if isinstance(x, QuadExtScalar):
            if x.d != d:
                raise LatticeError("mixed radicands")
            return x
        return cls(Q(x), Fraction(0), d)

    @classmethod
    def sqrt_d(cls, d: int = 6) -> "QuadExtScalar":
        return cls(Fraction(0), Fraction(1), d)

    def _check(self, other) -> "QuadExtScalar":
        other = QuadExtScalar.of(other, self.d)
        return other

    def __add__(self, other):
        other = self._check(other)
        return QuadExtScalar(self.a + other.a, self.b + other.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtScalar(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        return QuadExtScalar(self.a * other.a + self.d * self.b * other.b,
                             self.a * other.b + self.b * other.a, self.d)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(d)."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return (self.b > 0) - (self.b < 0)
        if self.a > 0 and self.b > 0:
            return 1
        if self.a < 0 and self.b < 0:
            return -1
        # mixed signs: compare a^2 against d b^2
        lhs = self.a * self.a
        rhs = self.d * self.b * self.b
        if self.a > 0:  # b < 0
            return 1 if lhs > rhs else (-1 if lhs < rhs else 0)
        return -1 if lhs > rhs else (1 if lhs < rhs else 0)

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.d}))"


def _scalar(x):
    """Coerce to Fraction when possible, keep QuadExtScalar as is."""
    return x if isinstance(x, QuadExtScalar) else Q(x)


def _sign_of(x) -> int:
    if isinstance(x, QuadExtScalar):
        return x.sign()
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class GramContext:
    """2x2 symmetric nondegenerate integer Gram matrix."""

    entries: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self):
        e = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", e)
        if e[0][1] != e[1][0]:
            raise LatticeError("Gram matrix must be symmetric")
        if self.determinant() == 0:
            raise LatticeError("Gram matrix must be nondegenerate")

    def determinant(self) -> int:
        e = self.entries
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]

    def to_json(self):
        return [list(r) for r in self.entries]


J12 = GramContext(((6, 6), (6, 2)))
K12 = ((3, 3), (3, 7))  # middle-cohomology side; input to transfer_K_to_J


@dataclass(frozen=True)
class LatticeClass:
    """Integer (or exact-extension) pair x*g + y*tau over a Gram context."""

    x: object
    y: object
    ctx: GramContext = J12

    def __post_init__(self):
        object.__setattr__(self, "x", _scalar(self.x))
        object.__setattr__(self, "y", _scalar(self.y))

    # -- arithmetic --------------------------------------------------------
    def _same(self, other: "LatticeClass"):
        if self.ctx != other.ctx:
            raise LatticeError("Gram context mismatch")

    def __add__(self, other):
        self._same(other)
        return LatticeClass(self.x + other.x, self.y + other.y, self.ctx)

    def __sub__(self, other):
        self._same(other)
        return LatticeClass(self.x - other.x, self.y - other.y, self.ctx)

    def __neg__(self):
        return LatticeClass(-self.x, -self.y, self.ctx)

    def scale(self, c):
        return LatticeClass(self.x * c, self.y * c, self.ctx)

    def is_zero(self) -> bool:
        return _is_zero(self.x) and _is_zero(self.y)

    def is_integral(self) -> bool:
        return isinstance(self.x, Fraction) and self.x.denominator == 1 \
            and isinstance(self.y, Fraction) and self.y.denominator == 1

    def is_primitive(self) -> bool:
        return self.is_integral() and gcd(int(self.x), int(self.y)) == 1

    def coords(self):
        return (self.x, self.y)

    def to_json(self):
        if not self.is_integral():
            raise LatticeError("only integral classes serialize to JSON")
        return {"x": int(self.x), "y": int(self.y), "gram": self.ctx.to_json()}

    @classmethod
    def from_json(cls, data) -> "LatticeClass":
        gram = GramContext(tuple(tuple(r) for r in data["gram"]))
        return cls(data["x"], data["y"], gram)

    def __repr__(self):
        return f"({self.x})g + ({self.y})tau"


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QuadExtScalar) else x == 0


def g_class(ctx: GramContext = J12) -> LatticeClass:
    return LatticeClass(1, 0, ctx)


def tau_class(ctx: GramContext = J12) -> LatticeClass:
    return LatticeClass(0, 1, ctx)


def eval_form(v: LatticeClass, w: LatticeClass):
    """Bilinear pairing v^T G w."""
    if v.ctx != w.ctx:
        raise LatticeError("Gram context mismatch")
    e = v.ctx.entries
    return (v.x * (e[0][0] * w.x + e[0][1] * w.y)
            + v.y * (e[1][0] * w.x + e[1][1] * w.y))


def square(v: LatticeClass):
    return eval_form(v, v)


def divisibility(v: LatticeClass) -> int:
    """gcd of the pairings with the basis; 0 exactly for the zero class."""
    a = eval_form(v, g_class(v.ctx))
    b = eval_form(v, tau_class(v.ctx))
    if not (isinstance(a, Fraction) and isinstance(b, Fraction)):
        raise LatticeError("divisibility needs an integral class")
    return gcd(int(a), int(b))


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    """2x2 integer matrix with M^T G M = G, acting on coordinate columns."""

    matrix: tuple[tuple[int, int], tuple[int, int]]
    ctx: GramContext = J12
    name: str | None = None

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        if not is_isometry(m, self.ctx):
            raise LatticeError(f"matrix {m} is not an isometry of {self.ctx.entries}")

    def apply(self, v: LatticeClass) -> LatticeClass:
        if v.ctx != self.ctx:
            raise LatticeError("Gram context mismatch")
        m = self.matrix
        return LatticeClass(m[0][0] * v.x + m[0][1] * v.y,
                            m[1][0] * v.x + m[1][1] * v.y, v.ctx)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        if self.ctx != other.ctx:
            raise LatticeError("Gram context mismatch")
        a, b = self.matrix, other.matrix
        prod = tuple(tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2))
                     for i in range(2))
        name = None
        if self.name and other.name:
            name = self.name + other.name
        return Isometry(prod, self.ctx, name)

    def __repr__(self):
        return f"Isometry({self.name or self.matrix})"


def is_isometry(m, ctx: GramContext) -> bool:
    """True iff m^T G m = G."""
    g = ctx.entries
    mt_g_m = [[sum(m[k][i] * g[k][l] * m[l][j] for k in range(2) for l in range(2))
               for j in range(2)] for i in range(2)]
    return all(mt_g_m[i][j] == g[i][j] for i in range(2) for j in range(2))


# columns are the images of g and tau
R1 = Isometry(((1, 2), (0, -1)), J12, "R1")
R2 = Isometry(((-1, 0), (6, 1)), J12, "R2")
R3 = Isometry(((11, 20), (-6, -11)), J12, "R3")
IDENTITY = Isometry(((1, 0), (0, 1)), J12, "I")

_NAMED = {"R1": R1, "R2": R2, "R3": R3, "I": IDENTITY}


def word_isometry(word: str) -> Isometry:
    """Compose named reflections, e.g. 'R1R2' or 'R1R2R1'."""
    out = IDENTITY
    i = 0
    while i < len(word):
        if word[i] == "I":
            i += 1
            continue
        tag = word[i:i + 2]
        if tag not in _NAMED:
            raise LatticeError(f"unknown isometry name at {word[i:]!r}")
        out = out @ _NAMED[tag]
        i += 2
    return out


def apply_isometry(iso: Isometry, v: LatticeClass) -> LatticeClass:
    return iso.apply(v)


# ---------------------------------------------------------------------------
# orbits of the reflection group on the named class families

_ORBIT_SEEDS = {
    # first two entries from the tables, then the two-step recursion
    "rho": (((3, -2), (7, -4)), "R1R2"),
    "rho_dual": (((-1, 2), (-1, 4)), "R2R1"),
    "alpha": (((7, -3), (17, -9)), "R1R2"),
    "alpha_dual": (((1, 3), (-1, 9)), "R2R1"),
}


def orbit_classes(kind: str, count: int, ctx: GramContext = J12) -> list[LatticeClass]:
    """First `count` entries of the recursive class sequence of the given kind."""
    if kind not in _ORBIT_SEEDS:
        raise LatticeError(f"unknown orbit kind {kind!r}")
    if count < 1:
        raise LatticeError("count must be >= 1")
    seeds, word = _ORBIT_SEEDS[kind]
    step = word_isometry(word)
    out = [LatticeClass(x, y, ctx) for x, y in seeds]
    while len(out) < count:
        out.append(step.apply(out[-2]))
    return out[:count]


# ---------------------------------------------------------------------------
# positive cone and chambers

MEMBERSHIP_VALUES = ("interior_P", "boundary_P", "interior_negP", "boundary_negP", "outside")


def positive_cone_membership(v: LatticeClass) -> str:
    """Classify v against the component P of the positive cone containing g.

    Boundary membership is decided exactly in Q(sqrt(6)); classes may carry
    QuadExtScalar coordinates for that purpose.  The zero class is rejected.
    """
    if v.is_zero():
        raise LatticeError("zero class has no cone position")
    q = square(v)
    s = _sign_of(q)
    pg = _sign_of(eval_form(v, g_class(v.ctx)))
    if s > 0:
        return "interior_P" if pg > 0 else "interior_negP"
    if s == 0:
        return "boundary_P" if pg > 0 else "boundary_negP"
    return "outside"


def isotropic_generators(ctx: GramContext = J12) -> tuple[LatticeClass, LatticeClass]:
    """The two boundary rays of P: g - (3 - sqrt6) tau and (3 + sqrt6) tau - g."""
    if ctx != J12:
        raise LatticeError("isotropic generators are tabulated for J12 only")
    r6 = QuadExtScalar.sqrt_d(6)
    one = QuadExtScalar.of(1)
    three = QuadExtScalar.of(3)
    return (LatticeClass(one, -(three - r6), ctx),
            LatticeClass(-one, three + r6, ctx))


def chamber_ray(j: int, ctx: GramContext = J12) -> LatticeClass:
    """Wall ray s_j: alpha_j for j >= 1, alpha^v_{1-j} for j <= 0."""
    if j >= 1:
        return orbit_classes("alpha", j, ctx)[j - 1]
    return orbit_classes("alpha_dual", 1 - j, ctx)[-j]


def wall_class(j: int, ctx: GramContext = J12) -> LatticeClass:
    """(-10)-class orthogonal to chamber_ray(j): rho_j or rho^v_{1-j}."""
    if j >= 1:
        return orbit_classes("rho", j, ctx)[j - 1]
    return orbit_classes("rho_dual", 1 - j, ctx)[-j]


def _coords_in_rays(v: LatticeClass, r1: LatticeClass, r2: LatticeClass):
    """Solve v = a r1 + b r2 over Q (rays are an integral basis here)."""
    det = r1.x * r2.y - r2.x * r1.y
    if det == 0:
        raise LatticeError("degenerate ray pair")
    a = (v.x * r2.y - r2.x * v.y) / det
    b = (r1.x * v.y - v.x * r1.y) / det
    return a, b


class ChamberLocation(NamedTuple):
    k: int                     # chamber index (lower one when on a wall)
    indices: tuple[int, ...]   # one chamber, or both adjacent ones on a wall
    word: tuple[str, ...]      # reflections mapping v into chamber 0 (even k) or -1 (odd)
    coords: tuple[Fraction, Fraction]  # coordinates in (s_k, s_{k+1})


def chamber_locate(v: LatticeClass, max_index: int = 4096) -> ChamberLocation:
    """Locate a primitive interior class in the chamber fan.

    Chamber k is Cone(s_k, s_{k+1}) with s_1 = alpha_1, s_0 = alpha_1^v.
    Walls report both adjacent indices.  The reflection word (applied left to
    right) moves v into chamber 0 when k is even; parity of the index is
    preserved by the reflection group, so odd chambers walk to chamber -1.
    """
    if positive_cone_membership(v) != "interior_P":
        raise LatticeError("class not in the interior of P")
    if not v.is_primitive():
        raise LatticeError("class must be primitive and integral")

    a, b = _coords_in_rays(v, chamber_ray(0, v.ctx), chamber_ray(1, v.ctx))
    if a < 0:
        candidates = range(1, max_index)
    elif b < 0:
        candidates = range(-1, -max_index, -1)
    else:
        candidates = [0]
    k = None
    coords = (a, b)
    for kk in candidates:
        a, b = _coords_in_rays(v, chamber_ray(kk, v.ctx), chamber_ray(kk + 1, v.ctx))
        if a >= 0 and b >= 0:
            k = kk
            coords = (a, b)
            break
    if k is None:
        raise LatticeError("chamber walk exceeded max_index")

    if a == 0:      # v on the ray s_{k+1}: wall between k and k+1
        indices = (k, k + 1)
    elif b == 0:    # v on the ray s_k: wall between k-1 and k
        indices = (k - 1, k)
        k = k - 1
    else:
        indices = (k,)

    word: list[str] = []
    kk = indices[0] if len(indices) == 1 else indices[1]
    while kk not in (0, -1):
        if kk > 0:
            word.append("R1")   # chamber j -> -j
            kk = -kk
        else:
            word.append("R2")   # chamber j -> -2-j
            kk = -2 - kk
    return ChamberLocation(indices[0], indices, tuple(word), coords)


def nef_test(v: LatticeClass, k: int = 0) -> bool:
    """Dual-cone test: v is nef for the model of chamber k iff it pairs
    nonnegatively with the two inward wall classes of that chamber."""
    s_lo, s_hi = chamber_ray(k, v.ctx), chamber_ray(k + 1, v.ctx)
    t_lo, t_hi = wall_class(k, v.ctx), wall_class(k + 1, v.ctx)
    n_lo = t_lo if _sign_of(eval_form(s_hi, t_lo)) > 0 else -t_lo
    n_hi = t_hi if _sign_of(eval_form(s_lo, t_hi)) > 0 else -t_hi
    return _sign_of(eval_form(v, n_lo)) >= 0 and _sign_of(eval_form(v, n_hi)) >= 0


# ---------------------------------------------------------------------------
# representation problem


@dataclass(frozen=True)
class RepresentResult:
    status: str                      # "witness" | "none" | "inconclusive"
    witness: LatticeClass | None = None
    certificate: str | None = None
    bound: int = 0

    def is_witness(self):
        return self.status == "witness"


def represents(n: int, bound: int = 10_000, ctx: GramContext = J12) -> RepresentResult:
    """Witness v with Q(v) = n, or a certificate of non-representation.

    For J12 the form is Q(x,y) = 6x^2 + 12xy + 2y^2 = 2((y+3x)^2 - 6x^2), so
    completing the square reduces to the Pell form u^2 - 6x^2 = n/2 with
    congruence obstructions mod 3 and mod 8; n = 0 is excluded (apart from
    the zero class) because 6 is not a square.  Exhaustive search runs over
    max(|x|,|y|) <= bound; exhaustion without a certificate is reported as
    inconclusive, which is distinct from a certified NoneCertificate.
    """
    if ctx == J12:
        if n % 2 != 0:
            return RepresentResult("none", None,
                                   f"Q(x,y) = 2((y+3x)^2 - 6x^2) is even; {n} is odd", 0)
        if n == 0:
            return RepresentResult(
                "none", None,
                "only the zero class: (y+3x)^2 = 6x^2 forces x = 0 since the "
                "discriminant 24 of 3x^2+6xy+y^2 is not a square", 0)
        m = n // 2
        if m % 3 == 2:
            return RepresentResult(
                "none", None,
                f"u^2 - 6x^2 = {m} is insoluble: u^2 = {m % 3} (mod 3) has no solution", 0)
        if m % 8 in (5, 7):
            return RepresentResult(
                "none", None,
                f"u^2 - 6x^2 = {m} is insoluble mod 8 (value {m % 8} not attained)", 0)

    for radius in range(0, bound + 1):
        for x, y in _shell(radius):
            v = LatticeClass(x, y, ctx)
            if square(v) == n:
                if _sign_of(eval_form(v, g_class(ctx))) < 0:
                    v = -v
                return RepresentResult("witness", v, None, radius)
    return RepresentResult("inconclusive", None, None, bound)


def _shell(r: int):
    if r == 0:
        yield (0, 0)
        return
    for x in (-r, r):
        for y in range(-r, r + 1):
            yield (x, y)
    for y in (-r, r):
        for x in range(-r + 1, r):
            yield (x, y)


# ---------------------------------------------------------------------------
# Abel-Jacobi style lattice transfer


class TransferResult(NamedTuple):
    gram: GramContext
    tau_isotropic: bool   # degenerate flag: (tau,tau) = 0


def transfer_K_to_J(k_entries) -> TransferResult:
    """Transfer [[3,a],[a,t]] to [[6,2a],[2a,a^2-t]].

    Derivation: split T = (a/3)h^2 + z with z orthogonal to h^2, push through
    (g,g) = 2<h^2,h^2> = 6 and (alpha z1, alpha z2) = -<z1,z2> with g
    orthogonal to the image of (h^2)-perp.  The determinant comes out as
    -2 det(K).
    """
    k = tuple(tuple(int(x) for x in row) for row in k_entries)
    if k[0][1] != k[1][0]:
        raise LatticeError("K must be symmetric")
    if k[0][0] != 3:
        raise LatticeError("transfer requires <h^2,h^2> = 3")
    a, t = k[0][1], k[1][1]
    det_k = 3 * t - a * a
    if det_k == 0:
        raise LatticeError("degenerate input lattice")
    gram = GramContext(((6, 2 * a), (2 * a, a * a - t)))
    assert gram.determinant() == -2 * det_k
    return TransferResult(gram, a * a - t == 0)


def special_discriminant(d: int) -> bool:
    """True iff d = 0 or 2 (mod 6) and d > 6."""
    return d > 6 and d % 6 in (0, 2)
