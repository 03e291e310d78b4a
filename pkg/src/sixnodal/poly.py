"""Exact multivariate polynomial kernel over arbitrary-precision rationals.

Sparse exponent-map representation, graded-lex normalization for printing.
Carries the determinant/Jacobian/resultant machinery plus a multiprecision
complex root finder (rational roots are extracted exactly, the rest go
through an Aberth-style simultaneous iteration built on mpmath scalars).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from ._qlinalg import Q, int_det_bareiss, mat, rank


class PolyError(ValueError):
    pass


class MacaulayInconclusive(PolyError):
    """Raised when every attempted Macaulay minor is degenerate."""


def _grlex_key(e):
    return (sum(e), tuple(-x for x in e))


class MPoly:
    """Multivariate polynomial with exact rational coefficients.

    Terms live in a dict mapping exponent tuples to nonzero Fractions.
    Instances are treated as immutable; all arithmetic returns new objects.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                c = Q(c)
                if c != 0:
                    if len(e) != nvars:
                        raise PolyError("exponent arity mismatch")
                    clean[tuple(e)] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: Q(c)})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def variables(cls, nvars: int) -> list["MPoly"]:
        return [cls.var(nvars, i) for i in range(nvars)]

    @classmethod
    def linear_form(cls, coeffs) -> "MPoly":
        n = len(coeffs)
        out = {}
        for i, c in enumerate(coeffs):
            c = Q(c)
            if c != 0:
                e = [0] * n
                e[i] = 1
                out[tuple(e)] = c
        return cls(n, out)

    # -- ring operations ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise PolyError("variable count mismatch")
            return other
        return MPoly.const(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return MPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = Q(other)
            if c == 0:
                return MPoly.zero(self.nvars)
            return MPoly(self.nvars, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolyError("negative power")
        result = MPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self.terms == self._coerce(other).terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def coefficient(self, e) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def partial(self, i: int) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return MPoly(self.nvars, out)

    def evaluate(self, point):
        """Evaluate at a point; works for Fraction, mpf/mpc, or mixed scalars."""
        if len(point) != self.nvars:
            raise PolyError("point arity mismatch")
        total = None
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                for _ in range(k):
                    term = term * x
            total = term if total is None else total + term
        return Fraction(0) if total is None else total

    def compose(self, substitutions: list["MPoly"]) -> "MPoly":
        """Substitute substitutions[i] for variable i."""
        if len(substitutions) != self.nvars:
            raise PolyError("substitution arity mismatch")
        n_out = substitutions[0].nvars if substitutions else 0
        if any(s.nvars != n_out for s in substitutions):
            raise PolyError("substitutions disagree on variable count")
        powers: list[dict[int, MPoly]] = [dict() for _ in range(self.nvars)]

        def power(i, k):
            if k not in powers[i]:
                powers[i][k] = substitutions[i] ** k
            return powers[i][k]

        out = MPoly.zero(n_out)
        for e, c in self.terms.items():
            term = MPoly.const(n_out, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def coefficients_in(self, i: int) -> dict[int, "MPoly"]:
        """Split into coefficients of powers of variable i (variable i removed
        from the exponent, arity preserved)."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            e2 = list(e)
            e2[i] = 0
            out.setdefault(k, {})[tuple(e2)] = c
        return {k: MPoly(self.nvars, t) for k, t in out.items()}

    def content_normalized(self) -> "MPoly":
        """Scale so coefficients are coprime integers, leading (grlex) > 0."""
        if not self.terms:
            return self
        lcm = 1
        for c in self.terms.values():
            lcm = lcm * c.denominator // gcd(lcm, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, abs(int(c * lcm)))
        scale = Fraction(lcm, g)
        lead = min(self.terms, key=_grlex_key)
        if self.terms[lead] < 0:
            scale = -scale
        return self * scale

    # -- serialization and printing ---------------------------------------
    def to_json(self) -> dict:
        terms = sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))
        return {
            "vars": self.nvars,
            "terms": [[list(e), f"{c.numerator}/{c.denominator}"] for e, c in terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MPoly":
        terms = {tuple(e): Fraction(c) for e, c in data["terms"]}
        return cls(data["vars"], terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in sorted(self.terms.items(), key=lambda t: _grlex_key(t[0])):
            mono = "*".join(
                f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k
            )
            if mono:
                bits.append(f"{c}*{mono}" if c != 1 else mono)
            else:
                bits.append(str(c))
        return " + ".join(bits)


def gradient(f: MPoly) -> list[MPoly]:
    """Partial derivatives in variable order."""
    return [f.partial(i) for i in range(f.nvars)]


def divide_exact(f: MPoly, g: MPoly) -> MPoly:
    """Exact quotient f/g; raises PolyError if g does not divide f."""
    if g.is_zero():
        raise PolyError("division by zero polynomial")
    g = f._coerce(g)
    quotient = MPoly.zero(f.nvars)
    rem = f
    g_lead = min(g.terms, key=_grlex_key)
    g_lc = g.terms[g_lead]
    while not rem.is_zero():
        r_lead = min(rem.terms, key=_grlex_key)
        diff = tuple(a - b for a, b in zip(r_lead, g_lead))
        if any(d < 0 for d in diff):
            raise PolyError("not an exact division")
        t = MPoly(f.nvars, {diff: rem.terms[r_lead] / g_lc})
        quotient = quotient + t
        rem = rem - t * g
    return quotient


def poly_det(m: list[list[MPoly]]) -> MPoly:
    """Exact determinant of a square matrix of polynomials.

    Expansion over column subsets (O(n 2^n) ring products), which beats both
    cofactor recursion and Bareiss for polynomial entries at these sizes.
    """
    n = len(m)
    if n == 0:
        raise PolyError("empty matrix")
    if any(len(row) != n for row in m):
        raise PolyError("matrix not square")
    nv = m[0][0].nvars
    if any(entry.nvars != nv for row in m for entry in row):
        raise PolyError("entries disagree on variable count")
    # state: dict mapping frozenset of used columns -> minor on the top rows
    states = {frozenset(): MPoly.const(nv, 1)}
    for i in range(n):
        new_states: dict = {}
        for used, val in states.items():
            if val.is_zero():
                continue
            sign_count = 0
            for j in range(n):
                if j in used:
                    sign_count += 1
                    continue
                entry = m[i][j]
                if entry.is_zero():
                    continue
                term = val * entry
                if (i + sign_count) % 2:
                    term = -term
                key = used | {j}
                acc = new_states.get(key)
                new_states[key] = term if acc is None else acc + term
        states = new_states
    full = frozenset(range(n))
    return states.get(full, MPoly.zero(nv))


def restrict_to_subspace(f: MPoly, basis) -> MPoly:
    """Compose f with the linear parametrization x = sum_i s_i basis[i]."""
    basis = [tuple(Q(x) for x in b) for b in basis]
    if not basis:
        raise PolyError("empty basis")
    if any(len(b) != f.nvars for b in basis):
        raise PolyError("basis vectors have wrong length")
    if rank(mat(basis)) != len(basis):
        raise PolyError("basis not linearly independent")
    k = len(basis)
    subs = [MPoly.linear_form([basis[i][j] for i in range(k)]) for j in range(f.nvars)]
    return f.compose(subs)


# ---------------------------------------------------------------------------
# dense univariate layer


class UPoly:
    """Dense univariate polynomial over the rationals, coeffs[i] ~ x^i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [Q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls):
        return cls([])

    @classmethod
    def const(cls, c):
        return cls([c])

    @classmethod
    def x(cls):
        return cls([0, 1])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        if self.is_zero():
            raise PolyError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, UPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return UPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])

    def __neg__(self):
        return UPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, UPoly):
            return UPoly([Q(other) * c for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __call__(self, x):
        total = 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def derivative(self) -> "UPoly":
        return UPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def divmod(self, other: "UPoly") -> tuple["UPoly", "UPoly"]:
        if other.is_zero():
            raise PolyError("division by zero")
        q = [Fraction(0)] * max(0, len(self.coeffs) - len(other.coeffs) + 1)
        rem = list(self.coeffs)
        d = other.degree()
        lc = other.leading()
        while len(rem) - 1 >= d and any(c != 0 for c in rem):
            while rem and rem[-1] == 0:
                rem.pop()
            if len(rem) - 1 < d:
                break
            k = len(rem) - 1 - d
            f = rem[-1] / lc
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            rem.pop()
        return UPoly(q), UPoly(rem)

    def monic(self) -> "UPoly":
        if self.is_zero():
            return self
        lc = self.leading()
        return UPoly([c / lc for c in self.coeffs])

    def gcd(self, other: "UPoly") -> "UPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def squarefree_decomposition(self) -> list[tuple["UPoly", int]]:
        """Yun's algorithm: [(q_k, k)] with self ~ prod q_k^k, q_k squarefree."""
        if self.degree() < 1:
            return []
        f = self.monic()
        d = f.derivative()
        a = f.gcd(d)
        out = []
        b = f.divmod(a)[0]
        c = d.divmod(a)[0]
        k = 1
        while b.degree() >= 1:
            z = c - b.derivative()
            g = b.gcd(z) if not z.is_zero() else b
            if g.degree() >= 1:
                out.append((g.monic(), k))
                b = b.divmod(g)[0]
                c = z.divmod(g)[0] if not z.is_zero() else c
            else:
                c = z
            if z.is_zero():
                break
            k += 1
        if b.degree() >= 1:
            out.append((b.monic(), k))
        return out

    def to_mpoly(self, nvars: int, i: int) -> MPoly:
        terms = {}
        for k, c in enumerate(self.coeffs):
            if c != 0:
                e = [0] * nvars
                e[i] = k
                terms[tuple(e)] = c
        return MPoly(nvars, terms)

    def __repr__(self):
        if self.is_zero():
            return "0"
        bits = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            bits.append(f"{c}" if i == 0 else (f"{c}*t^{i}" if i > 1 else f"{c}*t"))
        return " + ".join(bits)


def _det_generic(rows, zero, add, mul, neg):
    """Determinant by the column-subset DP in an arbitrary commutative ring."""
    n = len(rows)
    states = {frozenset(): None}  # None marks the multiplicative unit
    for i in range(n):
        new_states = {}
        for used, val in states.items():
            sign_count = 0
            for j in range(n):
                if j in used:
                    sign_count += 1
                    continue
                entry = rows[i][j]
                term = entry if val is None else mul(val, entry)
                if (i + sign_count) % 2:
                    term = neg(term)
                key = used | {j}
                acc = new_states.get(key)
                new_states[key] = term if acc is None else add(acc, term)
        states = new_states
    return states.get(frozenset(range(n)), zero)


def sylvester_resultant_upoly(f_coeffs: list[UPoly], g_coeffs: list[UPoly]) -> UPoly:
    """Resultant of two polynomials whose coefficients are themselves UPoly."""
    m = len(f_coeffs) - 1
    n = len(g_coeffs) - 1
    if m < 0 or n < 0:
        raise PolyError("zero polynomial in resultant")
    if m == 0 and n == 0:
        raise PolyError("both inputs constant in the eliminated variable")
    size = m + n
    zero = UPoly.zero()
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(f_coeffs)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(g_coeffs)):
            row[i + k] = c
        rows.append(row)
    return _det_generic(rows, zero, lambda a, b: a + b, lambda a, b: a * b, lambda a: -a)


def resultant_bivariate(f: MPoly, g: MPoly, eliminate: int) -> UPoly:
    """Sylvester resultant of two bivariate polynomials, eliminating the given
    variable; the output is univariate in the other one."""
    if f.nvars != 2 or g.nvars != 2:
        raise PolyError("resultant_bivariate expects two variables")
    keep = 1 - eliminate

    def upoly_coeffs(p: MPoly) -> list[UPoly]:
        split = p.coefficients_in(eliminate)
        deg = max(split, default=-1)
        out = []
        for k in range(deg + 1):
            coeff = split.get(k, MPoly.zero(2))
            cs = [Fraction(0)] * (coeff.degree() + 1 if not coeff.is_zero() else 0)
            for e, c in coeff.terms.items():
                cs[e[keep]] = c
            out.append(UPoly(cs))
        return out

    fc = upoly_coeffs(f)
    gc = upoly_coeffs(g)
    if len(fc) == 0 or len(gc) == 0:
        raise PolyError("zero polynomial in resultant")
    return sylvester_resultant_upoly(fc, gc)


# ---------------------------------------------------------------------------
# Macaulay resultant


def _monomials_of_degree(nvars: int, d: int):
    for bars in itertools.combinations(range(d + nvars - 1), nvars - 1):
        e = []
        prev = -1
        for b in bars:
            e.append(b - prev - 1)
            prev = b
        e.append(d + nvars - 2 - prev)
        yield tuple(e)


def macaulay_resultant(forms: list[MPoly], _retries: int = 4) -> Fraction:
    """Classical Macaulay resultant of n+1 homogeneous forms in n+1 variables.

    Computed as D/D' with D the determinant of the Macaulay matrix at the
    critical degree and D' the minor on non-reduced monomials.  A degenerate
    minor triggers retries under shuffled variable orders, then under seeded
    generic linear changes of coordinates (which rescale the resultant by a
    nonzero factor, so the zero/nonzero verdict survives); if every attempt
    degenerates a MacaulayInconclusive is raised.  Nonzero output certifies
    the forms have no common projective zero.
    """
    n = len(forms)
    if n < 2:
        raise PolyError("need at least two forms")
    if any(f.nvars != n for f in forms):
        raise PolyError("need n+1 forms in n+1 variables")
    degs = []
    for f in forms:
        if f.is_zero() or not f.is_homogeneous():
            raise PolyError("forms must be nonzero and homogeneous")
        degs.append(f.degree())

    rng = random.Random(20231114)
    perm = list(range(n))
    for _ in range(_retries):
        value = _macaulay_once([_permute_vars(f, perm) for f in forms],
                               [degs[i] for i in range(n)])
        if value is not None:
            return value
        perm = list(range(n))
        rng.shuffle(perm)
    # fully symmetric inputs defeat permutations; a generic substitution does not
    for _ in range(_retries):
        g = [[Fraction(rng.randrange(-5, 6)) for _ in range(n)] for _ in range(n)]
        from ._qlinalg import det as _qdet, mat as _qmat
        if _qdet(_qmat(g)) == 0:
            continue
        subs = [MPoly.linear_form(row) for row in g]
        value = _macaulay_once([f.compose(subs) for f in forms], degs)
        if value is not None:
            return value
    raise MacaulayInconclusive("degenerate Macaulay minor under all variable orders")


def _permute_vars(f: MPoly, perm: list[int]) -> MPoly:
    return MPoly(f.nvars, {tuple(e[perm[i]] for i in range(f.nvars)): c
                           for e, c in f.terms.items()})


def _macaulay_once(forms: list[MPoly], degs: list[int]) -> Fraction | None:
    n = len(forms)
    t = sum(d - 1 for d in degs) + 1
    monos = sorted(_monomials_of_degree(n, t), key=_grlex_key)
    index = {m: i for i, m in enumerate(monos)}
    big: list[list[Fraction]] = []
    reduced_flags = []
    for mono in monos:
        owners = [i for i in range(n) if mono[i] >= degs[i]]
        i = owners[0]
        reduced_flags.append(len(owners) == 1)
        shift = list(mono)
        shift[i] -= degs[i]
        row = [Fraction(0)] * len(monos)
        for e, c in forms[i].terms.items():
            target = tuple(a + b for a, b in zip(e, shift))
            row[index[target]] += c
        big.append(row)
    D = _det_rational_rows(big)
    sub_idx = [i for i, is_red in enumerate(reduced_flags) if not is_red]
    sub = [[big[i][j] for j in sub_idx] for i in sub_idx]
    Dp = _det_rational_rows(sub)
    if Dp == 0:
        return None
    return D / Dp


def _det_rational_rows(rows: list[list[Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    scale = Fraction(1)
    int_rows = []
    for row in rows:
        lcm = 1
        for x in row:
            d = x.denominator
            lcm = lcm * d // gcd(lcm, d)
        int_rows.append([int(x * lcm) for x in row])
        scale *= lcm
    return Fraction(int_det_bareiss(int_rows)) / scale


# ---------------------------------------------------------------------------
# root finding


@dataclass(frozen=True)
class ComplexMP:
    """Multiprecision complex scalar tagged with its working precision."""

    real: mpmath.mpf
    imag: mpmath.mpf
    prec: int

    def __post_init__(self):
        if self.prec < 64:
            raise PolyError("precision below 64 bits")

    @classmethod
    def from_mpc(cls, z, prec: int) -> "ComplexMP":
        with mpmath.workprec(prec + 64):
            return cls(mpmath.mpf(z.real), mpmath.mpf(z.imag), prec)

    def to_mpc(self):
        # constructors round to the ambient precision, so lift it first
        with mpmath.workprec(max(self.prec + 64, mpmath.mp.prec)):
            return mpmath.mpc(self.real, self.imag)

    def __repr__(self):
        return f"ComplexMP({self.real}, {self.imag}; {self.prec} bits)"


class RootFindingError(PolyError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or []


def _cauchy_radius(coeffs):
    lead = abs(coeffs[-1])
    return 1 + max(abs(c) for c in coeffs[:-1]) / lead if len(coeffs) > 1 else mpmath.mpf(1)


def aberth_roots(coeffs, prec: int, max_iter: int = 400):
    """Simultaneous (Aberth-style) iteration for all roots of a squarefree
    polynomial given by exact rational coefficients, low degree first."""
    deg = len(coeffs) - 1
    with mpmath.workprec(prec + 64):
        cs = [mpmath.mpc(c.numerator) / mpmath.mpc(c.denominator) for c in coeffs]
        dcs = [k * cs[k] for k in range(1, deg + 1)]

        def horner(zs, z):
            total = mpmath.mpc(0)
            for c in reversed(zs):
                total = total * z + c
            return total

        r = _cauchy_radius(cs)
        roots = [r * mpmath.exp(2j * mpmath.pi * (mpmath.mpf(k) / deg + mpmath.mpf(1) / (2 * deg) + mpmath.mpf(1) / 7))
                 for k in range(deg)]
        target = mpmath.mpf(2) ** (-(prec + 16))
        for _ in range(max_iter):
            moved = mpmath.mpf(0)
            for i in range(deg):
                z = roots[i]
                pv = horner(cs, z)
                dv = horner(dcs, z)
                if dv == 0:
                    roots[i] = z + mpmath.mpf(1) / 1024
                    moved = mpmath.mpf(1)
                    continue
                w = pv / dv
                s = mpmath.mpc(0)
                for j in range(deg):
                    if j != i:
                        s += 1 / (z - roots[j])
                denom = 1 - w * s
                corr = w / denom if denom != 0 else w
                roots[i] = z - corr
                moved = max(moved, abs(corr) / max(1, abs(roots[i])))
            if moved < target:
                break
        else:
            raise RootFindingError("Aberth iteration did not converge",
                                   partial=[ComplexMP.from_mpc(z, prec) for z in roots])
        return roots


def _rational_reconstruct(x, max_den: int) -> Fraction | None:
    """Continued-fraction reconstruction of a nearby rational."""
    a = x
    num0, num1 = 1, 0
    den0, den1 = 0, 1
    for _ in range(64):
        fl = mpmath.floor(a)
        ai = int(fl)
        num0, num1 = ai * num0 + num1, num0
        den0, den1 = ai * den0 + den1, den0
        if den0 > max_den:
            return None
        approx = Fraction(num0, den0) if den0 else None
        if approx is not None and abs(mpmath.mpf(approx.numerator) / approx.denominator - x) < mpmath.mpf(2) ** (-mpmath.mp.prec + 8):
            return approx
        frac = a - fl
        if frac == 0:
            break
        a = 1 / frac
    if den0 == 0:
        return None
    return Fraction(num0, den0)


def _coefficient_height_bits(p: UPoly) -> int:
    return max((abs(c.numerator).bit_length() + c.denominator.bit_length()
                for c in p.coeffs), default=1)


def _rational_roots_of_squarefree(p: UPoly, prec: int) -> tuple[list[Fraction], UPoly]:
    """Exactly find rational roots of a squarefree p and deflate them.

    Roots are probed numerically and reconstructed by continued fractions,
    then verified exactly; the probe precision scales with the coefficient
    height so large rational roots are still resolvable.  Linear factors
    are read off directly.
    """
    found = []
    remaining = p
    if remaining.coeffs and remaining.coeffs[0] == 0:
        found.append(Fraction(0))
        remaining = remaining.divmod(UPoly([0, 1]))[0]
    if remaining.degree() == 1:
        found.append(-remaining.coeffs[0] / remaining.coeffs[1])
        return found, UPoly([remaining.coeffs[1]])
    height_bits = _coefficient_height_bits(remaining)
    max_den = 1 << (height_bits + 16)
    # a rational root of height H needs ~2H bits to reconstruct; degrees here
    # are tiny, so probing at the height-aware precision is cheap
    probe_prec = min(max(192, prec, 2 * height_bits + 96), 1 << 14)
    if remaining.degree() >= 2:
        with mpmath.workprec(probe_prec + 64):
            try:
                approx = aberth_roots(list(remaining.coeffs), probe_prec)
            except RootFindingError:
                approx = []
            for z in approx:
                if abs(z.imag) > mpmath.mpf(2) ** (-probe_prec // 2):
                    continue
                cand = _rational_reconstruct(z.real, max_den)
                if cand is not None and remaining(cand) == 0:
                    found.append(cand)
                    remaining = remaining.divmod(UPoly([-cand, 1]))[0]
                if remaining.degree() == 1:
                    found.append(-remaining.coeffs[0] / remaining.coeffs[1])
                    remaining = UPoly([remaining.coeffs[1]])
                    break
    return found, remaining


def roots(p: UPoly, prec: int = 256):
    """All complex roots with multiplicities.

    Rational roots come back as exact Fractions (found numerically, then
    verified and deflated exactly); the rest are ComplexMP values from the
    Aberth iteration.  Residuals are checked against 2^(-prec/2) relative to
    the coefficient magnitude.
    """
    if p.degree() < 1:
        raise PolyError("degree must be >= 1")
    if prec < 64:
        raise PolyError("precision below 64 bits")
    out = []
    for q, mult in p.squarefree_decomposition():
        rational, rest = _rational_roots_of_squarefree(q, prec)
        for r in rational:
            out.append((r, mult))
        if rest.degree() >= 1:
            zs = aberth_roots(list(rest.coeffs), prec)
            with mpmath.workprec(prec + 64):
                scale = max(abs(mpmath.mpf(c.numerator) / c.denominator)
                            for c in p.coeffs)
                tol = mpmath.mpf(2) ** (-(prec // 2)) * max(1, scale)
                for z in zs:
                    resid = abs(_eval_rational_poly(p, z))
                    if resid > tol * max(1, abs(z)) ** p.degree():
                        raise RootFindingError(
                            f"residual {mpmath.nstr(resid, 8)} above tolerance",
                            partial=[ComplexMP.from_mpc(w, prec) for w in zs])
                    out.append((ComplexMP.from_mpc(z, prec), mult))
    total = sum(m for _, m in out)
    if total != p.degree():
        raise RootFindingError(f"found multiplicity total {total}, expected {p.degree()}",
                               partial=out)
    return out


def _eval_rational_poly(p: UPoly, z):
    total = mpmath.mpc(0)
    for c in reversed(p.coeffs):
        total = total * z + mpmath.mpf(c.numerator) / c.denominator
    return total
