import random
from fractions import Fraction
from itertools import combinations_with_replacement

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sixnodal.poly import (ComplexMP, MPoly, PolyError, UPoly, divide_exact,
                           gradient, macaulay_resultant, poly_det,
                           restrict_to_subspace, resultant_bivariate, roots)


def zero3():
    return MPoly.zero(3)


def random_poly(rng, nvars=3, deg=2, terms=4):
    out = MPoly.zero(nvars)
    for _ in range(terms):
        e = tuple(rng.randrange(0, deg + 1) for _ in range(nvars))
        out = out + MPoly(nvars, {e: Fraction(rng.randrange(-6, 7))})
    return out


def random_homogeneous(rng, nvars, deg):
    out = MPoly.zero(nvars)
    for combo in combinations_with_replacement(range(nvars), deg):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        c = rng.randrange(-5, 6)
        if c:
            out = out + MPoly(nvars, {tuple(e): Fraction(c)})
    return out


coeffs = st.integers(min_value=-9, max_value=9)


@st.composite
def mpolys(draw, nvars=3):
    n_terms = draw(st.integers(min_value=0, max_value=4))
    terms = {}
    for _ in range(n_terms):
        e = tuple(draw(st.integers(min_value=0, max_value=2)) for _ in range(nvars))
        terms[e] = Fraction(draw(coeffs))
    return MPoly(nvars, terms)


@given(mpolys(), mpolys(), mpolys())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f


def test_det_trivia():
    one = MPoly.const(3, 1)
    zero = MPoly.zero(3)
    x = MPoly.variables(3)
    assert poly_det([[one, zero, zero], [zero, one, zero], [zero, zero, one]]) == one
    assert poly_det([[x[0], zero, zero], [zero, x[1], zero], [zero, zero, x[2]]]) \
        == x[0] * x[1] * x[2]
    with pytest.raises(PolyError):
        poly_det([[one, zero]])


def test_det_multiplicative():
    rng = random.Random(3)
    for n in (2, 3):
        a = [[MPoly.const(1, rng.randrange(-5, 6)) for _ in range(n)] for _ in range(n)]
        b = [[MPoly.const(1, rng.randrange(-5, 6)) for _ in range(n)] for _ in range(n)]
        ab = [[sum((a[i][k] * b[k][j] for k in range(n)), MPoly.zero(1))
               for j in range(n)] for i in range(n)]
        assert poly_det(ab) == poly_det(a) * poly_det(b)


def test_scroll_matrix_determinant_vanishes_on_rank1_locus():
    # rows (x0,x1,x2), (x2,x3,x4), (y0,y1,y2) with generic linear last row:
    # substituting the rank-1 parametrization kills the determinant
    rng = random.Random(11)
    x = MPoly.variables(5)
    last = [MPoly.linear_form([Fraction(rng.randrange(-4, 5)) for _ in range(5)])
            for _ in range(3)]
    det = poly_det([[x[0], x[1], x[2]], [x[2], x[3], x[4]], last])
    # (u, v, w) -> (u^2, uv, uw, vw, w^2)
    u, v, w = MPoly.variables(3)
    param = [u * u, u * v, u * w, v * w, w * w]
    assert det.compose(param).is_zero()


def test_gradient_and_euler():
    x = MPoly.variables(3)
    f = x[0] * x[1] * x[2]
    assert gradient(f) == [x[1] * x[2], x[0] * x[2], x[0] * x[1]]
    rng = random.Random(5)
    cubic = random_homogeneous(rng, 4, 3)
    euler = sum((MPoly.var(4, i) * cubic.partial(i) for i in range(4)),
                MPoly.zero(4))
    assert euler == cubic * 3


def test_resultant_linear_forms():
    # res_x(x - a, x - b) is proportional to a - b; here a = y, b = 2y
    f = MPoly.var(2, 0) - MPoly.var(2, 1)
    g = MPoly.var(2, 0) - MPoly.var(2, 1) * 2
    r = resultant_bivariate(f, g, 0)
    assert r.degree() == 1 and r.coeffs[1] != 0


def test_resultant_self_is_zero():
    f = MPoly.var(2, 0) ** 3 - MPoly.var(2, 0) * MPoly.var(2, 1) + MPoly.const(2, 1)
    assert resultant_bivariate(f, f, 0).is_zero()


def test_resultant_common_root():
    # f = (x - y)(x - 2y), g = (x - y)(x - 3y) share the root x = y
    x, y = MPoly.variables(2)
    f = (x - y) * (x - 2 * y)
    g = (x - y) * (x - 3 * y)
    assert resultant_bivariate(f, g, 0).is_zero()


def test_macaulay_coordinate_squares():
    forms = [MPoly.var(4, i) ** 2 for i in range(4)]
    assert macaulay_resultant(forms) == 1


def test_macaulay_fermat_smooth():
    fermat = sum((MPoly.var(4, i) ** 3 for i in range(4)), MPoly.zero(4))
    val = macaulay_resultant(gradient(fermat))
    assert val == 3 ** 32  # each partial carries a factor 3; Res is octic in each


def test_macaulay_cayley_singular():
    x = MPoly.variables(4)
    cayley = x[0] * x[1] * x[2] + x[0] * x[1] * x[3] + x[0] * x[2] * x[3] \
        + x[1] * x[2] * x[3]
    parts = gradient(cayley)
    node = (1, 0, 0, 0)
    assert cayley.evaluate(node) == 0
    assert all(p.evaluate(node) == 0 for p in parts)
    assert macaulay_resultant(parts) == 0


def test_macaulay_matches_smoothness_spotchecks():
    rng = random.Random(19)
    smooth, singular = 0, 0
    for trial in range(25):
        if trial < 20:
            f = random_homogeneous(rng, 4, 3)
            if f.is_zero():
                continue
        else:
            # plant a node at the last coordinate point: x3*q + c with q, c
            # forms in the first three coordinates
            q = random_homogeneous(rng, 3, 2)
            c = random_homogeneous(rng, 3, 3)
            if q.is_zero():
                continue
            lift_q = MPoly(4, {e + (0,): v for e, v in q.terms.items()})
            lift_c = MPoly(4, {e + (0,): v for e, v in c.terms.items()})
            f = MPoly.var(4, 3) * lift_q + lift_c
        try:
            val = macaulay_resultant(gradient(f))
        except PolyError:
            continue
        sing_found = _has_singular_point(f, rng)
        if val != 0:
            smooth += 1
            assert not sing_found
        else:
            singular += 1
            if trial >= 20:
                # the planted point really is singular
                assert all(g.evaluate((0, 0, 0, 1)) == 0 for g in gradient(f))
    assert smooth >= 10 and singular >= 5


def _has_singular_point(f, rng, tries=200):
    parts = gradient(f)
    for _ in range(tries):
        p = tuple(Fraction(rng.randrange(-3, 4)) for _ in range(4))
        if all(x == 0 for x in p):
            continue
        if f.evaluate(p) == 0 and all(g.evaluate(p) == 0 for g in parts):
            return True
    return False


def test_roots_sqrt6():
    rs = roots(UPoly([-6, 0, 1]), 256)
    assert len(rs) == 2
    with mpmath.workprec(320):
        for r, mult in rs:
            assert mult == 1
            z = r.to_mpc()
            err = abs(abs(z.real) - mpmath.sqrt(6))
            assert err < mpmath.mpf(10) ** -50
            assert abs(z.imag) < mpmath.mpf(10) ** -50


def test_roots_exact_cube():
    p = UPoly([-1, 2])
    rs = roots(p * p * p, 128)
    assert rs == [(Fraction(1, 2), 3)]


def test_roots_multiplicity_sum_and_rational_divisors():
    rng = random.Random(23)
    for _ in range(10):
        coeffs = [Fraction(rng.randrange(-9, 10)) for _ in range(rng.randrange(3, 7))]
        if not coeffs[-1]:
            coeffs[-1] = Fraction(1)
        p = UPoly(coeffs)
        if p.degree() < 1:
            continue
        rs = roots(p, 128)
        assert sum(m for _, m in rs) == p.degree()
        # integer-cleared coefficients: a root a/b in lowest terms must have
        # b | leading and a | (lowest nonzero coefficient)
        from math import lcm
        den = lcm(*[c.denominator for c in p.coeffs])
        ints = [int(c * den) for c in p.coeffs]
        lead = ints[-1]
        trail = next(c for c in ints if c != 0)
        for r, _ in rs:
            if isinstance(r, Fraction):
                assert p(r) == 0
                if r != 0:
                    assert lead % r.denominator == 0
                    assert trail % r.numerator == 0


def test_complexmp_precision_floor():
    with pytest.raises(PolyError):
        ComplexMP(mpmath.mpf(1), mpmath.mpf(0), 32)


def test_aberth_nonconvergence_reports_partial():
    from sixnodal.poly import RootFindingError, aberth_roots
    coeffs = [Fraction(x) for x in (-6, 0, 0, 0, 1)]
    with pytest.raises(RootFindingError) as excinfo:
        aberth_roots(coeffs, 256, max_iter=1)
    assert len(excinfo.value.partial) == 4


def test_resultant_rejects_double_constants():
    f = MPoly.const(2, 3)
    with pytest.raises(PolyError):
        resultant_bivariate(f, f, 0)


def test_restrict_to_subspace():
    x = MPoly.variables(3)
    r = restrict_to_subspace(x[0], [(0, 1, 0), (0, 0, 1)])
    assert r.is_zero()
    with pytest.raises(PolyError):
        restrict_to_subspace(x[0], [(1, 0, 0), (2, 0, 0)])


def test_restrict_line_on_cubic_vanishes(inst1):
    from sixnodal.detgeo import special_line
    line = special_line(inst1, "fromV", (1, 2, 3))
    assert restrict_to_subspace(inst1.cubic_y, [line.p0, line.p1]).is_zero()


def test_divide_exact():
    x = MPoly.variables(2)
    f = (x[0] + x[1]) * (x[0] - 2 * x[1])
    assert divide_exact(f, x[0] + x[1]) == x[0] - 2 * x[1]
    with pytest.raises(PolyError):
        divide_exact(f, x[0] + 3 * x[1])


def test_json_roundtrip():
    rng = random.Random(2)
    f = random_poly(rng)
    assert MPoly.from_json(f.to_json()) == f
    data = f.to_json()
    assert all(isinstance(c, str) and "/" in c for _, c in data["terms"])
