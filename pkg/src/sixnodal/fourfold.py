"""Birational involution on the lines of a cubic fourfold through a nodal
hyperplane section.

The fourfold extends the threefold cubic by a seeded random quadric times
the new coordinate.  A line not inside the hyperplane meets the threefold
in one smooth point; the plane it spans with the unique dual-family line
through that point cuts the fourfold in three lines, and swapping the first
and third is the involution.  Fourfold-level computation runs on the
numeric path at an explicit working precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import _numeric
from ._qlinalg import Q, mat, transpose
from .detgeo import (DetGeoError, DeterminantalInstance, direction_candidates,
                     sample_smooth_point, scroll_data)
from .poly import MPoly, gradient


class FourfoldError(ValueError):
    pass


@dataclass(frozen=True)
class CubicFourfold:
    cubic: MPoly              # six variables; restriction to x5=0 is the threefold
    quadric: MPoly            # the extension quadric
    inst: DeterminantalInstance
    seed: int

    def __post_init__(self):
        rest = MPoly(5, {e[:5]: c for e, c in self.cubic.terms.items() if e[5] == 0})
        if rest != self.inst.cubic_y:
            raise FourfoldError("restriction to the hyperplane is not the threefold")


@dataclass(frozen=True)
class FourfoldLine:
    """Line in P^5 through a hyperplane-section point, numeric or exact."""

    p0: tuple
    p1: tuple
    exact: bool
    prec: int

    def point_at(self, s, t):
        return tuple(s * a + t * b for a, b in zip(self.p0, self.p1))

    def plucker_normalized(self):
        n = len(self.p0)
        pl = [self.p0[i] * self.p1[j] - self.p0[j] * self.p1[i]
              for i in range(n) for j in range(i + 1, n)]
        lead = max(pl, key=abs)
        if abs(lead) == 0:
            raise FourfoldError("degenerate line")
        return tuple(x / lead for x in pl)


def lines_close(l1: FourfoldLine, l2: FourfoldLine, prec: int,
                tol: float = 1e-30) -> bool:
    """Coordinatewise comparison of normalized Pluecker vectors."""
    with mpmath.workprec(prec + 32):
        a = l1.plucker_normalized()
        b = l2.plucker_normalized()
        return max(abs(x - y) for x, y in zip(a, b)) < mpmath.mpf(tol)


def _pad(v, value=Fraction(0)):
    return tuple(v) + (value,)


# ---------------------------------------------------------------------------
# building fourfolds


def extend_to_fourfold(inst: DeterminantalInstance, seed: int = 1,
                       prec: int = 256, spot_checks: int = 200,
                       entry_range: int = 9) -> CubicFourfold:
    """X = (threefold cubic) + x5 * Q with Q a seeded random quadric.

    At a node of the hyperplane section the whole gradient reduces to the
    value of Q there, so Q is resampled until it avoids all six nodes
    (exact check); smoothness elsewhere is spot-checked at `spot_checks`
    numeric points of X.
    """
    rng = random.Random(f"{seed}:fourfold")
    y_cubic6 = MPoly(6, {e + (0,): c for e, c in inst.cubic_y.terms.items()})
    x5 = MPoly.var(6, 5)
    for _ in range(64):
        quad = _random_quadric(rng, entry_range)
        if any(quad.evaluate(_pad(n.coords)) == 0 for n in inst.nodes):
            continue
        four = CubicFourfold(y_cubic6 + x5 * quad, quad, inst, seed)
        _spot_check_smooth(four, rng, prec, spot_checks)
        return four
    raise FourfoldError("no usable extension quadric found")


def _random_quadric(rng, entry_range) -> MPoly:
    terms = {}
    for i in range(6):
        for j in range(i, 6):
            c = rng.randrange(-entry_range, entry_range + 1)
            if c:
                e = [0] * 6
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = Fraction(c)
    return MPoly(6, terms)


def _restriction_coeffs(f: MPoly, base, direc):
    """Coefficients of f(base + t*direc) as a polynomial in t."""
    subs = [MPoly(1, {(0,): Q(b), (1,): Q(d)}) for b, d in zip(base, direc)]
    u = f.compose(subs)
    out = [Fraction(0)] * (f.degree() + 1)
    for e, c in u.terms.items():
        out[e[0]] = c
    return out


def _eval_mp(p: MPoly, point):
    total = mpmath.mpc(0)
    for e, c in p.terms.items():
        term = _numeric.to_mpc(c)
        for x, k in zip(point, e):
            for _ in range(k):
                term *= x
        total += term
    return total


def _spot_check_smooth(four: CubicFourfold, rng, prec, count):
    """Gradient must not (nearly) vanish at numeric sample points of X."""
    grads = gradient(four.cubic)
    with mpmath.workprec(prec + 32):
        tol = _numeric.default_tolerance(prec)
        fscale = max(abs(_numeric.to_mpc(c, prec))
                     for c in four.cubic.terms.values())
        done = 0
        attempts = 0
        while done < count and attempts < 8 * count + 64:
            attempts += 1
            base = [Fraction(rng.randrange(-9, 10)) for _ in range(6)]
            direc = [Fraction(rng.randrange(-9, 10)) for _ in range(6)]
            coeffs = _restriction_coeffs(four.cubic, base, direc)
            if coeffs[3] == 0:
                continue
            dense = [_numeric.to_mpc(c, prec) for c in coeffs]
            try:
                roots_t = mpmath.polyroots(list(reversed(dense)), maxsteps=200,
                                           extraprec=96)
            except mpmath.libmp.NoConvergence:
                continue
            for t in roots_t:
                pt = [_numeric.to_mpc(b, prec) + t * _numeric.to_mpc(d, prec)
                      for b, d in zip(base, direc)]
                scale = max(abs(x) for x in pt)
                if scale == 0:
                    continue
                pt = [x / scale for x in pt]
                gvals = [_eval_mp(g, pt) for g in grads]
                if max(abs(x) for x in gvals) <= tol * fscale:
                    raise FourfoldError("spot check found a (near-)singular point")
                done += 1
                if done >= count:
                    break


# ---------------------------------------------------------------------------
# sampling lines


def sample_line(four: CubicFourfold, seed: int = 1, prec: int = 256,
                base_point=None) -> FourfoldLine:
    """A line on the fourfold through a smooth rational point of the
    hyperplane section, not contained in the hyperplane."""
    rng = random.Random(f"{four.seed}:{seed}:line")
    for attempt in range(32):
        y5 = base_point if base_point is not None else \
            sample_smooth_point(four.inst, rng)
        y = _pad(y5)
        cands, _elim, _mult = direction_candidates(
            four.cubic, y, prec=prec, chart_seed=f"{seed}:{attempt}")
        with mpmath.workprec(prec + 32):
            best = None
            for d, exact in cands:
                d_num = tuple(_numeric.to_mpc(x, prec) if exact else x for x in d)
                dnorm = max(abs(x) for x in d_num)
                if abs(d_num[5]) > dnorm * mpmath.mpf(2) ** (-16):
                    best = d_num
                    break
            if best is not None:
                y_num = tuple(_numeric.to_mpc(x, prec) for x in y)
                return FourfoldLine(y_num, best, exact=False, prec=prec)
        if base_point is not None:
            raise FourfoldError("all lines through the base point lie in the hyperplane")
    raise FourfoldError("no line found off the hyperplane")


# ---------------------------------------------------------------------------
# the involution


@dataclass(frozen=True)
class IotaResult:
    line: FourfoldLine
    base_point: tuple          # y = m cap {x5 = 0}
    dual_line_point: tuple     # second spanning point of the dual-family line
    factor_residual: float     # relative size of the forbidden coefficients


def iota(four: CubicFourfold, m: FourfoldLine, prec: int | None = None) -> IotaResult:
    """Residual line of the plane spanned by m and the dual-family line
    through its hyperplane-section point.

    The plane restriction factors as t * u * L; the seven coefficients not
    divisible by t*u must vanish, their relative size is reported, and the
    residual line is {L = 0}.
    """
    prec = prec or m.prec or 256
    with mpmath.workprec(prec + 32):
        tol = _numeric.default_tolerance(prec)
        p0 = tuple(_numeric.to_mpc(x, prec) for x in m.p0)
        p1 = tuple(_numeric.to_mpc(x, prec) for x in m.p1)
        scale = max(max(abs(x) for x in p0), max(abs(x) for x in p1))
        y = tuple(p1[5] * a - p0[5] * b for a, b in zip(p0, p1))
        ynorm = max(abs(x) for x in y)
        if ynorm <= tol * scale ** 2 * 1e6:
            raise FourfoldError("line lies in the hyperplane section")
        y = tuple(x / ynorm for x in y)

        # smoothness of the threefold at y and the unique dual-family line
        y5 = y[:5]
        grads = [_eval_mp(g, y5) for g in gradient(four.inst.cubic_y)]
        gscale = max(abs(_numeric.to_mpc(c, prec))
                     for c in four.inst.cubic_y.terms.values())
        if max(abs(x) for x in grads) <= tol * gscale * 1e6:
            raise FourfoldError("hyperplane point is singular on the threefold")
        basis_num = [[[_numeric.to_mpc(x, prec) for x in row] for row in b]
                     for b in four.inst.lam_perp.basis]
        phi = [[sum(y5[k] * basis_num[k][i][j] for k in range(5))
                for j in range(3)] for i in range(3)]
        coker = _numeric.kernel_numeric([list(r) for r in zip(*phi)], prec)
        if len(coker) != 1:
            raise FourfoldError("hyperplane point has no unique dual line")
        vdual = coker[0]

        # the dual line: y-coordinates with phi^T vdual = 0
        cond = [[sum(vdual[i] * basis_num[k][i][j] for i in range(3))
                 for k in range(5)] for j in range(3)]
        kern = _numeric.kernel_numeric(cond, prec)
        if len(kern) != 2:
            raise FourfoldError("dual-family line is degenerate")
        # spanning point of the dual line independent from y
        b_pt = _independent_point(kern, y5, prec)
        b6 = tuple(b_pt) + (mpmath.mpc(0),)

        a6 = p0 if abs(p0[5]) >= abs(p1[5]) else p1
        if _numeric.rank_numeric([list(y), list(a6), list(b6)], prec) != 3:
            raise FourfoldError("plane through m and the dual line is degenerate")

        coeffs = _plane_restriction(four.cubic, (y, a6, b6), prec)
        allowed = {(1, 1, 1), (0, 2, 1), (0, 1, 2)}
        cmax = max(abs(c) for c in coeffs.values())
        bad = max((abs(c) for e, c in coeffs.items() if e not in allowed),
                  default=mpmath.mpf(0))
        if cmax == 0 or bad > tol * cmax * 1e8:
            raise FourfoldError("plane restriction does not factor (residual "
                                f"{mpmath.nstr(bad / max(cmax, 1), 6)})")
        lam_s = coeffs.get((1, 1, 1), mpmath.mpc(0))
        lam_t = coeffs.get((0, 2, 1), mpmath.mpc(0))
        lam_u = coeffs.get((0, 1, 2), mpmath.mpc(0))
        kern_l = _numeric.kernel_numeric([[lam_s, lam_t, lam_u]], prec)
        if len(kern_l) != 2:
            raise FourfoldError("residual factor is not a line")
        pts = []
        for k in kern_l:
            pts.append(tuple(k[0] * y[j] + k[1] * a6[j] + k[2] * b6[j]
                             for j in range(6)))
        out = FourfoldLine(pts[0], pts[1], exact=False, prec=prec)
        return IotaResult(out, y, b6, float(bad / cmax))


def _independent_point(kernel_pair, y5, prec):
    """Point of the numeric plane span(kernel_pair) least aligned with y5."""
    with mpmath.workprec(prec + 32):
        best, best_score = None, -1
        for cand in (kernel_pair[0], kernel_pair[1],
                     tuple(a + b for a, b in zip(*kernel_pair))):
            ip = sum(a * mpmath.conj(b) for a, b in zip(cand, y5))
            n1 = mpmath.sqrt(sum(abs(x) ** 2 for x in cand))
            n2 = mpmath.sqrt(sum(abs(x) ** 2 for x in y5))
            score = 1 - abs(ip) / (n1 * n2)
            if score > best_score:
                best, best_score = cand, score
        return best


def _plane_restriction(f: MPoly, basis3, prec):
    """Coefficients of f restricted to span(basis3) in plane coordinates."""
    with mpmath.workprec(prec + 32):
        out: dict = {}
        for e, c in f.terms.items():
            idx = [i for i in range(f.nvars) for _ in range(e[i])]
            combos = {}
            # expand the product of len(idx)=3 linear forms over 3 basis vectors
            for i0 in range(3):
                for i1 in range(3):
                    for i2 in range(3):
                        key = [0, 0, 0]
                        key[i0] += 1
                        key[i1] += 1
                        key[i2] += 1
                        val = basis3[i0][idx[0]] * basis3[i1][idx[1]] * \
                            basis3[i2][idx[2]]
                        key = tuple(key)
                        combos[key] = combos.get(key, mpmath.mpc(0)) + val
            cc = _numeric.to_mpc(c, prec)
            for key, val in combos.items():
                out[key] = out.get(key, mpmath.mpc(0)) + cc * val
        return out


def involution_check(four: CubicFourfold, m: FourfoldLine,
                     prec: int | None = None, tol: float = 1e-30):
    """Apply iota twice and compare with the input line."""
    prec = prec or m.prec or 256
    first = iota(four, m, prec)
    second = iota(four, first.line, prec)
    return lines_close(second.line, m, prec, tol), first, second


# ---------------------------------------------------------------------------
# scroll incidence


@dataclass(frozen=True)
class ScrollIncidence:
    meets_before: bool
    meets_after: bool
    margin_before: float
    margin_after: float

    @property
    def invariant(self) -> bool:
        return self.meets_before == self.meets_after


def _meets_scroll(four: CubicFourfold, line: FourfoldLine, quadrics, prec):
    """Incidence of a fourfold line with a scroll inside the hyperplane: the
    unique hyperplane point of the line must satisfy the three quadrics."""
    with mpmath.workprec(prec + 32):
        tol = _numeric.default_tolerance(prec)
        p0 = tuple(_numeric.to_mpc(x, prec) for x in line.p0)
        p1 = tuple(_numeric.to_mpc(x, prec) for x in line.p1)
        y = tuple(p1[5] * a - p0[5] * b for a, b in zip(p0, p1))
        ynorm = max(abs(x) for x in y)
        if ynorm == 0:
            raise FourfoldError("line lies in the hyperplane")
        y5 = tuple(x / ynorm for x in y[:5])
        margin = mpmath.mpf(0)
        for q in quadrics:
            qscale = max(abs(_numeric.to_mpc(c, prec)) for c in q.terms.values())
            val = abs(_eval_mp(q, y5)) / qscale
            margin = max(margin, val)
        return bool(margin <= tol * 1e8), float(margin)


def scroll_incidence_invariance(four: CubicFourfold, m: FourfoldLine, v,
                                prec: int | None = None) -> ScrollIncidence:
    """Does iota preserve incidence with the scroll of v?"""
    prec = prec or m.prec or 256
    sd = scroll_data(four.inst, v)
    before, margin_b = _meets_scroll(four, m, sd.quadrics_v, prec)
    image = iota(four, m, prec).line
    after, margin_a = _meets_scroll(four, image, sd.quadrics_v, prec)
    return ScrollIncidence(before, after, margin_b, margin_a)


def sample_line_through_scroll(four: CubicFourfold, v, seed: int = 1,
                               prec: int = 256) -> FourfoldLine:
    """A fourfold line through a smooth rational point of the scroll of v
    (planted incidence for the invariance tests)."""
    from .detgeo import gradient as _g  # noqa: F401  (kept local import shape)
    from .detgeo import ruling_of_scroll
    rng = random.Random(f"{four.seed}:{seed}:scrollpt")
    inst = four.inst
    for attempt in range(64):
        ruling = ruling_of_scroll(inst, v, index=rng.randrange(1 << 30))
        s, t = rng.randrange(1, 9), rng.randrange(1, 9)
        z = ruling.point_at(Fraction(s), Fraction(t))
        from ._qlinalg import is_zero_vec, primitive_int_vector
        if is_zero_vec(z):
            continue
        z = primitive_int_vector(z)
        gvals = [p.evaluate(z) for p in gradient(inst.cubic_y)]
        if all(x == 0 for x in gvals):
            continue
        try:
            return sample_line(four, seed=attempt + 137 * seed, prec=prec, base_point=z)
        except (FourfoldError, DetGeoError):
            continue
    raise FourfoldError("no line through the scroll found")
