"""Certified archimedean embeddings of a number field.

Roots of the defining polynomial are isolated exactly (rational isolating
intervals / rectangles via sympy's Collins-Krandick implementation) and
refined on demand; every embedding value handed out is an interval (or a
pair of intervals for a complex place) that provably contains the true
value at the requested working precision.

Embedding order is canonical: real roots ascending, then one complex root
per conjugate pair (positive imaginary part), sorted by real part.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import sympy

from .intervals import IvCtx, contains_zero, sign as iv_sign

_X = sympy.Symbol("x")


@lru_cache(maxsize=None)
def _isolate(poly_coeffs: tuple, prec: int):
    """Isolating regions with rational bounds of width < 2**-prec.

    poly_coeffs is ascending.  Returns (real_intervals, complex_rects);
    real_intervals = [(lo, hi)] Fractions ascending; complex_rects =
    [(re_lo, re_hi, im_lo, im_hi)] upper half plane, sorted by (re, im).
    """
    expr = sum(int(c) * _X ** i for i, c in enumerate(poly_coeffs))
    p = sympy.Poly(expr, _X)
    eps = sympy.Rational(1, 2 ** (prec + 8))
    real_iv, cplx_iv = p.intervals(all=True, eps=eps)
    reals = []
    for (lo, hi), mult in real_iv:
        if mult != 1:
            raise ValueError("defining polynomial has a repeated root")
        reals.append((Fraction(int(lo.p), int(lo.q)),
                      Fraction(int(hi.p), int(hi.q))))
    reals.sort()
    rects = []
    for (c1, c2), mult in cplx_iv:
        if mult != 1:
            raise ValueError("defining polynomial has a repeated root")
        re1, im1 = c1.as_real_imag()
        re2, im2 = c2.as_real_imag()
        re_lo, re_hi = sorted((Fraction(int(re1.p), int(re1.q)),
                               Fraction(int(re2.p), int(re2.q))))
        im_lo, im_hi = sorted((Fraction(int(im1.p), int(im1.q)),
                               Fraction(int(im2.p), int(im2.q))))
        if im_lo > 0:
            rects.append((re_lo, re_hi, im_lo, im_hi))
        elif im_hi < 0:
            continue  # lower-half mirror of a kept rectangle
        else:
            raise ValueError("complex root rectangle touches the real axis")
    rects.sort()
    return tuple(reals), tuple(rects)


class EmbeddingBasis:
    """All r1 + r2 embeddings of one field at one working precision."""

    def __init__(self, poly, integral_basis, r1: int, r2: int,
                 prec: int = 128):
        self.poly = tuple(int(c) for c in poly)
        self.basis = tuple(tuple(Fraction(x) for x in row)
                           for row in integral_basis)
        self.n = len(self.poly) - 1
        self.r1, self.r2 = r1, r2
        self.prec = prec
        self.ctx = IvCtx(prec)
        reals, rects = _isolate(self.poly, prec)
        if len(reals) != r1 or len(rects) != r2:
            raise ValueError(
                f"signature mismatch: found {len(reals)} real and "
                f"{len(rects)} complex roots, expected ({r1},{r2})")
        c = self.ctx
        self.real_roots = [self._hull(lo, hi) for lo, hi in reals]
        self.complex_roots = [(self._hull(a, b), self._hull(lo, hi))
                              for a, b, lo, hi in rects]
        # weights e_i over the r1 + r2 kept embeddings
        self.weights = [1] * r1 + [2] * r2

    def _hull(self, lo: Fraction, hi: Fraction):
        from .intervals import endpoints
        c = self.ctx
        a = c.num(lo)
        b = c.num(hi)
        return c.pair(endpoints(a)[0], endpoints(b)[1])

    def at_precision(self, prec: int) -> "EmbeddingBasis":
        if prec == self.prec:
            return self
        return EmbeddingBasis(self.poly, self.basis, self.r1, self.r2, prec)

    # -- element plumbing ---------------------------------------------------

    def power_poly(self, coords) -> tuple:
        """Element given by integral-basis coordinates as a polynomial in
        the generator (ascending Fraction coefficients)."""
        n = self.n
        out = [Fraction(0)] * n
        for ci, row in zip(coords, self.basis):
            if ci:
                for j, bj in enumerate(row):
                    out[j] += ci * bj
        return tuple(out)

    def _horner_real(self, coeffs, x):
        c = self.ctx
        acc = c.num(coeffs[-1])
        for k in range(len(coeffs) - 2, -1, -1):
            acc = acc * x + c.num(coeffs[k])
        return acc

    def _horner_complex(self, coeffs, re, im):
        c = self.ctx
        ar, ai = c.num(coeffs[-1]), c.num(0)
        for k in range(len(coeffs) - 2, -1, -1):
            ar, ai = ar * re - ai * im + c.num(coeffs[k]), ar * im + ai * re
        return ar, ai

    def sigma_real(self, coords, i):
        """sigma_i(x) for a real embedding (0 <= i < r1), as an interval."""
        return self._horner_real(self.power_poly(coords), self.real_roots[i])

    def sigma_complex(self, coords, i):
        """(Re, Im) intervals for complex embedding i (0 <= i < r2)."""
        re, im = self.complex_roots[i]
        return self._horner_complex(self.power_poly(coords), re, im)

    def abs2(self, coords, i):
        """|sigma_i(x)|^2 as an interval, i over the r1 + r2 embeddings."""
        if i < self.r1:
            v = self.sigma_real(coords, i)
            return v * v
        re, im = self.sigma_complex(coords, i - self.r1)
        return re * re + im * im

    def log_abs(self, coords, i):
        """log|sigma_i(x)|, certified.  x must be nonzero at this place."""
        a2 = self.abs2(coords, i)
        if contains_zero(a2):
            raise ArithmeticError(
                "embedding enclosure touches zero; escalate precision")
        return self.ctx.log(a2) / 2

    def log_abs_vector(self, coords):
        return [self.log_abs(coords, i) for i in range(self.r1 + self.r2)]

    def real_sign(self, coords, i):
        """Certified sign of sigma_i(x) at real embedding i, or None."""
        return iv_sign(self.sigma_real(coords, i))

    def house(self, coords):
        """Interval enclosing max_i |sigma_i(x)| over all n embeddings."""
        from .intervals import endpoints
        c = self.ctx
        best = None
        for i in range(self.r1 + self.r2):
            a = c.sqrt(self.abs2(coords, i))
            if best is None:
                best = a
            else:
                blo, bhi = endpoints(best)
                alo, ahi = endpoints(a)
                best = c.pair(max(blo, alo), max(bhi, ahi))
        return best

    def hprime(self, coords):
        """h'(phi(x)) in R^n: reals, then Re parts, then Im parts."""
        out = [self.sigma_real(coords, i) for i in range(self.r1)]
        res, ims = [], []
        for i in range(self.r2):
            re, im = self.sigma_complex(coords, i)
            res.append(re)
            ims.append(im)
        return out + res + ims

    # -- float fast path ----------------------------------------------------

    def float_roots(self):
        """(real mids, complex mids, max enclosure radius) as floats."""
        from .intervals import mid_float, rad_float
        reals = [mid_float(r) for r in self.real_roots]
        cplx = [(mid_float(re), mid_float(im))
                for re, im in self.complex_roots]
        rad = 0.0
        for r in self.real_roots:
            rad = max(rad, rad_float(r))
        for re, im in self.complex_roots:
            rad = max(rad, rad_float(re), rad_float(im))
        return reals, cplx, rad
