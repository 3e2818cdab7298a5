"""Certified interval arithmetic helpers on top of mpmath.iv.

All comparisons that feed a count or a verdict go through this layer.  A
comparison on overlapping intervals is *indeterminate* (None) rather than
false; callers escalate the working precision and retry.  Precision starts
at ``START_PREC`` bits and doubles up to ``cap`` bits; an indeterminate
answer at the cap is a hard error unless the caller has an exact fallback.
"""

from __future__ import annotations

import os
from fractions import Fraction

import mpmath
from mpmath import iv

START_PREC = 128
DEFAULT_CAP = 4096


class PrecisionCapError(ArithmeticError):
    """A certified comparison stayed indeterminate at the precision cap."""


def precision_cap() -> int:
    env = os.environ.get("RAYLAT_PRECISION_CAP")
    if env:
        return max(int(env), START_PREC)
    return DEFAULT_CAP


class IvCtx:
    """Working-precision context; all iv values in one escalation round
    share a context so that mixed-precision artifacts cannot arise."""

    def __init__(self, prec: int | None = None):
        self.prec = prec if prec is not None else START_PREC

    def __repr__(self):
        return f"IvCtx({self.prec})"

    def _use(self):
        iv.prec = self.prec

    # -- constructors ------------------------------------------------------

    def num(self, x):
        self._use()
        if isinstance(x, Fraction):
            return iv.mpf(x.numerator) / x.denominator
        return iv.mpf(x)

    def pair(self, lo, hi):
        self._use()
        return iv.mpf([lo, hi])

    # -- functions ---------------------------------------------------------

    def log(self, x):
        self._use()
        return iv.log(x)

    def exp(self, x):
        self._use()
        return iv.exp(x)

    def sqrt(self, x):
        self._use()
        return iv.sqrt(x)

    def pi(self):
        self._use()
        return +iv.pi

    def e(self):
        self._use()
        return iv.exp(iv.mpf(1))

    def pow(self, x, y):
        """x**y for x an interval > 0 and y an interval or number."""
        self._use()
        if isinstance(y, int):
            return x ** y
        if isinstance(y, Fraction):
            y = self.num(y)
        return iv.exp(y * iv.log(x))

    def abs2_complex(self, re, im):
        self._use()
        return re * re + im * im


# ---------------------------------------------------------------------------
# Tri-state comparisons.  mpmath's iv comparisons already return None when
# they cannot be decided; helpers below only pin down the conventions the
# rest of the package relies on.

def contains_zero(x) -> bool:
    lo, hi = endpoints(x)
    return lo <= 0 <= hi


def is_positive(a):
    """True / False / None (indeterminate)."""
    z = a > 0
    if z is True:
        return True
    if (a < 0) is True:
        return False
    return None


def sign(a):
    """+1 / -1 / None for an interval that may straddle zero."""
    p = is_positive(a)
    if p is True:
        return 1
    if p is False:
        return -1
    return None


def endpoints(x):
    """Exact mpf endpoints of an interval (never rounded through the
    global mp precision; mpmath.mpf(x.a) would round to mp.prec)."""
    lo, hi = x._mpi_
    return mpmath.make_mpf(lo), mpmath.make_mpf(hi)


def mid_float(x) -> float:
    lo, hi = endpoints(x)
    return (float(lo) + float(hi)) / 2.0


def lower_float(x) -> float:
    return float(endpoints(x)[0])


def upper_float(x) -> float:
    return float(endpoints(x)[1])


def rad_float(x) -> float:
    lo, hi = endpoints(x)
    # float() rounds to nearest; widen by two ulps so the radius is an
    # upper bound
    r = (float(hi) - float(lo)) / 2.0
    return abs(r) * (1 + 1e-15) + 5e-324


def _mpf_as_fraction(m) -> Fraction:
    sign, man, exp, _ = m._mpf_
    man = int(man)
    exp = int(exp)
    if man == 0:
        if exp != 0:
            raise OverflowError("non-finite endpoint")
        return Fraction(0)
    val = -man if sign else man
    if exp >= 0:
        return Fraction(val * (1 << exp))
    return Fraction(val, 1 << (-exp))


def iv_to_fraction_bounds(x) -> tuple[Fraction, Fraction]:
    lo, hi = endpoints(x)
    return _mpf_as_fraction(lo), _mpf_as_fraction(hi)


# ---------------------------------------------------------------------------
# Small linear algebra over intervals (ranks <= 8 throughout the project).

def det(m):
    """Determinant by fraction-free-style Gaussian elimination with
    certified pivot selection; m is a list of lists of iv numbers."""
    n = len(m)
    a = [row[:] for row in m]
    sign_flips = 0
    res = None
    for k in range(n):
        piv = None
        best = -1.0
        for i in range(k, n):
            mag = abs(mid_float(a[i][k]))
            lo_ok = not contains_zero(a[i][k])
            if lo_ok and mag > best:
                best = mag
                piv = i
        if piv is None:
            # every candidate pivot straddles zero: determinant enclosure
            # computed by cofactor expansion instead (safe for small n)
            return _det_cofactor(a, k, sign_flips)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign_flips ^= 1
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] = a[i][j] - f * a[k][j]
    res = a[0][0]
    for k in range(1, n):
        res = res * a[k][k]
    if sign_flips:
        res = -res
    return res


def _det_cofactor(a, k, sign_flips):
    sub = [row[k:] for row in a[k:]]
    d = _det_rec(sub)
    for i in range(k):
        d = d * a[i][i]
    if sign_flips:
        d = -d
    return d


def _det_rec(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det_rec(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def solve(m, rhs):
    """Solve m x = rhs with interval Gaussian elimination; raises
    PrecisionCapError-style ArithmeticError when a pivot straddles zero."""
    n = len(m)
    a = [m[i][:] + [rhs[i]] for i in range(n)]
    for k in range(n):
        piv, best = None, -1.0
        for i in range(k, n):
            if not contains_zero(a[i][k]):
                mag = abs(mid_float(a[i][k]))
                if mag > best:
                    best, piv = mag, i
        if piv is None:
            raise ArithmeticError("interval pivot straddles zero")
        a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n + 1):
                a[i][j] = a[i][j] - f * a[k][j]
    x = [None] * n
    for i in range(n - 1, -1, -1):
        s = a[i][n]
        for j in range(i + 1, n):
            s = s - a[i][j] * x[j]
        x[i] = s / a[i][i]
    return x


def escalate(fn, start: int | None = None, cap: int | None = None,
             what: str = "certified comparison"):
    """Run fn(ctx) at doubling precision until it returns a non-None value.

    fn must return None to request more precision.
    """
    if cap is None:
        cap = precision_cap()
    prec = start if start is not None else START_PREC
    while True:
        out = fn(IvCtx(prec))
        if out is not None:
            return out
        if prec >= cap:
            raise PrecisionCapError(
                f"{what} indeterminate at precision cap {cap}")
        prec = min(2 * prec, cap)
