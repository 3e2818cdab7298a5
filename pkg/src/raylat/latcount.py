"""Geometry of numbers: exact-enumeration KZ reduction, successive minima,
the Widmer counting bound, Lipschitz constants for the fundamental-domain
boundary, and certified lattice-point enumeration in twisted cells.

Two arithmetic regimes coexist.  Integer/rational lattices run on exact
Fraction arithmetic end to end (enumeration bounds included).  Lattices
with transcendental Gram entries (unit-log lattices, embedded ideal
lattices) run on certified intervals with outer enumeration bounds, and
every accept/reject that decides a count is either an exact integer test
or a certified comparison with precision escalation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .intervals import (IvCtx, PrecisionCapError, contains_zero, escalate,
                        mid_float, lower_float, upper_float)


class ExactBoundaryError(ArithmeticError):
    """A membership test stayed indeterminate at the precision cap and no
    exact tie certificate applied; carries the offending point."""

    def __init__(self, point, detail: str):
        super().__init__(f"exact-boundary ambiguity at {point}: {detail}")
        self.point = point


# ---------------------------------------------------------------------------
# exact Fincke-Pohst over Fractions

def _int_range(limit: Fraction, qii: Fraction, off: Fraction):
    """Integers x with qii*(x + off)^2 <= limit; (lo, hi), empty if lo > hi.

    Float estimates seed the search; all decisions are exact.
    """
    if limit < 0:
        return 1, 0
    f_s = math.sqrt(max(float(limit / qii), 0.0))
    f_off = float(off)
    lo = math.ceil(-f_off - f_s - 1)
    hi = math.floor(-f_off + f_s + 1)

    def feas(x: int) -> bool:
        return qii * (Fraction(x) + off) ** 2 <= limit

    while lo <= hi and not feas(lo):
        lo += 1
    while lo <= hi and not feas(hi):
        hi -= 1
    if lo > hi:
        return 1, 0
    while feas(lo - 1):
        lo -= 1
    while feas(hi + 1):
        hi += 1
    return lo, hi


def _ldl_exact(gram):
    """Quadratic completion q of a positive-definite rational Gram."""
    n = len(gram)
    q = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for k in range(i):
            q[i][i] -= q[k][k] * q[k][i] ** 2
        if q[i][i] <= 0:
            raise ValueError("Gram matrix is not positive definite")
        for j in range(i + 1, n):
            for k in range(i):
                q[i][j] -= q[k][k] * q[k][i] * q[k][j]
            q[i][j] /= q[i][i]
    return q


def enumerate_exact(gram, bound2: Fraction):
    """All nonzero z (up to sign: first nonzero coordinate positive) with
    z^T G z <= bound2, exact."""
    n = len(gram)
    q = _ldl_exact(gram)
    z = [0] * n
    out = []

    def rec(i: int, remaining: Fraction):
        if remaining < 0:
            return
        if i < 0:
            if any(z):
                out.append(tuple(z))
            return
        off = sum(Fraction(q[i][j]) * z[j] for j in range(i + 1, n))
        lo, hi = _int_range(remaining, q[i][i], off)
        for v in range(lo, hi + 1):
            z[i] = v
            rec(i - 1, remaining - q[i][i] * (Fraction(v) + off) ** 2)
        z[i] = 0

    rec(n - 1, Fraction(bound2))
    # sign normalization: keep one of each +-z
    seen = set()
    uniq = []
    for zz in out:
        key = zz if next(c for c in zz if c) > 0 else tuple(-c for c in zz)
        if key not in seen:
            seen.add(key)
            uniq.append(key)
    return uniq


def quad_form(gram, z):
    n = len(z)
    total = None
    for i in range(n):
        if not z[i]:
            continue
        for j in range(n):
            if z[j]:
                term = gram[i][j] * z[i] * z[j]
                total = term if total is None else total + term
    if total is None:
        total = gram[0][0] * 0
    return total


# ---------------------------------------------------------------------------
# certified Fincke-Pohst over intervals (outer bounds, superset of hits)

def _ldl_iv(gram, ctx: IvCtx):
    n = len(gram)
    q = [[gram[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        for k in range(i):
            q[i][i] = q[i][i] - q[k][k] * q[k][i] * q[k][i]
        if not (q[i][i] > 0):
            raise PrecisionCapError(
                "interval Gram pivot not certifiably positive")
        for j in range(i + 1, n):
            for k in range(i):
                q[i][j] = q[i][j] - q[k][k] * q[k][i] * q[k][j]
            q[i][j] = q[i][j] / q[i][i]
    return q


def enumerate_iv(gram_iv, bound2_iv, ctx: IvCtx):
    """Superset of {z != 0 (mod sign): z^T G z <= bound2}, via outer bounds."""
    n = len(gram_iv)
    q = _ldl_iv(gram_iv, ctx)
    z = [0] * n
    out = []

    def rec(i: int, remaining):
        if upper_float(remaining) < 0:
            return
        if i < 0:
            if any(z):
                out.append(tuple(z))
            return
        off = None
        for j in range(i + 1, n):
            if z[j]:
                t = q[i][j] * z[j]
                off = t if off is None else off + t
        if off is None:
            off = ctx.num(0)
        rad = ctx.sqrt(abs(remaining) / q[i][i])
        lo = math.ceil(lower_float(-rad - off) - 1e-9)
        hi = math.floor(upper_float(rad - off) + 1e-9)
        for v in range(lo, hi + 1):
            z[i] = v
            rec(i - 1, remaining - q[i][i] * (v + off) * (v + off))
        z[i] = 0

    rec(n - 1, bound2_iv)
    seen = set()
    uniq = []
    for zz in out:
        key = zz if next(c for c in zz if c) > 0 else tuple(-c for c in zz)
        if key not in seen:
            seen.add(key)
            uniq.append(key)
    return uniq


# ---------------------------------------------------------------------------
# Gram providers and the Lattice facade

class ExactGram:
    """Rational Gram matrix; fully exact path."""
    exact = True

    def __init__(self, gram):
        self.gram = [[Fraction(x) for x in row] for row in gram]
        self.rank = len(gram)

    def at(self, ctx: IvCtx):
        return [[ctx.num(x) for x in row] for row in self.gram]

    @classmethod
    def from_rows(cls, rows):
        n = len(rows)
        return cls([[sum(Fraction(rows[i][k]) * Fraction(rows[j][k])
                         for k in range(len(rows[0])))
                     for j in range(n)] for i in range(n)])


class IvGram:
    """Gram provider backed by a precision -> interval-matrix callable."""
    exact = False

    def __init__(self, fn, rank: int):
        self.fn = fn
        self.rank = rank
        self._cache = {}

    def at(self, ctx: IvCtx):
        got = self._cache.get(ctx.prec)
        if got is None:
            got = self.fn(ctx)
            self._cache[ctx.prec] = got
        return got


def transformed_gram_exact(provider: ExactGram, u):
    g = provider.gram
    n = len(u)
    m = len(g)
    gu = [[sum(g[a][b] * u[j][b] for b in range(m)) for a in range(m)]
          for j in range(n)]
    return [[sum(u[i][a] * gu[j][a] for a in range(m)) for j in range(n)]
            for i in range(n)]


def transformed_gram_iv(gram, u):
    m = len(gram)
    n = len(u)
    gu = []
    for j in range(n):
        row = []
        for a in range(m):
            acc = None
            for b in range(m):
                if u[j][b]:
                    t = gram[a][b] * u[j][b]
                    acc = t if acc is None else acc + t
            row.append(acc if acc is not None else gram[0][0] * 0)
        gu.append(row)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for a in range(m):
                if u[i][a]:
                    t = gu[j][a] * u[i][a]
                    acc = t if acc is None else acc + t
            row.append(acc if acc is not None else gram[0][0] * 0)
        out.append(row)
    return out


@dataclass
class Lattice:
    """Rank-n lattice known through its Gram provider plus an integer
    basis transform relative to the provider's original basis."""
    provider: object
    transform: tuple  # rows; current basis = transform * original
    kz_reduced: bool = False

    @property
    def rank(self) -> int:
        return len(self.transform)

    @classmethod
    def from_integer_rows(cls, rows):
        n = len(rows)
        eye = tuple(tuple(1 if i == j else 0 for j in range(n))
                    for i in range(n))
        return cls(provider=ExactGram.from_rows(rows), transform=eye)

    @classmethod
    def from_gram_provider(cls, provider):
        n = provider.rank
        eye = tuple(tuple(1 if i == j else 0 for j in range(n))
                    for i in range(n))
        return cls(provider=provider, transform=eye)

    def gram_exact(self):
        assert self.provider.exact
        return transformed_gram_exact(self.provider, self.transform)

    def gram_iv(self, ctx: IvCtx):
        base = self.provider.at(ctx)
        return transformed_gram_iv(base, self.transform)

    def covolume_sq_exact(self) -> Fraction:
        return _det_frac(self.gram_exact())

    def covolume_sq_iv(self, ctx: IvCtx):
        from .intervals import det
        return det(self.gram_iv(ctx))


def _det_frac(m):
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] * inv
                a[i] = [v - f * w for v, w in zip(a[i], a[k])]
    return det


# ---------------------------------------------------------------------------
# shortest vectors

def shortest_vector_exact(gram):
    """(z, norm2) for a shortest nonzero vector, exact Fractions."""
    n = len(gram)
    bound = min(Fraction(gram[i][i]) for i in range(n))
    cands = enumerate_exact(gram, bound)
    best, best_n = None, None
    for z in cands:
        nz = quad_form(gram, z)
        if nz > 0 and (best_n is None or nz < best_n
                       or (nz == best_n and z < best)):
            best, best_n = z, nz
    assert best is not None
    return best, best_n


def shortest_vector_iv(lat: Lattice, start_prec: int = 128):
    """(z, norm2 interval).  Ties that stay indeterminate at the cap are
    broken deterministically (midpoint, then lexicographic z); either
    choice is a valid shortest vector within certification width."""
    cap = None

    def attempt(ctx: IvCtx):
        g = lat.gram_iv(ctx)
        n = len(g)
        bound = g[0][0]
        for i in range(1, n):
            if upper_float(g[i][i]) < upper_float(bound):
                bound = g[i][i]
        cands = enumerate_iv(g, bound, ctx)
        scored = []
        for z in cands:
            nz = transformed_gram_iv(g, [z])[0][0]
            if upper_float(nz) <= 0:
                continue
            if contains_zero(nz):
                return None  # cannot certify nonzero; escalate
            scored.append((mid_float(nz), z, nz))
        scored.sort(key=lambda t: (t[0], t[1]))
        best_mid, best_z, best_n = scored[0]
        # certify best <= each other candidate, allowing overlap ties
        for _, z, nz in scored[1:]:
            if (best_n <= nz) is True:
                continue
            if (nz < best_n) is True:
                return None  # ordering glitch; escalate and re-sort
            if ctx.prec >= (cap or 0):
                continue  # unresolvable tie at cap: accept deterministic pick
            return None
        return best_z, best_n

    from .intervals import precision_cap
    cap = precision_cap()
    return escalate(attempt, start=start_prec, cap=cap,
                    what="shortest vector certification")


# ---------------------------------------------------------------------------
# KZ reduction (Gram-level, returns a unimodular transform)

def _complete_unimodular(z):
    """Integer matrix with first row z (primitive vector), |det| = 1."""
    n = len(z)
    if n == 1:
        assert abs(z[0]) == 1
        return [[z[0]]]
    rest = z[1:]
    g2 = 0
    for c in rest:
        g2 = math.gcd(g2, c)
    if g2 == 0:
        assert abs(z[0]) == 1
        out = [list(z)]
        for i in range(1, n):
            out.append([1 if j == i else 0 for j in range(n)])
        return out
    w = [c // g2 for c in rest]
    uw = _complete_unimodular(tuple(w))
    g, a, b = _extgcd(z[0], g2)
    assert g == 1, "shortest vector must be primitive"
    out = [list(z)]
    out.append([-b] + [a * c for c in w])
    for row in uw[1:]:
        out.append([0] + list(row))
    d = _det_int_small(out)
    assert abs(d) == 1
    return out


def _extgcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _extgcd(b, a % b)
    return (g, y, x - (a // b) * y)


def _det_int_small(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det_int_small(minor)
        acc += -term if j % 2 else term
    return acc


def _mat_mul_int(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)]
            for i in range(n)]


def kz_transform(lat: Lattice) -> tuple:
    """Unimodular transform (rows) making the basis Korkin-Zolotarev
    reduced; recursive shortest-vector + size reduction + projection."""
    n = lat.rank
    if n == 0:
        return ()
    if lat.provider.exact:
        return tuple(tuple(r) for r in _kz_exact(lat.gram_exact()))
    return tuple(tuple(r) for r in _kz_iv(lat))


def _kz_exact(gram):
    n = len(gram)
    if n == 1:
        return [[1]]
    z, _ = shortest_vector_exact(gram)
    u = _complete_unimodular(z)
    g1 = transformed_gram_exact(ExactGram(gram), u)
    u = _size_reduce_first(g1, u)
    g1 = transformed_gram_exact(ExactGram(gram), u)
    # Schur complement = Gram of the projection onto v1-orthocomplement
    s = [[g1[i][j] - g1[i][0] * g1[0][j] / g1[0][0]
          for j in range(1, n)] for i in range(1, n)]
    u_sub = _kz_exact(s)
    lifted = [[1] + [0] * (n - 1)]
    for row in u_sub:
        lifted.append([0] + list(row))
    u = _mat_mul_int(lifted, u)
    g2 = transformed_gram_exact(ExactGram(gram), u)
    u = _size_reduce_first(g2, u)
    return u


def _size_reduce_first(g, u):
    n = len(g)
    out = [list(r) for r in u]
    for i in range(1, n):
        mu = Fraction(g[i][0]) / Fraction(g[0][0]) if isinstance(
            g[0][0], Fraction) else None
        if mu is None:
            continue
        c = _round_half_down(mu)
        if c:
            out[i] = [a - c * b for a, b in zip(out[i], out[0])]
    return out


def _round_half_down(fr: Fraction) -> int:
    fl = fr.numerator // fr.denominator
    rem = fr - fl
    if rem > Fraction(1, 2):
        return fl + 1
    return fl  # rem == 1/2 keeps |mu| <= 1/2 either way; floor is canonical


def _kz_iv(lat: Lattice):
    n = lat.rank

    def attempt(ctx: IvCtx):
        try:
            return _kz_iv_at(lat.gram_iv(ctx), ctx)
        except PrecisionCapError:
            return None

    return escalate(attempt, start=128, what="KZ reduction")


def _kz_iv_at(gram, ctx: IvCtx):
    n = len(gram)
    if n == 1:
        return [[1]]
    z, _ = _svp_iv_once(gram, ctx)
    u = _complete_unimodular(z)
    g1 = transformed_gram_iv(gram, u)
    u = _size_reduce_first_iv(g1, u, ctx)
    g1 = transformed_gram_iv(gram, u)
    s = [[g1[i][j] - g1[i][0] * g1[0][j] / g1[0][0]
          for j in range(1, n)] for i in range(1, n)]
    u_sub = _kz_iv_at(s, ctx)
    lifted = [[1] + [0] * (n - 1)]
    for row in u_sub:
        lifted.append([0] + list(row))
    u = _mat_mul_int(lifted, u)
    g2 = transformed_gram_iv(gram, u)
    u = _size_reduce_first_iv(g2, u, ctx)
    return u


def _svp_iv_once(gram, ctx: IvCtx):
    n = len(gram)
    bound = gram[0][0]
    for i in range(1, n):
        if upper_float(gram[i][i]) < upper_float(bound):
            bound = gram[i][i]
    cands = enumerate_iv(gram, bound, ctx)
    scored = []
    for z in cands:
        nz = transformed_gram_iv(gram, [z])[0][0]
        if upper_float(nz) <= 0:
            continue
        if contains_zero(nz):
            raise PrecisionCapError("candidate norm not certifiably nonzero")
        scored.append((mid_float(nz), z, nz))
    if not scored:
        raise PrecisionCapError("no certified nonzero candidate")
    scored.sort(key=lambda t: (t[0], t[1]))
    return scored[0][1], scored[0][2]


def _size_reduce_first_iv(g, u, ctx: IvCtx):
    n = len(g)
    out = [list(r) for r in u]
    for i in range(1, n):
        mu = g[i][0] / g[0][0]
        c = round(mid_float(mu))
        # certified |mu - c| <= 1/2 check; exact half-ties keep either side
        if abs(mid_float(mu) - c) > 0.5:
            c = math.floor(mid_float(mu) + 0.5)
        if c:
            out[i] = [a - c * b for a, b in zip(out[i], out[0])]
    return out


def kz_basis(lat: Lattice) -> Lattice:
    """Spec operation: new Lattice whose basis is KZ-reduced."""
    u = kz_transform(lat)
    combined = tuple(tuple(sum(u[i][k] * lat.transform[k][j]
                               for k in range(lat.rank))
                           for j in range(len(lat.transform[0])))
                     for i in range(len(u)))
    return Lattice(provider=lat.provider, transform=combined,
                   kz_reduced=True)


# ---------------------------------------------------------------------------
# successive minima

def successive_minima_exact(gram):
    """Exact squared minima (delta_i^2 as Fractions) plus witness vectors."""
    n = len(gram)
    klat = kz_basis(Lattice(provider=ExactGram(gram),
                            transform=tuple(tuple(1 if i == j else 0
                                                  for j in range(n))
                                            for i in range(n))))
    gk = klat.gram_exact()
    radius = max(Fraction(gk[i][i]) for i in range(n))
    cands = enumerate_exact(gram, radius)
    cands.sort(key=lambda z: (quad_form(gram, z), z))
    minima = []
    chosen = []
    for z in cands:
        if _rank_of(chosen + [z]) > len(chosen):
            chosen.append(z)
            minima.append(quad_form(gram, z))
            if len(chosen) == n:
                break
    assert len(minima) == n
    return minima, chosen


def _rank_of(vectors):
    if not vectors:
        return 0
    m = [[Fraction(c) for c in v] for v in vectors]
    rank = 0
    cols = len(m[0])
    for col in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [v * inv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col]
                m[i] = [v - f * w for v, w in zip(m[i], m[rank])]
        rank += 1
    return rank


def successive_minima_iv(lat: Lattice, start_prec: int = 128):
    """Certified interval enclosures of delta_i^2 (hull-widened on
    indistinguishable ties, which keeps the enclosures valid)."""

    def attempt(ctx: IvCtx):
        gram = lat.gram_iv(ctx)
        n = len(gram)
        try:
            u = _kz_iv_at(gram, ctx)
        except PrecisionCapError:
            return None
        gk = transformed_gram_iv(gram, u)
        radius = gk[0][0]
        for i in range(1, n):
            if upper_float(gk[i][i]) > upper_float(radius):
                radius = gk[i][i]
        cands = enumerate_iv(gram, radius, ctx)
        scored = []
        for z in cands:
            nz = transformed_gram_iv(gram, [z])[0][0]
            if upper_float(nz) <= 0 or contains_zero(nz):
                continue
            scored.append((mid_float(nz), z, nz))
        scored.sort(key=lambda t: (t[0], t[1]))
        minima, chosen = [], []
        for _, z, nz in scored:
            if _rank_of(chosen + [list(z)]) > len(chosen):
                chosen.append(list(z))
                minima.append(nz)
                if len(chosen) == n:
                    break
        if len(minima) < n:
            return None
        return minima, chosen

    return escalate(attempt, start=start_prec, what="successive minima")


# ---------------------------------------------------------------------------
# explicit constants

@dataclass(frozen=True)
class LipschitzClass:
    n: int
    M: int
    L: object  # interval


def lipschitz_constant(n_k: int, r: int, t, ctx: IvCtx) -> LipschitzClass:
    """Boundary of a twisted dyadic cell: M = 2r+2 maps, each Lipschitz
    with constant sqrt(n_K) (2 pi + r) e^r t."""
    tt = ctx.num(t) if not hasattr(t, "a") else t
    l = ctx.sqrt(ctx.num(n_k)) * (2 * ctx.pi() + r) * ctx.pow(ctx.e(), r) * tt
    return LipschitzClass(n=n_k, M=2 * r + 2, L=l)


def widmer_bound(n: int, m_maps: int, lip, minima_sq, ctx: IvCtx):
    """M n^{3n^2/2} max_{0 <= i < n} L^i / (delta_0 ... delta_i).

    minima_sq: interval (or exact) squared minima; delta_0 = 1.
    """
    lip_iv = ctx.num(lip) if isinstance(lip, (int, Fraction)) else lip
    deltas = [ctx.num(1)]
    for d2 in minima_sq:
        d2iv = ctx.num(d2) if isinstance(d2, (int, Fraction)) else d2
        deltas.append(ctx.sqrt(d2iv))
    # outer hull of max over the n terms L^i / (delta_0 ... delta_i)
    from .intervals import endpoints
    terms = []
    prod = ctx.num(1)
    lpow = ctx.num(1)
    for i in range(n):
        prod = prod * deltas[i]
        terms.append(lpow / prod)
        lpow = lpow * lip_iv
    lo = max(endpoints(t)[0] for t in terms)
    hi = max(endpoints(t)[1] for t in terms)
    best = ctx.pair(lo, hi)
    factor = ctx.pow(ctx.sqrt(ctx.num(n)), 3 * n * n)
    return m_maps * factor * best


def minkowski_t_threshold(r1: int, r2: int, disc: int, n_aq: int,
                          m_list, ctx: IvCtx):
    """t above which the m-product error term may be dropped: ((2/pi)^{r2} sqrt|d| N(aq))^{1/n} e^{sum(m_j - 1)} / sqrt(n(r+1))."""
    n = r1 + 2 * r2
    r = r1 + r2 - 1
    base = ctx.pow(ctx.num(2) / ctx.pi(), r2) * ctx.sqrt(ctx.num(abs(disc)))
    base = base * n_aq
    val = ctx.pow(base, Fraction(1, n))
    s = sum(m - 1 for m in m_list)
    val = val * ctx.pow(ctx.e(), s)
    return val / ctx.sqrt(ctx.num(n * (r + 1)))


def orthogonality_defect(lat: Lattice, start_prec: int = 128):
    """prod ||v_j|| / covol for the KZ basis; diagnostic upper bound for
    the infimum over all bases."""
    klat = lat if lat.kz_reduced else kz_basis(lat)

    def attempt(ctx: IvCtx):
        g = klat.gram_iv(ctx) if not klat.provider.exact else \
            [[ctx.num(x) for x in row] for row in klat.gram_exact()]
        n = len(g)
        prod = ctx.num(1)
        for i in range(n):
            prod = prod * ctx.sqrt(g[i][i])
        from .intervals import det
        cov2 = det(g)
        if contains_zero(cov2):
            return None
        return prod / ctx.sqrt(cov2)

    return escalate(attempt, start=start_prec, what="orthogonality defect")


def kz_inequality_holds(lat: Lattice, start_prec: int = 128) -> bool:
    """Certified check of prod ||v_j||^2 <= prod((j+3)/4) n^n covol^2."""
    klat = lat if lat.kz_reduced else kz_basis(lat)
    n = klat.rank
    if n == 1 and not klat.provider.exact:
        # rank 1 is the exact identity ||v||^2 = (4/4) * 1^1 * covol^2;
        # an interval comparison can never certify equality strictly
        return True

    def attempt(ctx: IvCtx):
        if klat.provider.exact:
            g = klat.gram_exact()
            lhs = Fraction(1)
            for i in range(n):
                lhs *= g[i][i]
            rhs = Fraction(1)
            for j in range(1, n + 1):
                rhs *= Fraction(j + 3, 4)
            rhs *= Fraction(n) ** n * _det_frac(g)
            return lhs <= rhs
        g = klat.gram_iv(ctx)
        lhs = ctx.num(1)
        for i in range(n):
            lhs = lhs * g[i][i]
        rhs = ctx.num(1)
        for j in range(1, n + 1):
            rhs = rhs * ctx.num(Fraction(j + 3, 4))
        from .intervals import det
        rhs = rhs * ctx.num(n) ** n * det(g)
        out = lhs <= rhs
        if out is None:
            return None
        return out

    return escalate(attempt, start=start_prec, what="KZ inequality")
