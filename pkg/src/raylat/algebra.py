"""Exact arithmetic in O_K and its ideals.

Elements are integer coordinate tuples over the integral basis.  Ideals are
full-rank sublattices of O_K held in a canonical row-style Hermite Normal
Form (upper triangular, positive pivots, entries above a pivot reduced into
[0, pivot)), so ideal equality is matrix equality and membership is exact
forward substitution.  Everything here is integer/rational arithmetic; no
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy.polys.domains import ZZ as _SYMPY_ZZ
from sympy.polys.galoistools import gf_factor

from .fielddata import FieldDescriptor


# ---------------------------------------------------------------------------
# integer linear algebra helpers

def hnf_rows(rows, n: int, transform: bool = False):
    """Canonical row HNF of the lattice spanned by `rows` in Z^n.

    Returns the full-rank n x n matrix (raises if rank < n), and the
    unimodular-extended transform U with U * rows = stacked result when
    transform=True (U rows correspond to returned rows).
    """
    m = [list(r) for r in rows]
    k = len(m)
    u = [[1 if i == j else 0 for j in range(k)] for i in range(k)] \
        if transform else None
    row = 0
    for col in range(n):
        piv = None
        for i in range(row, k):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        if transform:
            u[row], u[piv] = u[piv], u[row]
        # euclid out the rest of the column
        for i in range(row + 1, k):
            while m[i][col] != 0:
                q = m[row][col] // m[i][col]
                m[row] = [a - q * b for a, b in zip(m[row], m[i])]
                if transform:
                    u[row] = [a - q * b for a, b in zip(u[row], u[i])]
                m[row], m[i] = m[i], m[row]
                if transform:
                    u[row], u[i] = u[i], u[row]
        if m[row][col] < 0:
            m[row] = [-a for a in m[row]]
            if transform:
                u[row] = [-a for a in u[row]]
        row += 1
    if row < n:
        raise ValueError("generators do not span a full-rank lattice")
    # reduce entries above each pivot; ascending order so a reduction with
    # pivot row i (zeros before column i) never disturbs finished columns
    for i in range(n):
        piv = m[i][i]
        for j in range(i):
            q = m[j][i] // piv
            if q:
                m[j] = [a - q * b for a, b in zip(m[j], m[i])]
                if transform:
                    u[j] = [a - q * b for a, b in zip(u[j], u[i])]
    out = [tuple(r) for r in m[:n]]
    if transform:
        return out, u
    return out


def det_int(mat) -> int:
    """Exact determinant of an integer matrix (Bareiss)."""
    n = len(mat)
    a = [list(map(int, row)) for row in mat]
    sign = 1
    prev = 1
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
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[-1][-1]


def solve_frac(mat, rhs):
    """Solve x * mat = rhs over Fractions for square invertible mat."""
    n = len(mat)
    # work on the transpose so x appears as the usual unknown column
    a = [[Fraction(mat[i][j]) for i in range(n)] for j in range(n)]
    b = [Fraction(v) for v in rhs]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        b[col] = b[col] * inv
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [v - f * w for v, w in zip(a[i], a[col])]
                b[i] = b[i] - f * b[col]
    return b[:n]


def mat_inv_frac(mat):
    n = len(mat)
    a = [[Fraction(mat[i][j]) for j in range(n)] +
         [Fraction(1 if k == i else 0) for k in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                a[i] = [v - f * w for v, w in zip(a[i], a[col])]
    return [row[n:] for row in a]


# ---------------------------------------------------------------------------
# the ring of integers with a fixed basis

_ORDER_CACHE: dict = {}


class Order:
    """O_K with multiplication via precomputed structure constants."""

    def __init__(self, fd: FieldDescriptor):
        self.fd = fd
        n = fd.degree
        self.n = n
        basis = [[Fraction(x) for x in row] for row in fd.integral_basis]
        self.basis = basis
        self.basis_inv = mat_inv_frac(basis)
        # 1 as a coordinate vector
        one_power = [Fraction(1)] + [Fraction(0)] * (n - 1)
        one = self._from_power(one_power)
        if any(c.denominator != 1 for c in one):
            raise ValueError("1 is not in the span of the integral basis")
        self.one = tuple(int(c) for c in one)
        # reduction of theta^(n+k) for 0 <= k <= n-2, in the power basis
        poly = fd.poly
        red = [[Fraction(0)] * n for _ in range(max(n - 1, 1))]
        for i in range(n):
            red[0][i] = Fraction(-poly[i])
        for k in range(1, n - 1):
            prev = red[k - 1]
            shifted = [Fraction(0)] + prev[:-1]
            carry = prev[-1]
            red[k] = [shifted[i] + carry * red[0][i] for i in range(n)]
        self._theta_red = red  # theta^(n+k) = red[k] in power basis

        # structure constants c[i][j] = coords of b_i * b_j
        struct = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                prod = self._poly_mul_mod(basis[i], basis[j])
                coords = self._from_power(prod)
                struct[i][j] = coords
                struct[j][i] = coords
        self.struct = struct
        for i in range(n):
            for j in range(n):
                for c in struct[i][j]:
                    if c.denominator != 1:
                        raise ValueError(
                            "integral basis is not closed under products")
        self.struct_int = tuple(tuple(tuple(int(c) for c in struct[i][j])
                                      for j in range(n)) for i in range(n))

    @classmethod
    def for_field(cls, fd: FieldDescriptor) -> "Order":
        key = id(fd)
        got = _ORDER_CACHE.get(key)
        if got is None:
            got = cls(fd)
            _ORDER_CACHE[key] = got
        return got

    # -- power-basis plumbing -----------------------------------------------

    def _poly_mul_mod(self, pa, pb):
        n = self.n
        full = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(pa):
            if a:
                for j, b in enumerate(pb):
                    if b:
                        full[i + j] += a * b
        out = full[:n]
        for k in range(n - 1):
            c = full[n + k]
            if c:
                for i in range(n):
                    out[i] += c * self._theta_red[k][i]
        return out

    def _from_power(self, power_coeffs):
        """Power-basis rational vector -> integral-basis coordinates."""
        inv = self.basis_inv
        n = self.n
        return tuple(sum(power_coeffs[j] * inv[j][i] for j in range(n))
                     for i in range(n))

    def to_power(self, coords):
        n = self.n
        return tuple(sum(Fraction(coords[i]) * self.basis[i][j]
                         for i in range(n)) for j in range(n))

    # -- element operations (integer coordinates) ----------------------------

    def mul(self, x, y):
        n = self.n
        s = self.struct_int
        out = [0] * n
        for i in range(n):
            xi = x[i]
            if xi:
                si = s[i]
                for j in range(n):
                    yj = y[j]
                    if yj:
                        f = xi * yj
                        cij = si[j]
                        for k in range(n):
                            if cij[k]:
                                out[k] += f * cij[k]
        return tuple(out)

    def mul_frac(self, x, y):
        """Product for rational coordinate vectors (tie witnesses)."""
        n = self.n
        s = self.struct_int
        out = [Fraction(0)] * n
        for i in range(n):
            xi = x[i]
            if xi:
                for j in range(n):
                    yj = y[j]
                    if yj:
                        f = xi * yj
                        cij = s[i][j]
                        for k in range(n):
                            if cij[k]:
                                out[k] += f * cij[k]
        return tuple(out)

    def power(self, x, e: int):
        if e < 0:
            raise ValueError("use power_frac for negative exponents")
        acc = self.one
        base = x
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def power_frac(self, x, e: int):
        if e < 0:
            x = self.inverse_frac(x)
            e = -e
        acc = tuple(Fraction(c) for c in self.one)
        base = tuple(Fraction(c) for c in x)
        while e:
            if e & 1:
                acc = self.mul_frac(acc, base)
            base = self.mul_frac(base, base)
            e >>= 1
        return acc

    def mul_matrix(self, x):
        """Matrix of multiplication by x: row i = coords of x * b_i."""
        n = self.n
        s = self.struct_int
        rows = []
        for i in range(n):
            out = [0] * n
            for j in range(n):
                xj = x[j]
                if xj:
                    cji = s[j][i]
                    for k in range(n):
                        if cji[k]:
                            out[k] += xj * cji[k]
            rows.append(tuple(out))
        return rows

    def norm(self, x) -> int:
        return det_int(self.mul_matrix(x))

    def norm_frac(self, x) -> Fraction:
        n = self.n
        s = self.struct_int
        rows = []
        for i in range(n):
            out = [Fraction(0)] * n
            for j in range(n):
                xj = x[j]
                if xj:
                    cji = s[j][i]
                    for k in range(n):
                        if cji[k]:
                            out[k] += xj * cji[k]
            rows.append(out)
        # fraction determinant via Gaussian elimination
        det = Fraction(1)
        a = [row[:] for row in rows]
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

    def inverse_frac(self, x):
        """x^{-1} in K as a rational coordinate vector."""
        rows = self.mul_matrix(x) if all(
            isinstance(c, int) for c in x) else self._mul_matrix_frac(x)
        return tuple(solve_frac(rows, self.one))

    def _mul_matrix_frac(self, x):
        n = self.n
        s = self.struct_int
        rows = []
        for i in range(n):
            out = [Fraction(0)] * n
            for j in range(n):
                xj = x[j]
                if xj:
                    cji = s[j][i]
                    for k in range(n):
                        if cji[k]:
                            out[k] += xj * cji[k]
            rows.append(tuple(out))
        return rows

    def scalar_mul(self, c: int, x):
        return tuple(c * v for v in x)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def theta(self):
        """The polynomial generator as an integral-basis vector."""
        power = [Fraction(0)] * self.n
        power[1] = Fraction(1)
        return tuple(int(c) for c in self._from_power(power))

    def from_int(self, m: int):
        return tuple(m * c for c in self.one)


# ---------------------------------------------------------------------------
# ideals

@dataclass(frozen=True)
class Ideal:
    """Integral ideal as a canonical-HNF sublattice of O_K."""
    hnf: tuple
    norm: int
    factorization: tuple | None = None  # ((Ideal, e), ...) when known

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.hnf == other.hnf

    def __hash__(self):
        return hash(self.hnf)

    def __repr__(self):
        return f"Ideal(norm={self.norm})"


def ideal_from_hnf(rows) -> Ideal:
    nrm = det_int(rows)
    if nrm < 0:
        nrm = -nrm
    return Ideal(hnf=tuple(tuple(r) for r in rows), norm=nrm)


def unit_ideal(order: Order) -> Ideal:
    n = order.n
    eye = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    return Ideal(hnf=eye, norm=1, factorization=())


def ideal_from_generators(order: Order, gens) -> Ideal:
    rows = []
    for g in gens:
        if any(g):
            for i in range(order.n):
                bi = tuple(1 if k == i else 0 for k in range(order.n))
                rows.append(order.mul(g, bi))
    if not rows:
        raise ValueError("all generators are zero")
    return ideal_from_hnf(hnf_rows(rows, order.n))


def ideal_mul(order: Order, a: Ideal, b: Ideal) -> Ideal:
    rows = [order.mul(x, y) for x in a.hnf for y in b.hnf]
    out = ideal_from_hnf(hnf_rows(rows, order.n))
    fac = None
    if a.factorization is not None and b.factorization is not None:
        fac = _merge_factorizations(a.factorization, b.factorization)
    return Ideal(out.hnf, out.norm, fac)


def _merge_factorizations(fa, fb):
    acc = {}
    for p, e in list(fa) + list(fb):
        acc[p] = acc.get(p, 0) + e
    return tuple(sorted(acc.items(), key=lambda kv: (kv[0].norm, kv[0].hnf)))


def ideal_pow(order: Order, a: Ideal, e: int) -> Ideal:
    acc = unit_ideal(order)
    base = a
    while e:
        if e & 1:
            acc = ideal_mul(order, acc, base)
        base = ideal_mul(order, base, base)
        e >>= 1
    return acc


def ideal_contains(a: Ideal, x) -> bool:
    """Exact membership via forward substitution against the HNF."""
    h = a.hnf
    n = len(h)
    rem = list(x)
    for i in range(n):
        piv = h[i][i]
        if rem[i] % piv != 0:
            return False
        q = rem[i] // piv
        if q:
            for j in range(i, n):
                rem[j] -= q * h[i][j]
    return all(v == 0 for v in rem)


def ideal_add(order: Order, a: Ideal, b: Ideal) -> Ideal:
    return ideal_from_hnf(hnf_rows(list(a.hnf) + list(b.hnf), order.n))


def ideals_coprime(order: Order, a: Ideal, b: Ideal) -> bool:
    return ideal_add(order, a, b).norm == 1


def idempotent_one(order: Order, a: Ideal, q: Ideal):
    """u with u in a and u = 1 mod q, for coprime a, q (CRT splitting)."""
    n = order.n
    stacked = list(a.hnf) + list(q.hnf)
    h, u = hnf_rows(stacked, n, transform=True)
    if any(h[i][i] != 1 for i in range(n)):
        raise ValueError("ideals are not coprime")
    # express `one` over h rows, then pull back through the transform
    one = order.one
    y = [0] * n
    rem = list(one)
    for i in range(n):
        y[i] = rem[i] // h[i][i]
        for j in range(i, n):
            rem[j] -= y[i] * h[i][j]
    assert all(v == 0 for v in rem)
    z = [0] * len(stacked)
    for i in range(n):
        if y[i]:
            for j in range(len(stacked)):
                z[j] += y[i] * u[i][j]
    part_a = [0] * n
    for j in range(len(a.hnf)):
        if z[j]:
            for k in range(n):
                part_a[k] += z[j] * a.hnf[j][k]
    ua = tuple(part_a)
    assert ideal_contains(a, ua)
    assert ideal_contains(q, order.sub(ua, order.one))
    return ua


# ---------------------------------------------------------------------------
# residue ring O_K / q

class ResidueRing:
    def __init__(self, order: Order, q: Ideal, phi: int | None = None):
        self.order = order
        self.q = q
        self.phi = phi

    def reduce(self, x):
        h = self.q.hnf
        n = len(h)
        rem = list(x)
        for i in range(n):
            piv = h[i][i]
            qq = rem[i] // piv  # floor division: canonical rep in [0, piv)
            if qq:
                for j in range(i, n):
                    rem[j] -= qq * h[i][j]
        return tuple(rem)

    def mul(self, x, y):
        return self.reduce(self.order.mul(x, y))

    def pow(self, x, e: int):
        acc = self.reduce(self.order.one)
        base = self.reduce(x)
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def is_unit(self, x) -> bool:
        if not any(self.reduce(x)):
            return self.q.norm == 1
        gen = ideal_from_generators(self.order, [x])
        return ideals_coprime(self.order, gen, self.q)


# ---------------------------------------------------------------------------
# prime splitting and phi(q)

def prime_splitting(fd: FieldDescriptor, p: int):
    """Factor (p) into primes; list of (Ideal, e, f) in canonical order."""
    order = Order.for_field(fd)
    n = fd.degree
    if fd.index % p == 0:
        ovs = fd.splitting_override(p)
        if ovs is None:
            raise ValueError(f"no splitting override for prime {p} | index")
        out = []
        for ov in ovs:
            pid = ideal_from_generators(order, [order.from_int(p),
                                                ov.gen_coords])
            if pid.norm != p ** ov.f:
                raise ValueError(
                    f"override for {p}: ideal norm {pid.norm} != p^f")
            out.append((Ideal(pid.hnf, pid.norm, None), ov.e, ov.f))
    else:
        desc = [int(c) for c in reversed(fd.poly)]
        _, factors = gf_factor(desc, p, _SYMPY_ZZ)
        items = []
        for coeffs_desc, mult in factors:
            lifted = [int(c) % p for c in coeffs_desc]
            items.append((len(lifted) - 1, tuple(lifted), mult))
        items.sort(key=lambda t: (t[0], t[1]))
        theta = order.theta()
        out = []
        for deg, coeffs_desc, mult in items:
            acc = order.from_int(coeffs_desc[0])
            for c in coeffs_desc[1:]:
                acc = order.add(order.mul(acc, theta), order.from_int(c))
            pid = ideal_from_generators(order, [order.from_int(p), acc])
            if pid.norm != p ** deg:
                raise ArithmeticError(
                    f"splitting of {p}: norm {pid.norm} != {p}^{deg}")
            out.append((Ideal(pid.hnf, pid.norm, None), mult, deg))
    total = sum(e * f for _, e, f in out)
    if total != n:
        raise ArithmeticError(f"sum e_i f_i = {total} != degree {n}")
    # attach self-factorizations
    final = []
    for pid, e, f in out:
        pid2 = Ideal(pid.hnf, pid.norm, None)
        pid2 = Ideal(pid.hnf, pid.norm, ((pid2, 1),))
        final.append((pid2, e, f))
    return final


def phi_q(fd: FieldDescriptor, q: Ideal, factorization) -> int:
    """phi(q) = N(q) prod_{p | q}(1 - 1/N(p)); factorization is checked."""
    order = Order.for_field(fd)
    prod = unit_ideal(order)
    for pid, e in factorization:
        prod = ideal_mul(order, prod, ideal_pow(order, pid, e))
    if prod.hnf != q.hnf:
        raise ValueError("factorization does not multiply to q")
    phi = q.norm
    seen = set()
    for pid, _ in factorization:
        if pid.hnf in seen:
            continue
        seen.add(pid.hnf)
        np = pid.norm
        assert phi % np == 0
        phi = phi // np * (np - 1)
    return phi


def factor_ideal(fd: FieldDescriptor, a: Ideal):
    """Factorization of an integral ideal via rational-prime splitting."""
    if a.factorization is not None:
        return a.factorization
    order = Order.for_field(fd)
    n = a.norm
    if n == 1:
        return ()
    out = []
    for p in _prime_factors_int(n):
        for pid, e_max, f in prime_splitting(fd, p):
            e = 0
            power = pid
            while True:
                if all(ideal_contains(power, row) for row in a.hnf):
                    e += 1
                    power = ideal_mul(order, power, pid)
                else:
                    break
            if e:
                out.append((pid, e))
    check = unit_ideal(order)
    for pid, e in out:
        check = ideal_mul(order, check, ideal_pow(order, pid, e))
    if check.hnf != a.hnf:
        raise ArithmeticError("ideal factorization failed to reconstruct")
    return tuple(out)


def _prime_factors_int(m: int):
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out
