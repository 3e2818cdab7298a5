"""Counting lattice points in twisted fundamental-domain cells.

The enumeration region for a cell is the coordinate-wise box implied by
the domain identity |x_i| = alpha(x)^{1/n} prod_j |sigma_i(eta_j)|^{a_j}
over the cell's norm shell and alpha_j windows (a subset of the covering
ball of radius sqrt(r+1) e^r t that the error analysis uses).  Candidates
come from a float Fincke-Pohst pass with rigorous slack; every decision
that affects a count is then either an exact integer test (the norm
shell), a certified sign, or a certified/exactly-tied window test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import algebra, latcount, unitlog
from .algebra import Ideal, Order
from .intervals import (IvCtx, escalate, mid_float, rad_float,
                        upper_float)

_REL_MARGIN = 4.0      # multiplier on propagated error bounds
_ENUM_SLACK = 1e-7     # absolute slack added to squared radii


@dataclass(frozen=True)
class CellSpec:
    """One (gamma, k) cell of the partitioned domain over a norm window."""
    lattice: Ideal        # aq
    translate: tuple      # residue representative (element of a, = b mod q)
    gamma: tuple | None   # sign pattern over real embeddings, None = free
    k: tuple              # twist index, 0 <= k_j < m_j
    norm_lo: Fraction     # exclusive
    norm_hi: Fraction     # inclusive


@dataclass
class CellCountReport:
    count: int
    per_cell: dict
    main: object          # interval
    bound: object         # interval
    m_dropped: bool
    delta1_sq: dict       # twist -> interval
    holds: bool


def _window_pow_upper(ivc: IvCtx, abs_iv, lo: Fraction, hi: Fraction):
    """Upper bound of |s|^e over e in [lo, hi]."""
    a = ivc.pow(abs_iv, lo)
    b = ivc.pow(abs_iv, hi)
    return max(upper_float(a), upper_float(b))


class CellEngine:
    """Prepared per-cell enumeration state (floats with rigorous slack)."""

    def __init__(self, emb, ctx_ray, cell: CellSpec, windows,
                 window_mode: str = "exact", setup_prec: int = 96):
        self.emb = emb
        self.ctx_ray = ctx_ray
        self.cell = cell
        self.windows = windows
        self.window_mode = window_mode
        fd = ctx_ray.fd
        self.fd = fd
        self.order = Order.for_field(fd)
        n, r1, r2 = fd.degree, fd.r1, fd.r2
        self.n, self.r1, self.r2 = n, r1, r2
        r = r1 + r2 - 1
        self.r = r
        ivc = IvCtx(setup_prec)
        basis = emb.basis_at(setup_prec)

        rows = cell.lattice.hnf
        # embedding matrix: dims = reals, Re parts, Im parts
        mat, rad = [], []
        for d in range(n):
            mat.append([0.0] * n)
            rad.append([0.0] * n)
        tvec = [0.0] * n
        trad = [0.0] * n

        def fill(coords, col):
            for i in range(r1):
                v = basis.sigma_real(coords, i)
                if col is None:
                    tvec[i], trad[i] = mid_float(v), rad_float(v)
                else:
                    mat[i][col], rad[i][col] = mid_float(v), rad_float(v)
            for c in range(r2):
                re, im = basis.sigma_complex(coords, c)
                if col is None:
                    tvec[r1 + c], trad[r1 + c] = mid_float(re), rad_float(re)
                    tvec[r1 + r2 + c] = mid_float(im)
                    trad[r1 + r2 + c] = rad_float(im)
                else:
                    mat[r1 + c][col] = mid_float(re)
                    rad[r1 + c][col] = rad_float(re)
                    mat[r1 + r2 + c][col] = mid_float(im)
                    rad[r1 + r2 + c][col] = rad_float(im)

        for u, g in enumerate(rows):
            fill(g, u)
        fill(cell.translate, None)
        self.mat, self.mat_rad = mat, rad
        self.tvec, self.tvec_rad = tvec, trad

        # per-embedding-block box bound over the closed windows
        box = []
        for i in range(r1 + r2):
            up = ivc.pow(ivc.num(cell.norm_hi), Fraction(1, n))
            factor = 1.0 * upper_float(up)
            for j, g in enumerate(ctx_ray.eta):
                a2 = basis.abs2(g.coords, i)
                s = ivc.sqrt(a2)
                lo_j, hi_j = windows[j]
                factor *= _window_pow_upper(ivc, s, lo_j, hi_j)
            box.append(factor * (1.0 + 1e-12) + 1e-12)
        self.box = box

        # alpha solve matrix (V^{-1} rows), floats + radius
        if r > 0:
            vmat = unitlog._alpha_matrix(emb, ctx_ray, ivc)
            vinv = _iv_mat_inverse(vmat, ivc)
            self.w_rows = [[mid_float(vinv[j][i]) for i in range(r + 1)]
                           for j in range(1, r + 1)]
            self.w_rad = [[rad_float(vinv[j][i]) for i in range(r + 1)]
                          for j in range(1, r + 1)]
        else:
            self.w_rows, self.w_rad = [], []

        self._prepare_quadratic()

    # -- geometry -----------------------------------------------------------

    def _prepare_quadratic(self):
        n = self.n
        r1, r2 = self.r1, self.r2
        scale = [0.0] * n
        for i in range(r1):
            scale[i] = 1.0 / self.box[i]
        for c in range(r2):
            scale[r1 + c] = 1.0 / self.box[r1 + c]
            scale[r1 + r2 + c] = 1.0 / self.box[r1 + c]
        a = [[self.mat[d][u] * scale[d] for u in range(n)] for d in range(n)]
        ts = [self.tvec[d] * scale[d] for d in range(n)]
        gram = [[sum(a[d][u] * a[d][v] for d in range(n)) for v in range(n)]
                for u in range(n)]
        try:
            center = _solve_float(a, [-x for x in ts])
        except ZeroDivisionError:
            raise ArithmeticError("embedding matrix numerically singular")
        self.gram_f = gram
        self.center = center
        self.radius2 = (r1 + r2) * (1.0 + 1e-9) + _ENUM_SLACK
        self.q = _ldl_float(gram)
        # bound on |z_u| over the enumeration region, for error budgets
        ainv_norm = _inf_norm_inv(a)
        zb = ainv_norm * math.sqrt(self.radius2) * 1.2 + 2.0
        self.zbound = zb + max(abs(c) for c in center)
        err = []
        for d in range(n):
            s = sum(self.mat_rad[d][u] + abs(self.mat[d][u]) * 2.4e-16
                    * (n + 2) for u in range(n))
            err.append(s * self.zbound + self.tvec_rad[d] + 1e-290)
        self.y_err = err

    # -- filters ------------------------------------------------------------

    def _leaf(self, z, y):
        """Returns True when the point is counted."""
        n, r1, r2 = self.n, self.r1, self.r2
        cell = self.cell
        # block absolute values
        absv = [0.0] * (r1 + r2)
        err = [0.0] * (r1 + r2)
        for i in range(r1):
            absv[i] = abs(y[i])
            err[i] = self.y_err[i]
        for c in range(r2):
            re, im = y[r1 + c], y[r1 + r2 + c]
            a2 = re * re + im * im
            absv[r1 + c] = a2  # squared for complex blocks
            err[r1 + c] = 2.0 * (abs(re) * self.y_err[r1 + c]
                                 + abs(im) * self.y_err[r1 + r2 + c]) \
                + self.y_err[r1 + c] ** 2 + self.y_err[r1 + r2 + c] ** 2
        # float norm prefilter
        normf = 1.0
        reliable = True
        for i in range(r1):
            normf *= absv[i]
            if absv[i] < 16.0 * err[i]:
                reliable = False
        for c in range(r2):
            normf *= absv[r1 + c]
            if absv[r1 + c] < 16.0 * err[r1 + c]:
                reliable = False
        lo_f, hi_f = float(cell.norm_lo), float(cell.norm_hi)
        if reliable:
            if normf < lo_f * (1.0 - 1e-6) - 1e-9:
                return False
            if normf > hi_f * (1.0 + 1e-6) + 1e-9:
                return False
        # sign prefilter
        pending_sign = False
        if cell.gamma is not None:
            for i in range(r1):
                yi = y[i]
                m = _REL_MARGIN * self.y_err[i]
                if yi > m:
                    if cell.gamma[i] < 0:
                        return False
                elif yi < -m:
                    if cell.gamma[i] > 0:
                        return False
                else:
                    pending_sign = True
        # alpha window prefilter
        pending_window = False
        if self.r > 0 and self.window_mode != "none":
            logs = [0.0] * (r1 + r2)
            lerr = [0.0] * (r1 + r2)
            bad = False
            for i in range(r1):
                if absv[i] <= 16.0 * err[i]:
                    bad = True
                    break
                logs[i] = math.log(absv[i])
                lerr[i] = err[i] / absv[i] * 1.1 + 1e-14
            if not bad:
                for c in range(r2):
                    a2 = absv[r1 + c]
                    if a2 <= 16.0 * err[r1 + c]:
                        bad = True
                        break
                    logs[r1 + c] = 0.5 * math.log(a2)
                    lerr[r1 + c] = 0.5 * err[r1 + c] / a2 * 1.1 + 1e-14
            if bad:
                pending_window = True
            else:
                for j in range(self.r):
                    wj = self.w_rows[j]
                    wr = self.w_rad[j]
                    aj = 0.0
                    ae = 0.0
                    for i in range(r1 + r2):
                        aj += wj[i] * logs[i]
                        ae += abs(wj[i]) * lerr[i] + wr[i] * abs(logs[i])
                    ae = _REL_MARGIN * (ae + 1e-13)
                    lo_w, hi_w = self.windows[j]
                    lo_wf, hi_wf = float(lo_w), float(hi_w)
                    if self.window_mode == "slack":
                        if aj < lo_wf - 0.25 or aj > hi_wf + 0.25:
                            return False
                        continue
                    if aj + ae < lo_wf or aj - ae >= hi_wf:
                        return False
                    if aj - ae < lo_wf or aj + ae >= hi_wf:
                        pending_window = True
        # exact norm test
        coords = self._coords(z)
        nrm = abs(self.order.norm(coords))
        if not (cell.norm_lo < nrm <= cell.norm_hi):
            return False
        # certified fallbacks
        if pending_sign or (cell.gamma is not None and not reliable):
            signs = self.emb.certified_signs(coords)
            if tuple(signs) != tuple(cell.gamma):
                return False
        if self.window_mode == "exact" and self.r > 0 and pending_window:
            if not unitlog.certify_alpha_windows(self.emb, self.ctx_ray,
                                                 coords, self.windows):
                return False
        return True

    def _coords(self, z):
        n = self.n
        rows = self.cell.lattice.hnf
        out = list(self.cell.translate)
        for u in range(n):
            zu = z[u]
            if zu:
                row = rows[u]
                for d in range(n):
                    out[d] += zu * row[d]
        return tuple(out)

    # -- enumeration --------------------------------------------------------

    def run(self, collect: bool = False, limit: int | None = None):
        n = self.n
        q = self.q
        center = self.center
        cols = [[self.mat[d][u] for d in range(n)] for u in range(n)]
        tvec = self.tvec
        count = 0
        found = []
        z = [0] * n
        # y partial sums per level: y_stack[i] = t + sum_{u>i} z_u col_u
        y_stack = [[0.0] * n for _ in range(n + 1)]
        y_stack[n] = list(tvec)

        zb = self.zbound

        def rec(i, remaining):
            nonlocal count
            if remaining < -_ENUM_SLACK:
                return
            if i < 0:
                if self._leaf(z, y_stack[0]):
                    count += 1
                    if collect:
                        found.append((tuple(z), self._coords(z)))
                    if limit is not None and count >= limit:
                        raise _EarlyStop
                return
            qii = q[i][i]
            off = 0.0
            for j in range(i + 1, n):
                off += q[i][j] * (z[j] - center[j])
            rad2 = (remaining + _ENUM_SLACK) / qii
            rad = math.sqrt(rad2) if rad2 > 0 else 0.0
            lo = math.ceil(center[i] - off - rad - 1e-9)
            hi = math.floor(center[i] - off + rad + 1e-9)
            if lo < -zb - 2 or hi > zb + 2:
                raise ArithmeticError("enumeration range exceeded zbound")
            base = y_stack[i + 1]
            col = cols[i]
            for v in range(lo, hi + 1):
                z[i] = v
                w = v - center[i] + off
                yrow = y_stack[i]
                if v:
                    for d in range(n):
                        yrow[d] = base[d] + v * col[d]
                else:
                    for d in range(n):
                        yrow[d] = base[d]
                rec(i - 1, remaining - qii * w * w)
            z[i] = 0

        try:
            rec(n - 1, self.radius2)
        except _EarlyStop:
            pass
        return count, found


class _EarlyStop(Exception):
    pass


def _ldl_float(gram):
    n = len(gram)
    q = [row[:] for row in gram]
    for i in range(n):
        for k in range(i):
            q[i][i] -= q[k][k] * q[k][i] * q[k][i]
        if q[i][i] <= 0:
            raise ArithmeticError("float Gram not positive definite")
        for j in range(i + 1, n):
            for k in range(i):
                q[i][j] -= q[k][k] * q[k][i] * q[k][j]
            q[i][j] /= q[i][i]
    return q


def _solve_float(a, b):
    n = len(a)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(m[i][col]))
        if m[piv][col] == 0:
            raise ZeroDivisionError
        m[col], m[piv] = m[piv], m[col]
        for i in range(n):
            if i != col:
                f = m[i][col] / m[col][col]
                for j in range(col, n + 1):
                    m[i][j] -= f * m[col][j]
    return [m[i][n] / m[i][i] for i in range(n)]


def _inf_norm_inv(a):
    n = len(a)
    inv = []
    for k in range(n):
        e = [1.0 if i == k else 0.0 for i in range(n)]
        inv.append(_solve_float(a, e))
    return max(sum(abs(inv[i][k]) for i in range(n)) for k in range(n))


def _iv_mat_inverse(mat, ivc: IvCtx):
    n = len(mat)
    cols = []
    from .intervals import solve
    for k in range(n):
        e = [ivc.num(1 if i == k else 0) for i in range(n)]
        cols.append(solve(mat, e))
    return [[cols[k][i] for k in range(n)] for i in range(n)]  # inverse rows


# ---------------------------------------------------------------------------
# public operations

def cell_windows(ctx_ray, k):
    return tuple((Fraction(k[j], ctx_ray.m[j]),
                  Fraction(k[j] + 1, ctx_ray.m[j]))
                 for j in range(len(k)))


def enumerate_in_cell(cell: CellSpec, emb, ctx_ray, collect: bool = False):
    """Exact count of lattice translate points in one twisted cell."""
    windows = cell_windows(ctx_ray, cell.k)
    eng = CellEngine(emb, ctx_ray, cell, windows)
    count, found = eng.run(collect=collect)
    if collect:
        return count, found
    return count


def _all_twists(m_list):
    out = [()]
    for m in m_list:
        out = [t + (k,) for t in out for k in range(m)]
    return out


def twisted_gram_provider(emb, ctx_ray, lattice: Ideal, k):
    """Gram of h'(phi(aq) . beta_k) as an interval provider."""
    fd = ctx_ray.fd
    n, r1, r2 = fd.degree, fd.r1, fd.r2

    def fn(ivc: IvCtx):
        basis = emb.basis_at(ivc.prec)
        beta = unitlog.beta_twist(ctx_ray, emb, k, prec=ivc.prec) \
            if ctx_ray.r > 0 else None
        vecs = []
        for g in lattice.hnf:
            dims = []
            for i in range(r1):
                v = basis.sigma_real(g, i)
                if beta is not None:
                    v = v * beta.values[i]
                dims.append(v)
            res, ims = [], []
            for c in range(r2):
                re, im = basis.sigma_complex(g, c)
                if beta is not None:
                    re = re * beta.values[r1 + c]
                    im = im * beta.values[r1 + c]
                res.append(re)
                ims.append(im)
            vecs.append(dims + res + ims)
        gram = []
        for a in range(n):
            row = []
            for b in range(n):
                acc = None
                for d in range(n):
                    t = vecs[a][d] * vecs[b][d]
                    acc = t if acc is None else acc + t
                row.append(acc)
            gram.append(row)
        return gram

    return latcount.IvGram(fn, n)


def count_S(a: Ideal, q: Ideal, b, gamma, t_pow_n: Fraction, emb, ctx_ray,
            ncinv, drop_m_if_possible: bool = True) -> CellCountReport:
    """Shell count over (t^n/2, t^n]: exact count, main term, certified
    error bound, and the bound verdict.

    The scale enters as the exact norm-window top t^n; the real number t
    only ever appears inside certified interval formulas.
    """
    fd = ctx_ray.fd
    order = Order.for_field(fd)
    n, r1, r2 = fd.degree, fd.r1, fd.r2
    r = ctx_ray.r
    if not algebra.ideals_coprime(order, a, q):
        raise ValueError("a and q must be coprime")
    if t_pow_n < 1:
        raise ValueError("shell counting needs t >= 1")
    aq = algebra.ideal_mul(order, a, q)
    u = algebra.idempotent_one(order, a, q)
    translate = order.mul(u, b)
    tn = Fraction(t_pow_n)
    total = 0
    per_cell = {}
    for k in _all_twists(ctx_ray.m):
        cell = CellSpec(lattice=aq, translate=translate, gamma=gamma,
                        k=k, norm_lo=tn / 2, norm_hi=tn)
        per_cell[k] = enumerate_in_cell(cell, emb, ctx_ray)
        total += per_cell[k]

    m_prod = 1
    for m in ctx_ray.m:
        m_prod *= m
    q_is_ok = (q.norm == 1)

    # delta_1 of every twisted lattice (certified); only needed when the
    # m-term omission hinges on the shortest-vector condition
    delta1 = {}
    if not q_is_ok and drop_m_if_possible and r > 0:
        for k in _all_twists(ctx_ray.m):
            prov = twisted_gram_provider(emb, ctx_ray, aq, k)
            lat = latcount.Lattice.from_gram_provider(prov)
            _, nrm2 = latcount.shortest_vector_iv(lat)
            delta1[k] = nrm2

    def verdicts(ivc: IvCtx):
        r_q1 = unitlog.q1_regulator(ctx_ray, emb, prec=ivc.prec)
        tn_iv = ivc.num(tn)
        t_iv = ivc.pow(tn_iv, Fraction(1, n))
        main = (2 * ivc.pi()) ** r2 * r_q1 * tn_iv \
            / (ivc.sqrt(ivc.num(4 * abs(fd.disc))) * aq.norm)
        # m-term omission test
        dropped = q_is_ok
        if not dropped and drop_m_if_possible and r > 0:
            thresh = ivc.sqrt(ivc.num(n)) * (2 * ivc.pi() + r) \
                * ivc.pow(ivc.e(), r) * t_iv
            all_le = True
            for k, d2 in delta1.items():
                cmpv = ivc.sqrt(d2) <= thresh
                if cmpv is not True:
                    all_le = False
                    break
            dropped = all_le
        ncinv_iv = ncinv if hasattr(ncinv, "a") else ivc.num(ncinv)
        ebound = ivc.exp(ivc.num(n * n + 8 * n)) \
            * ivc.pow(ivc.num(n), Fraction(3 * n * n, 2)
                      + Fraction(11 * n, 2) - Fraction(1, 2)) \
            * ncinv_iv * ivc.pow(t_iv, n - 1) \
            / ivc.pow(ivc.num(aq.norm), Fraction(n - 1, n))
        if not dropped:
            ebound = ebound + m_prod
        diff = abs(main - total)
        holds = diff <= ebound
        if holds is None:
            return None
        return main, ebound, dropped, bool(holds)

    main, ebound, dropped, holds = escalate(verdicts, start=128,
                                            what="shell-count bound")
    return CellCountReport(count=total, per_cell=per_cell, main=main,
                           bound=ebound, m_dropped=dropped,
                           delta1_sq=delta1, holds=holds)


_POOL_STATE: dict = {}


def _pool_cell_count(k):
    st = _POOL_STATE
    cell = CellSpec(lattice=st["aq"], translate=st["translate"],
                    gamma=st["gamma"], k=k, norm_lo=st["norm_lo"],
                    norm_hi=st["norm_hi"])
    return k, enumerate_in_cell(cell, st["emb"], st["ctx"])


def count_domain(a: Ideal, q: Ideal, b, gamma, norm_hi: Fraction, emb,
                 ctx_ray, per_cell_out: dict | None = None,
                 jobs: int = 1) -> int:
    """Count of the full domain F_gamma(0,1,...,0,1,norm_hi) intersected
    with the translated ideal lattice, cell by cell (direct mode).

    jobs > 1 fans the independent (gamma, k) cells out over a process
    pool (fork; workers inherit the prepared context read-only); counts
    recombine by associative sum in sorted twist order, so the result is
    byte-deterministic regardless of worker scheduling.
    """
    fd = ctx_ray.fd
    order = Order.for_field(fd)
    if not algebra.ideals_coprime(order, a, q):
        raise ValueError("a and q must be coprime")
    aq = algebra.ideal_mul(order, a, q)
    u = algebra.idempotent_one(order, a, q)
    translate = order.mul(u, b)
    twists = _all_twists(ctx_ray.m)
    results = {}
    if jobs > 1 and len(twists) > 1:
        import multiprocessing as mp
        _POOL_STATE.update(aq=aq, translate=translate, gamma=gamma,
                           norm_lo=Fraction(0),
                           norm_hi=Fraction(norm_hi), emb=emb, ctx=ctx_ray)
        try:
            with mp.get_context("fork").Pool(min(jobs, len(twists))) as pool:
                for k, c in pool.map(_pool_cell_count, twists):
                    results[k] = c
        finally:
            _POOL_STATE.clear()
    else:
        for k in twists:
            cell = CellSpec(lattice=aq, translate=translate, gamma=gamma,
                            k=k, norm_lo=Fraction(0),
                            norm_hi=Fraction(norm_hi))
            results[k] = enumerate_in_cell(cell, emb, ctx_ray)
    total = 0
    for k in sorted(results):
        if per_cell_out is not None:
            per_cell_out[k] = results[k]
        total += results[k]
    return total


def count_untwisted_domain(a: Ideal, q: Ideal, b, gamma,
                           norm_lo: Fraction, norm_hi: Fraction,
                           emb, ctx_ray) -> int:
    """Direct certified enumeration of the untwisted domain
    F_{1/2,gamma}(X) (single box over the full [0,1) windows); used to
    verify the partition identity against the sum over twisted cells."""
    fd = ctx_ray.fd
    order = Order.for_field(fd)
    aq = algebra.ideal_mul(order, a, q)
    u = algebra.idempotent_one(order, a, q)
    translate = order.mul(u, b)
    cell = CellSpec(lattice=aq, translate=translate, gamma=gamma,
                    k=tuple(0 for _ in ctx_ray.m),
                    norm_lo=Fraction(norm_lo), norm_hi=Fraction(norm_hi))
    windows = tuple((Fraction(0), Fraction(1)) for _ in ctx_ray.m)
    eng = CellEngine(emb, ctx_ray, cell, windows)
    count, _ = eng.run()
    return count
