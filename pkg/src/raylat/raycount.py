"""The headline pipeline: count ideals in a narrow ray class by the
fundamental-domain lattice method, compare with the census oracle, and
verify the fully explicit main term and error bound

    count(x) = alpha_K phi(q) x / (h_Kq N(q))
               + O*( E(K) F(q)^{1/n} log(3F(q))^n (x/Nq)^{1-1/n}
                     + n^{8n} (R_K/|mu_K|) F(q) ),

with F(q) = 2^{r1} phi(q) h_K / h_Kq and
E(K) = 1000 n^{12n^2} (R_K/|mu_K|)^{1/n} [log((2n)^{4n} R_K/|mu_K|)]^n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import algebra, cells, oracle, unitlog
from .algebra import Ideal, Order
from .fielddata import FieldDescriptor
from .intervals import (IvCtx, contains_zero, escalate, lower_float,
                        mid_float)
from .unitlog import LogEmbedding, RayContext


def regulator_interval(fd: FieldDescriptor, emb: LogEmbedding, prec: int = 128):
    """R_K as a certified interval (exactly 1 when the unit rank is 0)."""
    if fd.unit_rank == 0:
        return IvCtx(prec).num(1)

    def attempt(ctx: IvCtx):
        basis = emb.basis_at(ctx.prec)
        from .intervals import det
        rows = []
        for i in range(fd.unit_rank):
            e_i = emb.weights[i]
            rows.append([basis.log_abs(u, i) * e_i for u in fd.units])
        d = det(rows)
        if contains_zero(d):
            return None
        return abs(d)

    return escalate(attempt, start=prec, what="regulator")


def residue_alpha_K(fd: FieldDescriptor, emb: LogEmbedding, prec: int = 128):
    """alpha_K = 2^{r1} (2 pi)^{r2} h_K R_K / (|mu_K| sqrt|d_K|)."""
    ctx = IvCtx(prec)
    r = regulator_interval(fd, emb, prec)
    num = ctx.num(2) ** fd.r1 * (2 * ctx.pi()) ** fd.r2 \
        * fd.class_number * r
    return num / (fd.torsion_order * ctx.sqrt(ctx.num(abs(fd.disc))))


def F_constant(fd: FieldDescriptor, ray: RayContext) -> Fraction:
    """F(q) = 2^{r1} phi(q) h_K / h_Kq, exact and >= 1."""
    f = Fraction(2 ** fd.r1 * ray.phi * fd.class_number, ray.h_kq)
    if f < 1:
        raise ArithmeticError("F(q) < 1 signals an inconsistent h_Kq")
    return f


def E_constant(fd: FieldDescriptor, emb: LogEmbedding, prec: int = 128):
    """E(K) = 1000 n^{12n^2} (R/|mu|)^{1/n} [log((2n)^{4n} R/|mu|)]^n."""
    ctx = IvCtx(prec)
    n = fd.degree
    rt = regulator_interval(fd, emb, prec) / fd.torsion_order
    body = ctx.num((2 * n) ** (4 * n)) * rt
    return 1000 * ctx.num(n) ** (12 * n * n) \
        * ctx.pow(rt, Fraction(1, n)) * ctx.log(body) ** n


def error_bound(fd: FieldDescriptor, ray: RayContext, emb: LogEmbedding,
                x, prec: int = 128):
    """Explicit error bound at x (certified interval)."""
    ctx = IvCtx(prec)
    n = fd.degree
    f = F_constant(fd, ray)
    e = E_constant(fd, emb, prec)
    rt = regulator_interval(fd, emb, prec) / fd.torsion_order
    xract = ctx.num(Fraction(x)) / ray.q.norm
    term1 = e * ctx.pow(ctx.num(f), Fraction(1, n)) \
        * ctx.log(ctx.num(3 * f)) ** n \
        * ctx.pow(xract, Fraction(n - 1, n))
    term2 = ctx.num(n) ** (8 * n) * rt * ctx.num(f)
    return term1 + term2


def main_term(fd: FieldDescriptor, ray: RayContext, emb: LogEmbedding,
              x, prec: int = 128):
    """alpha_K phi(q) x / (h_Kq N(q)) as a certified interval."""
    ctx = IvCtx(prec)
    a = residue_alpha_K(fd, emb, prec)
    return a * ray.phi * ctx.num(Fraction(x)) / (ray.h_kq * ray.q.norm)


# ---------------------------------------------------------------------------
# counting one ray class

def count_ray_class(fd: FieldDescriptor, ray: RayContext, emb: LogEmbedding,
                    c: Ideal, x, method: str = "lattice",
                    census: oracle.IdealCensus | None = None,
                    shell_reports: list | None = None,
                    ncinv=None, jobs: int = 1) -> int:
    """Ideals in the class [b] = [c]^{-1} of norm <= x.

    lattice: count alpha in c, alpha = 1 mod* q1 (totally positive),
    0 < |N(alpha)| <= x N(c), one fundamental-domain representative per
    unit orbit, divided exactly by mu_q1.  oracle: census bucket size.
    shell_reports, when a list is supplied, switches the lattice count to
    dyadic count_S shells and appends each shell's CellCountReport.
    """
    order = Order.for_field(fd)
    if method == "oracle":
        if census is None or not census.buckets:
            raise ValueError("oracle method needs a classified census")
        if census.bound < x:
            raise ValueError(
                f"census bound {census.bound} < x = {x}: would undercount")
        b_idx = _bucket_of_inverse(fd, ray, emb, census, c)
        return sum(1 for i in census.buckets[b_idx]
                   if census.entries[i].norm <= x)
    if not algebra.ideals_coprime(order, c, ray.q):
        raise ValueError("class representative must be coprime to q")
    gamma = tuple(1 for _ in range(fd.r1))
    cap = Fraction(x) * c.norm
    if shell_reports is None:
        raw = cells.count_domain(c, ray.q, order.one, gamma, cap, emb, ray,
                                 jobs=jobs)
    else:
        if ncinv is None:
            raise ValueError("shell mode needs the class constant N(C^{-1})")
        raw = 0
        shell_hi = cap
        while shell_hi >= 1:
            rep = cells.count_S(c, ray.q, order.one, gamma, shell_hi, emb,
                                ray, ncinv=ncinv)
            if not rep.holds:
                raise ArithmeticError(
                    f"shell-count bound failed on shell {shell_hi}")
            shell_reports.append(rep)
            raw += rep.count
            shell_hi = shell_hi / 2
    if raw % ray.mu_q1 != 0:
        raise ArithmeticError(
            f"lattice count {raw} not divisible by mu_q1={ray.mu_q1}; "
            "domain membership bug")
    return raw // ray.mu_q1


def _bucket_of_inverse(fd, ray, emb, census, c: Ideal) -> int:
    """Bucket index holding the class [c]^{-1}."""
    order = Order.for_field(fd)
    state = oracle.ClassifierState(fd, ray, emb, census)
    for b, rep_idx in enumerate(census.reps):
        rep = census.entries[rep_idx]
        prod = algebra.ideal_mul(order, rep.ideal, c)
        if _ray_trivial(fd, ray, emb, census, state, prod):
            return b
    raise ArithmeticError("no census bucket matches the inverse class")


def _ray_trivial(fd, ray, emb, census, state, ideal: Ideal) -> bool:
    """Is the (factored) ideal trivial in the narrow ray class group."""
    order = Order.for_field(fd)
    fac = ideal.factorization
    if fac is None:
        fac = algebra.factor_ideal(fd, ideal)
    parity = 0
    gen = tuple(order.one)
    for pid, e in fac:
        p_, e_, f_, par_p, g_p, _ = census.primes[pid.hnf]
        for _ in range(e):
            gen = order.mul(gen, g_p)
            parity += par_p
    if parity % 2:
        return False
    folds = parity // 2
    if folds:
        gen = oracle._exact_divide(order, gen,
                                   order.power(census.j0_sq_gen, folds))
    return oracle._coset_condition(order, state.rr, state.signs, ray,
                                   gen, 1)


# ---------------------------------------------------------------------------
# N(C^{-1}) and its bound

def ncinv_exact(fd: FieldDescriptor, ray: RayContext, emb: LogEmbedding,
                cq: Ideal, m_product: int, prec: int = 128):
    """Sum of N(b)^{-(n-1)/n} over the m_product smallest-norm integral
    ideals in the class of (cq)^{-1} (certified interval)."""
    order = Order.for_field(fd)
    bound = 4 * m_product + 16
    while True:
        census = oracle.enumerate_ideals(fd, bound)
        oracle._attach_generators(fd, emb, census)
        parity = _ideal_parity(fd, census, cq)
        try:
            norms = oracle.smallest_norms_in_class(fd, census, parity,
                                                   m_product)
            break
        except ValueError:
            bound *= 2
            if bound > 10 ** 6:
                raise
    ctx = IvCtx(prec)
    n = fd.degree
    acc = ctx.num(0)
    for nm in norms:
        acc = acc + ctx.pow(ctx.num(nm), Fraction(-(n - 1), n))
    return acc


def _ideal_parity(fd, census, ideal: Ideal) -> int:
    fac = ideal.factorization
    if fac is None:
        fac = algebra.factor_ideal(fd, ideal)
    parity = 0
    for pid, e in fac:
        parity += census.primes[pid.hnf][3] * e
    return parity % 2


def ncinv_bound(m_product: int, n: int, prec: int = 128):
    """Ordered-norm tail bound 6 n y^{1/n} (log y)^{(n-1)^2/n},
    valid for y = m_product >= 2."""
    if m_product < 2:
        raise ValueError("bound needs y >= 2")
    ctx = IvCtx(prec)
    y = ctx.num(m_product)
    return 6 * n * ctx.pow(y, Fraction(1, n)) \
        * ctx.pow(ctx.log(y), Fraction((n - 1) ** 2, n))


# ---------------------------------------------------------------------------
# proof-constant checks

def proof_constant_holds(n: int, prec: int = 128) -> bool:
    """e^{n^2+8n} n^{(3/2)n^2+(11/2)n-1/2} 6n (2n)^4 <= 500 n^{12 n^2}."""
    ctx = IvCtx(prec)
    lhs = ctx.exp(ctx.num(n * n + 8 * n)) \
        * ctx.pow(ctx.num(n), Fraction(3 * n * n, 2) + Fraction(11 * n, 2)
                  - Fraction(1, 2)) \
        * 6 * n * ctx.num((2 * n) ** 4)
    rhs = 500 * ctx.num(n) ** (12 * n * n)
    out = lhs <= rhs
    if out is None:
        raise ArithmeticError("proof constant comparison indeterminate")
    return bool(out)


def sum_le_twice_product(a: float, b: float) -> bool:
    """a + b <= 2ab for a, b >= 1."""
    return a + b <= 2 * a * b


# ---------------------------------------------------------------------------
# the verification driver

@dataclass
class ClassResult:
    rep_norm: int
    rows: list  # per x: dict with counts, main, error, bound, verdict


@dataclass
class CountReport:
    label: str
    modulus: str
    q_norm: int
    phi: int
    h_kq: int
    mu_q1: int
    m: tuple
    alpha_k: float
    f_q: Fraction
    e_k: float
    r_q1: float
    classes: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def overall(self) -> bool:
        rows_ok = all(row["verdict"] for c in self.classes for row in c.rows)
        return rows_ok and all(ok for _, ok in self.checks)


def verify_asymptotic(fd: FieldDescriptor, ray: RayContext,
                      emb: LogEmbedding, x_grid, census=None,
                      modulus_label: str = "", density_tol: float = 0.05,
                      jobs: int = 1):
    """Run both counting methods over every ray class and the x grid,
    assert the explicit bound, and aggregate verdicts."""
    order = Order.for_field(fd)
    xs = sorted(x_grid)
    x_max = xs[-1]
    if census is None or not census.buckets:
        census = oracle.classify(fd, ray, x_max, emb=emb)
    if oracle.empirical_hKq(census) != ray.h_kq:
        raise ArithmeticError("empirical class count != h_Kq")

    prec = 128
    report = CountReport(
        label=fd.label, modulus=modulus_label, q_norm=ray.q.norm,
        phi=ray.phi, h_kq=ray.h_kq, mu_q1=ray.mu_q1, m=ray.m,
        alpha_k=mid_float(residue_alpha_K(fd, emb, prec)),
        f_q=F_constant(fd, ray),
        e_k=mid_float(E_constant(fd, emb, prec)),
        r_q1=mid_float(unitlog.q1_regulator(ray, emb, prec)))

    # one inverse-class representative per bucket
    inv_reps = []
    for b, rep_idx in enumerate(census.reps):
        rep = census.entries[rep_idx]
        inv_idx = _bucket_of_inverse(fd, ray, emb, census, rep.ideal)
        inv_reps.append(census.entries[census.reps[inv_idx]].ideal)

    for b, rep_idx in enumerate(census.reps):
        rep = census.entries[rep_idx]
        c = inv_reps[b]
        rows = []
        for x in xs:
            lat = count_ray_class(fd, ray, emb, c, x, method="lattice",
                                  jobs=jobs)
            orc = sum(1 for i in census.buckets[b]
                      if census.entries[i].norm <= x)

            def check(ctx: IvCtx):
                mt = main_term(fd, ray, emb, x, ctx.prec)
                eb = error_bound(fd, ray, emb, x, ctx.prec)
                diff = abs(mt - lat)
                ok = diff <= eb
                if ok is None:
                    return None
                return mt, eb, bool(ok)

            mt, eb, ok = escalate(check, start=prec,
                                  what="headline bound check")
            rows.append({
                "x": x,
                "count_lattice": lat,
                "count_oracle": orc,
                "main": mid_float(mt),
                "abs_error": abs(lat - mid_float(mt)),
                "bound": lower_float(eb),
                "verdict": bool(ok and lat == orc),
            })
        report.classes.append(ClassResult(rep_norm=rep.norm, rows=rows))

    # proof-internal constant checks for this field's degree
    report.checks.append((f"proof_constant_n{fd.degree}",
                          proof_constant_holds(fd.degree)))
    grid = [1.0, 1.5, 2.0, 5.0, 10.0]
    report.checks.append(("a_plus_b_le_2ab",
                          all(sum_le_twice_product(a, b)
                              for a in grid for b in grid)))
    # density sanity at the largest grid point
    dens_ok = True
    for cres in report.classes:
        row = cres.rows[-1]
        ratio = row["count_lattice"] / row["main"] if row["main"] else 0.0
        if not (1 - density_tol <= ratio <= 1 + density_tol):
            dens_ok = False
    report.checks.append((f"density_within_{density_tol}", dens_ok))
    return report, census


# ---------------------------------------------------------------------------
# report serialization

def report_tsv(report: CountReport) -> str:
    lines = ["class\tx\tcount_lattice\tcount_oracle\tmain_term\t"
             "abs_error\tbound\tverdict"]
    for b, cres in enumerate(report.classes):
        for row in cres.rows:
            lines.append(
                f"{b}\t{row['x']}\t{row['count_lattice']}\t"
                f"{row['count_oracle']}\t{row['main']:.6f}\t"
                f"{row['abs_error']:.6f}\t{row['bound']:.6e}\t"
                f"{'pass' if row['verdict'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def report_json(report: CountReport) -> str:
    obj = {
        "label": report.label,
        "modulus": report.modulus,
        "q_norm": report.q_norm,
        "phi_q": report.phi,
        "h_kq": report.h_kq,
        "mu_q1": report.mu_q1,
        "m": list(report.m),
        "constants": {
            "alpha_K": report.alpha_k,
            "F_q": str(report.f_q),
            "E_K": report.e_k,
            "R_q1": report.r_q1,
        },
        "classes": [
            {"rep_norm": c.rep_norm, "rows": c.rows}
            for c in report.classes
        ],
        "checks": [{"name": n, "pass": bool(ok)} for n, ok in report.checks],
        "overall": report.overall,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
