"""Independent ground truth: enumerate every integral ideal of norm <= X
by multiplying prime-power splittings, then sort them into narrow ray
classes by exact principality-with-congruence tests.

The oracle never touches the main-term or error-bound machinery; it uses
only exact ideal arithmetic, bounded element enumeration (for principal
generators) and exact residue/sign tests.  Classification is greedy over
the norm-ordered census: the first unclassified coprime ideal founds a
bucket, later ideals join the first equivalent bucket.  Generators of
census ideals are obtained multiplicatively from cached prime generators,
which keeps classification at desk scale; the pairwise enumerative test
(ray_equivalent) is the reference implementation and is cross-checked
against the cached path in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import algebra, cells, unitlog
from .algebra import Ideal, Order
from .fielddata import FieldDescriptor
from .unitlog import LogEmbedding, RayContext


@dataclass
class CensusEntry:
    ideal: Ideal
    norm: int
    parity: int            # class-group parity (0 principal; h <= 2 fast path)
    gen: tuple | None      # generator of ideal * j0^parity (fast path)
    bucket: int = -1       # -1 unclassified / not coprime


@dataclass
class IdealCensus:
    label: str
    bound: int
    entries: list          # CensusEntry sorted by (norm, hnf)
    primes: dict           # hnf -> (p, e, f, parity, gen, hat_factors)
    j0: Ideal | None = None
    j0_sq_gen: tuple | None = None
    buckets: list = field(default_factory=list)  # bucket -> entry indices
    reps: list = field(default_factory=list)     # bucket -> entry index

    def ideals_norm_le(self, x):
        return [e for e in self.entries if e.norm <= x]


# ---------------------------------------------------------------------------
# bounded generator search

class _SearchCtx:
    """Duck-typed stand-in for RayContext over the full unit group."""

    def __init__(self, fd: FieldDescriptor):
        self.fd = fd
        r = fd.unit_rank
        self.eta = tuple(
            unitlog.UnitProduct(
                exps=tuple(1 if i == j else 0 for i in range(r)),
                tors=0, coords=u)
            for j, u in enumerate(fd.units))
        self.m = tuple(1 for _ in range(r))
        self.mu_q1 = fd.torsion_order

    @property
    def r(self):
        return self.fd.unit_rank


_SEARCH_WINDOW = (Fraction(-1, 8), Fraction(9, 8))


def find_generator(fd: FieldDescriptor, emb: LogEmbedding, ideal: Ideal,
                   want_all: bool = False):
    """An element generating the (principal) ideal, or None.

    Complete: any generator has an associate whose unit-domain coordinates
    lie in [0,1)^r, and the search box covers a widened window.
    """
    order = Order.for_field(fd)
    sctx = _SearchCtx(fd)
    windows = tuple(_SEARCH_WINDOW for _ in range(sctx.r))
    target = ideal.norm
    cell = cells.CellSpec(lattice=ideal, translate=tuple(0 for _ in order.one),
                          gamma=None, k=tuple(0 for _ in range(sctx.r)),
                          norm_lo=Fraction(target - 1),
                          norm_hi=Fraction(target))
    eng = cells.CellEngine(emb, sctx, cell, windows, window_mode="slack")
    count, found = eng.run(collect=True, limit=None if want_all else 1)
    gens = []
    for _, coords in found:
        made = algebra.ideal_from_generators(order, [coords])
        if made.hnf == ideal.hnf:
            gens.append(coords)
    if want_all:
        return gens
    return gens[0] if gens else None


# ---------------------------------------------------------------------------
# census construction

def enumerate_ideals(fd: FieldDescriptor, x: int) -> IdealCensus:
    """All integral ideals of norm <= x, each exactly once."""
    if x < 1:
        raise ValueError("census bound must be >= 1")
    order = Order.for_field(fd)
    primes = {}
    prime_list = []
    for p in _rational_primes(x):
        if p ** 1 > x:
            break
        for pid, e, f in algebra.prime_splitting(fd, p):
            if pid.norm <= x:
                primes[pid.hnf] = (p, e, f)
                prime_list.append(pid)
    # multiplicative combination
    current = [algebra.unit_ideal(order)]
    for pid in prime_list:
        nxt = []
        for ideal in current:
            nxt.append(ideal)
            power = ideal
            while power.norm * pid.norm <= x:
                power = algebra.ideal_mul(order, power, pid)
                nxt.append(power)
        current = nxt
    entries = [CensusEntry(ideal=i, norm=i.norm, parity=0, gen=None)
               for i in current]
    entries.sort(key=lambda e: (e.norm, e.ideal.hnf))
    return IdealCensus(label=fd.label, bound=x, entries=entries,
                       primes={h: v + (None, None, None)
                               for h, v in primes.items()})


def _rational_primes(x: int):
    out = []
    for n in range(2, x + 1):
        ok = True
        for p in out:
            if p * p > n:
                break
            if n % p == 0:
                ok = False
                break
        if ok:
            out.append(n)
    return out


def _prime_hat_factors(fd: FieldDescriptor, pid_hnf, census: IdealCensus):
    """P-hat = N(P) P^{-1} as a multiset of census primes (with exponents)."""
    p, e_p, f_p = census.primes[pid_hnf][:3]
    hat = []
    for qid, e_q, f_q in algebra.prime_splitting(fd, p):
        mult = f_p * e_q - (1 if qid.hnf == pid_hnf else 0)
        if mult:
            hat.append((qid, mult))
    return tuple(hat)


def _attach_generators(fd: FieldDescriptor, emb: LogEmbedding,
                       census: IdealCensus):
    """Fill prime generator data; fast path needs class number <= 2."""
    order = Order.for_field(fd)
    h = fd.class_number
    if h > 2:
        return False
    j0 = None
    j0_sq_gen = None
    new_primes = {}
    for hnf, data in sorted(census.primes.items(),
                            key=lambda kv: (algebra.det_int(kv[0]), kv[0])):
        p, e, f = data[:3]
        pid = Ideal(hnf=hnf, norm=p ** f)
        g = find_generator(fd, emb, pid)
        if g is not None:
            new_primes[hnf] = (p, e, f, 0, g, None)
            continue
        if h == 1:
            raise ArithmeticError(
                f"no generator found for a prime over {p} in a class-number-1 "
                "field; search box too small or invariants wrong")
        if j0 is None:
            j0 = pid
            sq = algebra.ideal_mul(order, pid, pid)
            j0_sq_gen = find_generator(fd, emb, sq)
            if j0_sq_gen is None:
                raise ArithmeticError("j0^2 not principal; h=2 bookkeeping broken")
        prod = algebra.ideal_mul(order, pid, j0)
        g = find_generator(fd, emb, prod)
        if g is None:
            raise ArithmeticError(
                f"prime over {p}: neither P nor P*j0 principal with h=2")
        new_primes[hnf] = (p, e, f, 1, g, None)
    # hat factor data
    final = {}
    for hnf, (p, e, f, parity, g, _) in new_primes.items():
        census.primes[hnf] = (p, e, f, parity, g, None)
    for hnf in list(new_primes):
        p, e, f, parity, g, _ = new_primes[hnf]
        hat = _prime_hat_factors(fd, hnf, census)
        final[hnf] = (p, e, f, parity, g, hat)
    census.primes = final
    census.j0 = j0
    census.j0_sq_gen = j0_sq_gen
    # per-entry generators, multiplicatively
    for entry in census.entries:
        parity = 0
        gen = tuple(order.one)
        two_powers = 0
        fac = entry.ideal.factorization
        if fac is None:
            fac = algebra.factor_ideal(fd, entry.ideal)
        for pid, e in fac:
            p_, e_, f_, par_p, g_p, _ = census.primes[pid.hnf]
            for _ in range(e):
                gen = order.mul(gen, g_p)
                parity += par_p
        # fold j0^2 = (j0_sq_gen) back out
        folds = parity // 2
        entry.parity = parity % 2
        if folds:
            divisor = order.power(census.j0_sq_gen, folds)
            gen = _exact_divide(order, gen, divisor)
        entry.gen = gen
    return True


def _exact_divide(order: Order, x, d):
    inv = order.inverse_frac(d)
    out = order.mul_frac(tuple(Fraction(c) for c in x), inv)
    assert all(c.denominator == 1 for c in out), "inexact element division"
    return tuple(int(c) for c in out)


# ---------------------------------------------------------------------------
# sign and congruence tests

class _SignTester:
    """Fast float signs with certified fallback."""

    def __init__(self, fd: FieldDescriptor, emb: LogEmbedding):
        self.fd = fd
        self.emb = emb
        basis = emb.basis_at(emb.base_prec)
        reals, _, rad = basis.float_roots()
        self.roots = reals
        self.rad = rad
        self.basis_rows = [[float(x) for x in row] for row in fd.integral_basis]

    def signs(self, coords):
        fd = self.fd
        if fd.r1 == 0:
            return ()
        out = []
        for root in self.roots:
            # evaluate the element's power-basis polynomial at the root
            acc = 0.0
            err = 0.0
            powv = 1.0
            poly = [0.0] * fd.degree
            for ci, row in zip(coords, self.basis_rows):
                if ci:
                    for j, bj in enumerate(row):
                        poly[j] += ci * bj
            for j in range(fd.degree):
                acc += poly[j] * powv
                err += abs(poly[j]) * (abs(powv) * 1e-14 + self.rad * j
                                       * max(1.0, abs(root)) ** max(j - 1, 0))
                powv *= root
            if acc > 4 * err + 1e-280:
                out.append(1)
            elif acc < -4 * err - 1e-280:
                out.append(-1)
            else:
                return self.emb.certified_signs(coords)
        return tuple(out)


def _coset_condition(order: Order, rr, sign_tester, ctx: RayContext,
                     gamma_elt, target_int: int):
    """True iff some U_{q1}-coset multiple u*gamma satisfies
    u*gamma = target mod q and u*gamma/target totally positive."""
    target = order.from_int(target_int)
    target_red = rr.reduce(target)
    tsign = 1 if target_int > 0 else -1
    want = tuple(tsign for _ in range(ctx.fd.r1))
    for u in ctx.cosets:
        v = order.mul(gamma_elt, u.coords)
        if rr.reduce(v) != target_red:
            continue
        if ctx.fd.r1 == 0:
            return True
        if sign_tester.signs(v) == want:
            return True
    return False


# ---------------------------------------------------------------------------
# classification

class ClassifierState:
    def __init__(self, fd: FieldDescriptor, ctx: RayContext,
                 emb: LogEmbedding, census: IdealCensus):
        self.fd = fd
        self.ctx = ctx
        self.emb = emb
        self.census = census
        self.order = Order.for_field(fd)
        self.rr = algebra.ResidueRing(self.order, ctx.q, ctx.phi)
        self.signs = _SignTester(fd, emb)
        self.fast = census.primes and all(
            v[4] is not None for v in census.primes.values())

    def hat_data(self, entry: CensusEntry):
        """(parity, gen) of the complementary ideal N(b)/b."""
        order = self.order
        fac = entry.ideal.factorization
        if fac is None:
            fac = algebra.factor_ideal(self.fd, entry.ideal)
        parity = 0
        gen = tuple(order.one)
        for pid, e in fac:
            for qid, mult in self.census.primes[pid.hnf][5]:
                p_, e_, f_, par_q, g_q, _ = self.census.primes[qid.hnf]
                for _ in range(mult * e):
                    gen = order.mul(gen, g_q)
                    parity += par_q
        folds = parity // 2
        if folds:
            gen = _exact_divide(order, gen,
                                self.order.power(self.census.j0_sq_gen, folds))
        return parity % 2, gen

    def equivalent_cached(self, a: CensusEntry, b: CensusEntry,
                          b_hat=None) -> bool:
        """a ~ b in the narrow ray class group, via cached generators."""
        if a.parity != b.parity:
            return False
        order = self.order
        if b_hat is None:
            b_hat = self.hat_data(b)
        hat_par, hat_gen = b_hat
        parity = a.parity + hat_par
        gamma = order.mul(a.gen, hat_gen)
        folds = parity // 2
        if folds:
            gamma = _exact_divide(order, gamma,
                                  order.power(self.census.j0_sq_gen, folds))
        if parity % 2 != 0:
            return False
        return _coset_condition(order, self.rr, self.signs, self.ctx,
                                gamma, b.norm)


def classify(fd: FieldDescriptor, ctx: RayContext, x_or_census,
             emb: LogEmbedding | None = None) -> IdealCensus:
    """Greedy narrow-ray classification of the census."""
    if emb is None:
        emb = LogEmbedding(fd)
    if isinstance(x_or_census, IdealCensus):
        census = x_or_census
    else:
        census = enumerate_ideals(fd, x_or_census)
    order = Order.for_field(fd)
    if not census.primes or any(len(v) < 6 or v[4] is None
                                for v in census.primes.values()):
        _attach_generators(fd, emb, census)
    state = ClassifierState(fd, ctx, emb, census)
    census.buckets = []
    census.reps = []
    rep_hats = []
    h_bound = ctx.h_kq
    for idx, entry in enumerate(census.entries):
        entry.bucket = -1
        if not algebra.ideals_coprime(order, entry.ideal, ctx.q):
            continue
        placed = False
        for b, rep_idx in enumerate(census.reps):
            rep = census.entries[rep_idx]
            if state.equivalent_cached(entry, rep, rep_hats[b]):
                census.buckets[b].append(idx)
                entry.bucket = b
                placed = True
                break
        if not placed:
            census.reps.append(idx)
            census.buckets.append([idx])
            entry.bucket = len(census.reps) - 1
            rep_hats.append(state.hat_data(entry))
            if len(census.reps) > h_bound:
                raise ArithmeticError(
                    f"bucket count exceeded h_Kq = {h_bound}; "
                    "classification inconsistent")
    return census


def empirical_hKq(census: IdealCensus) -> int:
    return len(census.buckets)


# ---------------------------------------------------------------------------
# pairwise oracle test (reference path)

def ray_equivalent(fd: FieldDescriptor, ctx: RayContext, a: Ideal, b: Ideal,
                   emb: LogEmbedding | None = None) -> bool:
    """True iff a b^{-1} is principal with a totally positive generator
    congruent to 1 mod q; enumerative (cache-free) implementation."""
    if emb is None:
        emb = LogEmbedding(fd)
    order = Order.for_field(fd)
    if not algebra.ideals_coprime(order, a, ctx.q) or \
            not algebra.ideals_coprime(order, b, ctx.q):
        raise ValueError("ideals must be coprime to the modulus")
    if a.hnf == b.hnf:
        return True
    # c = a * (N(b)/b); a b^{-1} = (alpha)/N(b) for (alpha) = c
    hat = _hat_ideal(fd, b)
    c = algebra.ideal_mul(order, a, hat)
    gens = find_generator(fd, emb, c, want_all=True)
    if not gens:
        return False
    rr = algebra.ResidueRing(order, ctx.q, ctx.phi)
    tester = _SignTester(fd, emb)
    for g in gens:
        if _coset_condition(order, rr, tester, ctx, g, b.norm):
            return True
    return False


def _hat_ideal(fd: FieldDescriptor, b: Ideal) -> Ideal:
    order = Order.for_field(fd)
    fac = b.factorization
    if fac is None:
        fac = algebra.factor_ideal(fd, b)
    out = algebra.unit_ideal(order)
    for pid, e in fac:
        p = _prime_under(pid)
        f_p = _residue_degree(pid, p)
        for qid, e_q, f_q in algebra.prime_splitting(fd, p):
            mult = (f_p * e_q - (1 if qid.hnf == pid.hnf else 0)) * e
            if mult:
                out = algebra.ideal_mul(order, out,
                                        algebra.ideal_pow(order, qid, mult))
    return out


def _prime_under(pid: Ideal) -> int:
    """The rational prime below a prime ideal: N(P) = p^f."""
    n = pid.norm
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def _residue_degree(pid: Ideal, p: int) -> int:
    f = 0
    n = pid.norm
    while n > 1:
        assert n % p == 0
        n //= p
        f += 1
    return f


# ---------------------------------------------------------------------------
# exports and class constants

def census_tsv(census: IdealCensus) -> str:
    lines = ["norm\thnf\tbucket"]
    for e in census.entries:
        flat = ",".join(str(v) for row in e.ideal.hnf for v in row)
        lines.append(f"{e.norm}\t{flat}\t{e.bucket}")
    return "\n".join(lines) + "\n"


def smallest_norms_in_class(fd: FieldDescriptor, census: IdealCensus,
                            parity: int, count: int):
    """Norms of the `count` smallest-norm ideals in the class-group class
    of the given parity (fast path, h <= 2)."""
    out = []
    for e in census.entries:
        if e.parity == parity:
            out.append(e.norm)
            if len(out) == count:
                break
    if len(out) < count:
        raise ValueError("census bound too small for requested ideal count")
    return out
