"""Field descriptors: the canonical input format and its validation.

A field file is a UTF-8 JSON object carrying precomputed invariants of a
number field (defining polynomial, integral basis, signature, discriminant,
class number, fundamental units, torsion, splitting overrides).  Integers
are decimal strings so word size never matters; rationals are "num/den".

The library never computes class groups or unit groups; it verifies that
the supplied invariants are consistent and rejects anything that is not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

MAX_DEGREE = 8

FIELD_KEYS = {
    "label", "poly", "degree", "signature", "disc", "integral_basis",
    "index", "class_number", "narrow_class_number", "units", "torsion",
    "regulator", "prime_splitting",
}


class FieldFileError(ValueError):
    """Malformed or inconsistent field file."""


@dataclass(frozen=True)
class SplittingOverride:
    gen_coords: tuple  # second generator, integral-basis coordinates
    e: int
    f: int


@dataclass(frozen=True)
class FieldDescriptor:
    label: str
    poly: tuple            # ascending integer coefficients, monic
    degree: int
    r1: int
    r2: int
    disc: int
    integral_basis: tuple  # rows of Fractions, power-basis coordinates
    index: int
    class_number: int
    narrow_class_number: int | None
    units: tuple           # fundamental units, integral-basis coordinates
    torsion_gen: tuple
    torsion_order: int
    regulator_hint: Fraction | None
    regulator_hint_quantum: Fraction | None
    prime_splitting: tuple  # sorted tuple of (p, overrides tuple)

    @property
    def unit_rank(self) -> int:
        return self.r1 + self.r2 - 1

    def splitting_override(self, p: int):
        for q, ov in self.prime_splitting:
            if q == p:
                return ov
        return None


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str


@dataclass
class ValidationReport:
    checks: list = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, witness: str = ""):
        self.checks.append(CheckResult(name, bool(passed), witness))

    def __str__(self):
        lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}"
                 + (f": {c.witness}" if c.witness else "")
                 for c in self.checks]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# parsing

def _parse_int(v, what: str) -> int:
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            raise FieldFileError(f"{what}: not a decimal integer: {v!r}")
    if isinstance(v, int):
        return v
    raise FieldFileError(f"{what}: expected integer string, got {type(v)}")


def _parse_rat(v, what: str) -> Fraction:
    if isinstance(v, str):
        try:
            if "/" in v:
                num, den = v.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(v))
        except (ValueError, ZeroDivisionError):
            raise FieldFileError(f"{what}: bad rational {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    raise FieldFileError(f"{what}: expected rational string, got {type(v)}")


def _int_vector(v, n: int, what: str) -> tuple:
    if not isinstance(v, list) or len(v) != n:
        raise FieldFileError(f"{what}: expected length-{n} vector")
    return tuple(_parse_int(x, what) for x in v)


def poly_discriminant(poly) -> int:
    """Exact discriminant of a monic integer polynomial."""
    x = sympy.Symbol("x")
    expr = sum(int(c) * x ** i for i, c in enumerate(poly))
    return int(sympy.Poly(expr, x).discriminant())


def parse_field_file(data: bytes) -> FieldDescriptor:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FieldFileError(f"malformed field file: {exc}")
    if not isinstance(obj, dict):
        raise FieldFileError("field file must be a JSON object")
    extra = set(obj) - FIELD_KEYS
    missing = FIELD_KEYS - set(obj)
    if extra:
        raise FieldFileError(f"unknown keys: {sorted(extra)}")
    if missing:
        raise FieldFileError(f"missing keys: {sorted(missing)}")

    n = _parse_int(obj["degree"], "degree")
    if n < 2:
        raise FieldFileError("degree must be >= 2 (field must differ from Q)")
    if n > MAX_DEGREE:
        raise FieldFileError(f"degree {n} exceeds supported cap {MAX_DEGREE}")

    poly = tuple(_parse_int(c, "poly") for c in obj["poly"])
    if len(poly) != n + 1:
        raise FieldFileError("poly length does not match degree")
    if poly[-1] != 1:
        raise FieldFileError("defining polynomial must be monic")

    sig = obj["signature"]
    if not isinstance(sig, list) or len(sig) != 2:
        raise FieldFileError("signature must be [r1, r2]")
    r1, r2 = (_parse_int(s, "signature") for s in sig)
    if r1 < 0 or r2 < 0 or r1 + 2 * r2 != n:
        raise FieldFileError("signature inconsistent with degree")

    disc = _parse_int(obj["disc"], "disc")
    if disc == 0 or abs(disc) < 3:
        raise FieldFileError("discriminant must satisfy |d| >= 3")

    basis_rows = obj["integral_basis"]
    if not isinstance(basis_rows, list) or len(basis_rows) != n:
        raise FieldFileError("integral_basis must have n rows")
    basis = tuple(
        tuple(_parse_rat(x, "integral_basis") for x in row)
        if isinstance(row, list) and len(row) == n
        else _bad_row()
        for row in basis_rows)

    index = _parse_int(obj["index"], "index")
    if index < 1:
        raise FieldFileError("index must be positive")

    h = _parse_int(obj["class_number"], "class_number")
    if h < 1:
        raise FieldFileError("class_number must be positive")
    hn = obj["narrow_class_number"]
    h_narrow = None if hn is None else _parse_int(hn, "narrow_class_number")
    if h_narrow is not None and h_narrow < 1:
        raise FieldFileError("narrow_class_number must be positive")

    r = r1 + r2 - 1
    units_raw = obj["units"]
    if not isinstance(units_raw, list) or len(units_raw) != r:
        raise FieldFileError(
            f"expected {r} fundamental units, got {len(units_raw)}")
    units = tuple(_int_vector(u, n, "units") for u in units_raw)

    tors = obj["torsion"]
    if not isinstance(tors, dict) or set(tors) != {"gen", "order"}:
        raise FieldFileError('torsion must be {"gen", "order"}')
    torsion_gen = _int_vector(tors["gen"], n, "torsion.gen")
    torsion_order = _parse_int(tors["order"], "torsion.order")
    if torsion_order < 1:
        raise FieldFileError("torsion order must be positive")

    reg = obj["regulator"]
    reg_hint = None
    reg_quantum = None
    if reg is not None:
        if not isinstance(reg, str):
            raise FieldFileError("regulator must be a decimal string or null")
        reg_hint = _parse_rat(_decimal_to_rat(reg), "regulator")
        if reg_hint <= 0:
            raise FieldFileError("regulator hint must be positive")
        decimals = len(reg.split(".")[1]) if "." in reg else 0
        reg_quantum = Fraction(1, 10 ** decimals)

    splitting_raw = obj["prime_splitting"]
    if not isinstance(splitting_raw, dict):
        raise FieldFileError("prime_splitting must be an object")
    splitting = []
    for key, entries in sorted(splitting_raw.items(), key=lambda kv: int(kv[0])):
        p = _parse_int(key, "prime_splitting key")
        if not isinstance(entries, list) or not entries:
            raise FieldFileError(f"prime_splitting[{p}] must be nonempty")
        ovs = []
        for ent in entries:
            if set(ent) != {"gen_poly", "e", "f"}:
                raise FieldFileError(
                    f"prime_splitting[{p}]: need gen_poly/e/f")
            ovs.append(SplittingOverride(
                gen_coords=_int_vector(ent["gen_poly"], n, "gen_poly"),
                e=_parse_int(ent["e"], "e"),
                f=_parse_int(ent["f"], "f")))
        splitting.append((p, tuple(ovs)))

    fd = FieldDescriptor(
        label=str(obj["label"]), poly=poly, degree=n, r1=r1, r2=r2,
        disc=disc, integral_basis=basis, index=index, class_number=h,
        narrow_class_number=h_narrow, units=units, torsion_gen=torsion_gen,
        torsion_order=torsion_order, regulator_hint=reg_hint,
        regulator_hint_quantum=reg_quantum,
        prime_splitting=tuple(splitting))

    # cheap exact consistency: disc(poly) = d_K * index^2, and overrides
    # must exist for every prime dividing the index
    if poly_discriminant(poly) != disc * index * index:
        raise FieldFileError("discriminant inconsistent with poly and index")
    for p in _prime_factors(index):
        if fd.splitting_override(p) is None:
            raise FieldFileError(
                f"missing splitting override for index-dividing prime {p}")
    return fd


def _bad_row():
    raise FieldFileError("integral_basis row has wrong length")


def _decimal_to_rat(s: str) -> str:
    s = s.strip()
    if "." not in s:
        return s
    whole, frac = s.split(".")
    sign = -1 if whole.startswith("-") else 1
    whole = whole.lstrip("+-") or "0"
    num = int(whole) * 10 ** len(frac) + int(frac or "0")
    return f"{sign * num}/{10 ** len(frac)}"


def _prime_factors(m: int):
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


# ---------------------------------------------------------------------------
# serialization (canonical: sorted keys, 2-space indent, trailing newline)

def serialize_field_file(fd: FieldDescriptor) -> bytes:
    def rat(x: Fraction) -> str:
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    reg = None
    if fd.regulator_hint is not None:
        q = fd.regulator_hint_quantum or Fraction(1)
        decimals = 0
        d = q.denominator
        while d > 1:
            d //= 10
            decimals += 1
        scaled = fd.regulator_hint * 10 ** decimals
        reg = f"{scaled.numerator // scaled.denominator}"
        if decimals:
            whole, frac_part = divmod(int(scaled), 10 ** decimals)
            reg = f"{whole}.{frac_part:0{decimals}d}"

    obj = {
        "label": fd.label,
        "poly": [str(c) for c in fd.poly],
        "degree": str(fd.degree),
        "signature": [str(fd.r1), str(fd.r2)],
        "disc": str(fd.disc),
        "integral_basis": [[rat(x) for x in row] for row in fd.integral_basis],
        "index": str(fd.index),
        "class_number": str(fd.class_number),
        "narrow_class_number": None if fd.narrow_class_number is None
                               else str(fd.narrow_class_number),
        "units": [[str(c) for c in u] for u in fd.units],
        "torsion": {"gen": [str(c) for c in fd.torsion_gen],
                    "order": str(fd.torsion_order)},
        "regulator": reg,
        "prime_splitting": {
            str(p): [{"gen_poly": [str(c) for c in ov.gen_coords],
                      "e": str(ov.e), "f": str(ov.f)} for ov in ovs]
            for p, ovs in fd.prime_splitting},
    }
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# validation

def validate_field(fd: FieldDescriptor, precision: int = 128) -> ValidationReport:
    """Certified consistency checks; never raises on a failing check."""
    from . import algebra
    from .intervals import IvCtx, contains_zero, escalate, PrecisionCapError
    from .embeddings import EmbeddingBasis
    from .unitlog import log_det_interval

    rep = ValidationReport()
    order = algebra.Order.for_field(fd)
    n = fd.degree
    r = fd.unit_rank

    x = sympy.Symbol("x")
    expr = sum(int(c) * x ** i for i, c in enumerate(fd.poly))
    irred = sympy.Poly(expr, x).is_irreducible
    rep.add("poly_irreducible", irred,
            "" if irred else "defining polynomial factors over Q")

    dp = poly_discriminant(fd.poly)
    ok = dp == fd.disc * fd.index ** 2
    rep.add("disc_consistency", ok,
            f"disc(poly)={dp}, d*index^2={fd.disc * fd.index ** 2}")

    for k, u in enumerate(fd.units):
        nu = order.norm(u)
        rep.add(f"unit_norm_{k}", abs(nu) == 1, f"N(u_{k})={nu}")

    # torsion: exact multiplicative order
    ok, wit = _torsion_order_ok(order, fd.torsion_gen, fd.torsion_order)
    rep.add("torsion_order", ok, wit)

    # certified checks at escalating precision
    try:
        def reg_check(ctx: IvCtx):
            emb = EmbeddingBasis(fd.poly, fd.integral_basis, fd.r1, fd.r2,
                                 ctx.prec)
            if r == 0:
                return (True, ctx.num(1))
            det = log_det_interval(emb, fd.units)
            if contains_zero(det):
                return None
            return (True, abs(det))

        _, reg_iv = escalate(reg_check, start=precision,
                             what="regulator nondegeneracy")
        from .intervals import lower_float, upper_float
        rep.add("regulator_nonzero", True,
                f"R_K in [{lower_float(reg_iv):.12g}, "
                f"{upper_float(reg_iv):.12g}]")
        if fd.regulator_hint is not None:
            from .intervals import iv_to_fraction_bounds
            lo, hi = iv_to_fraction_bounds(reg_iv)
            qtm = fd.regulator_hint_quantum or Fraction(0)
            ok = (fd.regulator_hint >= lo - qtm) and (fd.regulator_hint <= hi + qtm)
            rep.add("regulator_hint", ok,
                    f"hint={float(fd.regulator_hint):.10g} vs "
                    f"[{float(lo):.10g}, {float(hi):.10g}]")
    except PrecisionCapError as exc:
        rep.add("regulator_nonzero", False, str(exc))

    # Friedman: R_K/|mu_K| >= 0.2 (R_K := 1 when the unit rank is 0)
    try:
        def friedman(ctx: IvCtx):
            if r == 0:
                val = ctx.num(1) / fd.torsion_order
            else:
                emb = EmbeddingBasis(fd.poly, fd.integral_basis, fd.r1,
                                     fd.r2, ctx.prec)
                val = abs(log_det_interval(emb, fd.units)) / fd.torsion_order
            c = ctx.num(Fraction(1, 5))
            if val > c:
                return (True, val)
            if val < c:
                return (False, val)
            return None
        ok, val = escalate(friedman, start=precision, what="Friedman bound")
        from .intervals import lower_float as _lf, upper_float as _uf
        rep.add("friedman", ok,
                f"R_K/|mu_K| in [{_lf(val):.6g}, {_uf(val):.6g}]")
    except PrecisionCapError as exc:
        rep.add("friedman", False, str(exc))

    # Dobrowolski: house(u) >= 1 + log(n)/(6 n^2) for every fundamental unit
    for k, u in enumerate(fd.units):
        try:
            def dob(ctx: IvCtx):
                emb = EmbeddingBasis(fd.poly, fd.integral_basis, fd.r1,
                                     fd.r2, ctx.prec)
                h = emb.house(u)
                bound = 1 + ctx.log(ctx.num(n)) / (6 * n * n)
                if h > bound:
                    return (True, h)
                if h < bound:
                    return (False, h)
                return None
            ok, h = escalate(dob, start=precision, what="Dobrowolski bound")
            from .intervals import lower_float as _lf2, upper_float as _uf2
            rep.add(f"dobrowolski_{k}", ok,
                    f"house in [{_lf2(h):.6g}, {_uf2(h):.6g}]")
        except PrecisionCapError as exc:
            rep.add(f"dobrowolski_{k}", False, str(exc))

    return rep


def _torsion_order_ok(order, gen, w: int):
    if order.norm(gen) == 0:
        return False, "torsion generator is zero"
    acc = gen
    for k in range(1, w):
        if acc == order.one:
            return False, f"order divides {k} < {w}"
        acc = order.mul(acc, gen)
    if acc != order.one:
        return False, f"gen^{w} != 1"
    return True, f"exact order {w}"
