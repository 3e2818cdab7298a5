"""Acceptance suite: every headline criterion at its stated tolerance.

Run with `pytest tests/test_acceptance.py -s` to see one pass/fail line
per criterion.  The full field x modulus matrix (4 fields, 3 moduli each,
x up to 10^4, both counting methods) is computed once per session.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from raylat import algebra, cells, latcount, oracle, raycount, unitlog
from raylat.algebra import Order, det_int, ideal_from_generators, unit_ideal
from raylat.fielddata import validate_field
from raylat.intervals import IvCtx, mid_float, upper_float
from tests.conftest import load_descriptor

X_GRID = (10, 100, 1000, 10000)

MATRIX = {
    "qi": ("unit", "5:0:1", "3:0:1"),          # split 5, inert 3
    "qsqrt_m5": ("unit", "3:0:1", "11:0:1"),   # split 3, inert 11
    "qsqrt2": ("unit", "7:0:1", "3:0:1"),      # split 7, inert 3
    "zeta7plus": ("unit", "13:0:1", "2:0:1"),  # split 13, inert 2
}


def _report_line(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}" + (f": {detail}" if detail else ""))


@pytest.fixture(scope="session")
def matrix(embeddings_cache, ray_ctx_cache):
    """(field, modulus) -> dict with ctx, census, report, elapsed."""
    out = {}
    t_start = time.time()
    for name, specs in MATRIX.items():
        fd = load_descriptor(name)
        emb = embeddings_cache(fd)
        for spec in specs:
            t0 = time.time()
            q, fac, ctx = ray_ctx_cache(fd, spec)
            census = oracle.classify(fd, ctx, max(X_GRID), emb=emb)
            report, census = raycount.verify_asymptotic(
                fd, ctx, emb, list(X_GRID), census=census,
                modulus_label=spec)
            out[(name, spec)] = {
                "fd": fd, "emb": emb, "ctx": ctx, "census": census,
                "report": report, "seconds": time.time() - t0,
            }
    out["_elapsed"] = time.time() - t_start
    return out


def test_method_agreement(matrix):
    """Lattice and oracle ray-class counts agree exactly on the whole
    matrix at x in {10, 10^2, 10^3, 10^4}, within the runtime budget."""
    bad = []
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        for cres in data["report"].classes:
            for row in cres.rows:
                if row["count_lattice"] != row["count_oracle"]:
                    bad.append((key, row))
    ok = not bad and matrix["_elapsed"] <= 600
    _report_line("method agreement (4 fields x 3 moduli x 4 x-values)",
                 ok, f"{matrix['_elapsed']:.0f}s")
    assert not bad, bad
    assert matrix["_elapsed"] <= 600, "runtime budget exceeded"


def test_qi_mod3_exact_values(matrix):
    """Q(i), q=(3), x=10: per-class counts (4,4); h_Kq=2; phi(q)=8."""
    data = matrix[("qi", "3:0:1")]
    ctx, report = data["ctx"], data["report"]
    counts = sorted(c.rows[0]["count_lattice"] for c in report.classes)
    ok = counts == [4, 4] and ctx.h_kq == 2 and ctx.phi == 8
    _report_line("Q(i) q=(3) x=10 census", ok,
                 f"counts={counts}, h_Kq={ctx.h_kq}, phi={ctx.phi}")
    assert ok


def test_explicit_bound_everywhere(matrix):
    """|count - alpha_K phi(q) x / (h_Kq Nq)| <= error bound, certified,
    at every grid point of the matrix."""
    bad = []
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        fd, emb, ctx = data["fd"], data["emb"], data["ctx"]
        for cres in data["report"].classes:
            for row in cres.rows:
                lat = row["count_lattice"]

                def check(ivc: IvCtx):
                    mt = raycount.main_term(fd, ctx, emb, row["x"], ivc.prec)
                    eb = raycount.error_bound(fd, ctx, emb, row["x"],
                                              ivc.prec)
                    v = abs(mt - lat) <= eb
                    return None if v is None else bool(v)

                from raylat.intervals import escalate
                if not escalate(check, start=128, what="bound check"):
                    bad.append((key, row["x"]))
    _report_line("explicit error bound at every grid point", not bad)
    assert not bad, bad


def test_main_term_convergence(matrix):
    """count(10^4) h_Kq Nq / (alpha_K phi(q) 10^4) in [0.95, 1.05]."""
    bad = []
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        fd, emb, ctx = data["fd"], data["emb"], data["ctx"]
        for cres in data["report"].classes:
            row = cres.rows[-1]
            assert row["x"] == 10000
            ratio = row["count_lattice"] / row["main"]
            if not (0.95 <= ratio <= 1.05):
                bad.append((key, cres.rep_norm, ratio))
    _report_line("main-term convergence at x=10^4 within 5%", not bad)
    assert not bad, bad


def test_mainterm_identities(matrix):
    """Both class-number-formula identities to relative 1e-10."""
    worst = 0.0
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        g1, g2 = unitlog.mainterm_identity_gaps(data["ctx"], data["emb"])
        worst = max(worst, g1, g2)
    ok = worst <= 1e-10
    _report_line("main-term identities (rel 1e-10)", ok, f"worst={worst:.2e}")
    assert ok


def test_regbound_sandwich(matrix):
    """Certified regulator sandwich for all configurations (KZ-reduced)."""
    bad = []
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        if not unitlog.regbound_sandwich_holds(data["ctx"], data["emb"]):
            bad.append(key)
    _report_line("regulator / m-product sandwich", not bad)
    assert not bad, bad


def test_kz_inequality_and_minima(matrix):
    """KZ inequality on 100 random integer lattices of rank <= 4 and on
    every unit-log lattice; minima match exhaustive search (rank <= 3)."""
    rng = random.Random(20260808)
    for _ in range(100):
        rank = rng.choice((2, 3, 4))
        while True:
            rows = [[rng.randint(-10, 10) for _ in range(rank)]
                    for _ in range(rank)]
            if det_int(rows) != 0:
                break
        assert latcount.kz_inequality_holds(
            latcount.Lattice.from_integer_rows(rows)), rows
    seen = set()
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        ctx, emb = data["ctx"], data["emb"]
        if ctx.r == 0 or key in seen:
            continue
        seen.add(key)
        prov = unitlog.weighted_log_gram_provider(emb, list(ctx.eta))
        assert latcount.kz_inequality_holds(
            latcount.Lattice.from_gram_provider(prov)), key
    # exhaustive minima cross-check
    from tests.test_latcount import exhaustive_minima
    for _ in range(10):
        rank = rng.choice((2, 3))
        while True:
            rows = [[rng.randint(-10, 10) for _ in range(rank)]
                    for _ in range(rank)]
            if det_int(rows) != 0:
                break
        gram = latcount.ExactGram.from_rows(rows).gram
        minima, _ = latcount.successive_minima_exact(gram)
        ex = exhaustive_minima(gram, minima[-1])
        assert ex == minima, (rows, ex, minima)
    _report_line("KZ inequality (100 random + unit-log) and exhaustive "
                 "minima", True)


def test_widmer_property_suite():
    """200 random (lattice, box) pairs in rank 2-3: the counting error is
    within the Widmer bound for the box's trivial cover.  Zero failures."""
    from tests.test_latcount import _box_count
    rng = random.Random(777)
    failures = 0
    ctx = IvCtx(96)
    for _ in range(200):
        rank = rng.choice((2, 3))
        while True:
            rows = [[rng.randint(-5, 5) for _ in range(rank)]
                    for _ in range(rank)]
            if det_int(rows) != 0:
                break
        edges = [Fraction(rng.randint(1, 7)) for _ in range(rank)]
        shift = [Fraction(rng.randint(-4, 4)) for _ in range(rank)]
        count = _box_count(rows, shift, edges)
        vol = Fraction(1)
        for e in edges:
            vol *= e
        covol = abs(det_int(rows))
        minima, _ = latcount.successive_minima_exact(
            latcount.ExactGram.from_rows(rows).gram)
        wb = latcount.widmer_bound(rank, 2 * rank, max(edges), minima, ctx)
        if abs(count - Fraction(vol, covol)) > upper_float(wb) + 1e-9:
            failures += 1
    _report_line("Widmer counting suite (200 pairs)", failures == 0,
                 f"failures={failures}")
    assert failures == 0


def test_max_embedding_integral_quadrature(matrix):
    """Numeric quadrature of the max-embedding integral vs the closed form
    for Q(sqrt2) narrow, alpha = 1 and alpha = 3, to relative 1e-6."""
    data = matrix[("qsqrt2", "unit")]
    ctx, emb = data["ctx"], data["emb"]
    worst = 0.0
    for alpha in ((1, 0), (3, 0)):
        quad = float(unitlog.max_embedding_integral_quadrature(ctx, emb,
                                                               alpha))
        closed = mid_float(unitlog.max_embedding_integral_closed(ctx, emb,
                                                                 alpha))
        worst = max(worst, abs(quad / closed - 1))
    ok = worst <= 1e-6
    _report_line("max-embedding integral quadrature (rel 1e-6)", ok,
                 f"worst={worst:.2e}")
    assert ok


def test_class_number_formula_and_sandwich(matrix):
    """empirical h_Kq equals 2^{r1} phi(q) h_K / [O^*:U_q1] and lies in
    [h_{K,1}, phi(q) h_{K,1}]."""
    bad = []
    for key, data in matrix.items():
        if key == "_elapsed":
            continue
        fd, ctx, census = data["fd"], data["ctx"], data["census"]
        emp = oracle.empirical_hKq(census)
        formula = 2 ** fd.r1 * ctx.phi * fd.class_number // ctx.unit_index
        h1 = fd.narrow_class_number
        if emp != formula or emp != ctx.h_kq:
            bad.append((key, emp, formula))
        if h1 is not None and not (h1 <= emp <= ctx.phi * h1):
            bad.append((key, emp, "sandwich"))
    _report_line("class-number formula and phi(q) sandwich", not bad)
    assert not bad, bad


def test_proof_constants():
    """e^{n^2+8n} n^{(3/2)n^2+(11/2)n-1/2} 6n (2n)^4 <= 500 n^{12n^2} for
    n = 2..8, and a+b <= 2ab on a grid with a, b >= 1."""
    ok = all(raycount.proof_constant_holds(n) for n in range(2, 9))
    grid = [1.0, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 100.0]
    ok2 = all(raycount.sum_le_twice_product(a, b)
              for a in grid for b in grid)
    _report_line("proof constants (n=2..8) and a+b <= 2ab", ok and ok2)
    assert ok and ok2


def test_fixture_validation():
    """Dobrowolski and Friedman checks pass for every shipped fixture."""
    bad = []
    for name in ("qi", "qsqrt2", "qsqrt_m5", "zeta7plus", "qsqrt5"):
        rep = validate_field(load_descriptor(name))
        names = {c.name: c.passed for c in rep.checks}
        if not names.get("friedman", False):
            bad.append((name, "friedman"))
        for cname, passed in names.items():
            if cname.startswith("dobrowolski") and not passed:
                bad.append((name, cname))
        if not rep.overall:
            bad.append((name, "overall"))
    _report_line("Dobrowolski and Friedman validation on all fixtures",
                 not bad)
    assert not bad, bad
