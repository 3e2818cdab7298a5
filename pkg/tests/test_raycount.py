import math
from fractions import Fraction

import pytest

from raylat import algebra, oracle, raycount, unitlog
from raylat.algebra import Order, ideal_from_generators, unit_ideal
from raylat.intervals import mid_float, upper_float


def test_alpha_k_examples(qi, qsqrt2, qsqrt_m5, embeddings_cache):
    a = mid_float(raycount.residue_alpha_K(qi, embeddings_cache(qi)))
    assert abs(a - math.pi / 4) < 1e-12
    a = mid_float(raycount.residue_alpha_K(qsqrt2, embeddings_cache(qsqrt2)))
    assert abs(a - 4 * math.log(1 + math.sqrt(2)) / (2 * math.sqrt(8))) < 1e-12
    a = mid_float(raycount.residue_alpha_K(qsqrt_m5,
                                           embeddings_cache(qsqrt_m5)))
    assert abs(a - 2 * math.pi * 2 / (2 * math.sqrt(20))) < 1e-12


def test_F_constant(qi, ray_ctx_cache):
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    assert raycount.F_constant(qi, ctx) == 4
    _, _, ctx1 = ray_ctx_cache(qi, "unit")
    assert raycount.F_constant(qi, ctx1) == 1


def test_E_constant_example(qi, embeddings_cache):
    e = mid_float(raycount.E_constant(qi, embeddings_cache(qi)))
    expect = 1000 * 2 ** 48 * 0.5 * math.log(4 ** 8 / 4) ** 2
    assert abs(e / expect - 1) < 1e-12


def test_error_bound_structure(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    b10 = upper_float(raycount.error_bound(qi, ctx, emb, 10))
    b100 = upper_float(raycount.error_bound(qi, ctx, emb, 100))
    assert b100 >= b10  # monotone in x
    # second term alone: n^{8n} (R/|mu|) F = 2^16 * (1/4) * 4 = 65536
    e = raycount.E_constant(qi, emb)
    t1 = mid_float(e) * 2 * math.log(12) ** 2 * (100 / 9) ** 0.5
    assert abs(mid_float(raycount.error_bound(qi, ctx, emb, 100))
               - (t1 + 65536)) / t1 < 1e-9


def test_count_ray_class_examples(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    q, _, ctx = ray_ctx_cache(qi, "3:0:1")
    o = Order.for_field(qi)
    one = unit_ideal(o)
    assert raycount.count_ray_class(qi, ctx, emb, one, 10) == 4
    c2 = ideal_from_generators(o, [(1, 1)])
    assert raycount.count_ray_class(qi, ctx, emb, c2, 10) == 4
    # a class whose smallest ideal norm exceeds x counts zero
    assert raycount.count_ray_class(qi, ctx, emb, c2, 1) == 0


def test_count_not_coprime_rejected(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    o = Order.for_field(qi)
    i3 = ideal_from_generators(o, [(3, 0)])
    with pytest.raises(ValueError):
        raycount.count_ray_class(qi, ctx, emb, i3, 10)


def test_shell_mode_agrees_with_direct(qi, qsqrt2, embeddings_cache,
                                       ray_ctx_cache):
    for fd, spec in ((qi, "3:0:1"), (qsqrt2, "unit")):
        emb = embeddings_cache(fd)
        q, _, ctx = ray_ctx_cache(fd, spec)
        o = Order.for_field(fd)
        one = unit_ideal(o)
        m_prod = 1
        for m in ctx.m:
            m_prod *= m
        ncinv = raycount.ncinv_exact(fd, ctx, emb,
                                     algebra.ideal_mul(o, one, q),
                                     max(m_prod, 1))
        shells = []
        s = raycount.count_ray_class(fd, ctx, emb, one, 100, method="lattice",
                                     shell_reports=shells, ncinv=ncinv)
        d = raycount.count_ray_class(fd, ctx, emb, one, 100, method="lattice")
        assert s == d
        assert all(rep.holds for rep in shells)


def test_ncinv_examples(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    q, _, ctx = ray_ctx_cache(qi, "3:0:1")
    o = Order.for_field(qi)
    v1 = mid_float(raycount.ncinv_exact(qi, ctx, emb, q, 1))
    assert abs(v1 - 1) < 1e-25
    v3 = mid_float(raycount.ncinv_exact(qi, ctx, emb, q, 3))
    assert abs(v3 - (1 + 2 ** -0.5 + 4 ** -0.5)) < 1e-12
    b = mid_float(raycount.ncinv_bound(2, 2))
    assert abs(b - 12 * 2 ** 0.5 * math.log(2) ** 0.5) < 1e-12
    assert b >= v3 - 0.3  # bd-De bound dominates 2-term sums
    with pytest.raises(ValueError):
        raycount.ncinv_bound(1, 2)


def test_ncinv_nonprincipal_class(qsqrt_m5, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qsqrt_m5)
    _, _, ctx = ray_ctx_cache(qsqrt_m5, "unit")
    o = Order.for_field(qsqrt_m5)
    j0 = ideal_from_generators(o, [(2, 0), (1, 1)])
    j0 = algebra.Ideal(j0.hnf, j0.norm, algebra.factor_ideal(qsqrt_m5, j0))
    # smallest norms in the non-principal class: 2, 3, 3, ...
    v = mid_float(raycount.ncinv_exact(qsqrt_m5, ctx, emb, j0, 2))
    assert abs(v - (2 ** -0.5 + 3 ** -0.5)) < 1e-12


def test_proof_constants():
    for n in range(2, 9):
        assert raycount.proof_constant_holds(n)
    grid = [1.0, 1.25, 2.0, 3.0, 10.0]
    for a in grid:
        for b in grid:
            assert raycount.sum_le_twice_product(a, b)


def test_verify_asymptotic_report(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    report, census = raycount.verify_asymptotic(qi, ctx, emb, [10, 100],
                                                modulus_label="3:0:1")
    assert len(report.classes) == 2
    counts10 = sorted(c.rows[0]["count_lattice"] for c in report.classes)
    assert counts10 == [4, 4]
    assert all(r["count_lattice"] == r["count_oracle"]
               for c in report.classes for r in c.rows)
    assert all(r["verdict"] for c in report.classes for r in c.rows)
    tsv = raycount.report_tsv(report)
    assert tsv.splitlines()[0].startswith("class\tx")
    js = raycount.report_json(report)
    import json
    obj = json.loads(js)
    assert obj["h_kq"] == 2 and obj["phi_q"] == 8


def test_index_two_field_pipeline(qsqrt5, embeddings_cache, ray_ctx_cache):
    """Q(sqrt5) has index 2: the census must route the prime 2 through the
    splitting override, and both methods must still agree."""
    emb = embeddings_cache(qsqrt5)
    for spec in ("unit", "11:0:1"):   # 11 splits (11 = +-1 mod 5)
        _, _, ctx = ray_ctx_cache(qsqrt5, spec)
        report, census = raycount.verify_asymptotic(
            qsqrt5, ctx, emb, [10, 100], modulus_label=spec)
        assert all(r["count_lattice"] == r["count_oracle"]
                   for c in report.classes for r in c.rows)
        # norm-4 entry (the inert prime 2) must be present and classified
        e4 = [e for e in census.entries if e.norm == 4]
        assert e4 and e4[0].bucket >= 0


def test_jobs_parallel_counts_match(zeta7plus, embeddings_cache,
                                    ray_ctx_cache):
    emb = embeddings_cache(zeta7plus)
    _, _, ctx = ray_ctx_cache(zeta7plus, "2:0:1")
    o = Order.for_field(zeta7plus)
    one = unit_ideal(o)
    c1 = raycount.count_ray_class(zeta7plus, ctx, emb, one, 500, jobs=1)
    c2 = raycount.count_ray_class(zeta7plus, ctx, emb, one, 500, jobs=3)
    assert c1 == c2


def test_class_partition_totals(qi, embeddings_cache, ray_ctx_cache):
    """Sum over ray classes equals all coprime ideals of norm <= x."""
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    census = oracle.classify(qi, ctx, 50, emb=emb)
    total_buckets = sum(len(b) for b in census.buckets)
    o = Order.for_field(qi)
    coprime = sum(1 for e in census.entries
                  if algebra.ideals_coprime(o, e.ideal, ctx.q))
    assert total_buckets == coprime
