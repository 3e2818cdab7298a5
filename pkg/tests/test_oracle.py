import random
from fractions import Fraction

import pytest

from raylat import algebra, oracle
from raylat.algebra import Order, ideal_from_generators, unit_ideal


def test_census_qi_10(qi):
    census = oracle.enumerate_ideals(qi, 10)
    assert [e.norm for e in census.entries] == [1, 2, 4, 5, 5, 8, 9, 10, 10]


def test_census_sqrt2_7(qsqrt2):
    census = oracle.enumerate_ideals(qsqrt2, 7)
    assert [e.norm for e in census.entries] == [1, 2, 4, 7, 7]


def test_census_bound_one(qi):
    census = oracle.enumerate_ideals(qi, 1)
    assert len(census.entries) == 1 and census.entries[0].norm == 1


def test_census_completeness_vs_gaussian(qi):
    """Ideal counts match direct Gaussian-integer enumeration
    (one generator with a >= 1, b >= 0 per associate class)."""
    X = 200
    census = oracle.enumerate_ideals(qi, X)
    direct = sum(1 for a in range(1, 15) for b in range(0, 15)
                 if a * a + b * b <= X)
    assert len(census.entries) == direct  # (1,0) represents (1)


def test_classification_qi_mod3(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    census = oracle.classify(qi, ctx, 10, emb=emb)
    sizes = sorted(len(b) for b in census.buckets)
    assert sizes == [4, 4]
    assert oracle.empirical_hKq(census) == 2 == ctx.h_kq


def test_classification_trivial_modulus(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "unit")
    census = oracle.classify(qi, ctx, 10, emb=emb)
    assert oracle.empirical_hKq(census) == 1


def test_classification_sqrt_m5(qsqrt_m5, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qsqrt_m5)
    _, _, ctx = ray_ctx_cache(qsqrt_m5, "unit")
    census = oracle.classify(qsqrt_m5, ctx, 25, emb=emb)
    assert oracle.empirical_hKq(census) == 2
    # (2, 1+sqrt-5) is non-principal
    o = Order.for_field(qsqrt_m5)
    j0 = ideal_from_generators(o, [(2, 0), (1, 1)])
    assert census.j0 == j0


def test_ray_equivalent_examples(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    o = Order.for_field(qi)
    one = unit_ideal(o)
    a31 = ideal_from_generators(o, [(3, 1)])
    a11 = ideal_from_generators(o, [(1, 1)])
    assert oracle.ray_equivalent(qi, ctx, a31, a31, emb)
    assert oracle.ray_equivalent(qi, ctx, a31, one, emb)
    assert not oracle.ray_equivalent(qi, ctx, a11, one, emb)


def test_ray_equivalent_not_coprime(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    o = Order.for_field(qi)
    i3 = ideal_from_generators(o, [(3, 0)])
    with pytest.raises(ValueError):
        oracle.ray_equivalent(qi, ctx, i3, unit_ideal(o), emb)


def test_equivalence_relation_spot_checks(qi, embeddings_cache,
                                          ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    o = Order.for_field(qi)
    census = oracle.classify(qi, ctx, 30, emb=emb)
    coprime = [e.ideal for e in census.entries if e.bucket >= 0][:8]
    rng = random.Random(31)
    for _ in range(6):
        a, b, c = rng.sample(coprime, 3)
        ab = oracle.ray_equivalent(qi, ctx, a, b, emb)
        assert ab == oracle.ray_equivalent(qi, ctx, b, a, emb)
        if ab and oracle.ray_equivalent(qi, ctx, b, c, emb):
            assert oracle.ray_equivalent(qi, ctx, a, c, emb)


def test_cached_equivalence_matches_enumerative(qsqrt2, embeddings_cache,
                                                ray_ctx_cache):
    emb = embeddings_cache(qsqrt2)
    _, _, ctx = ray_ctx_cache(qsqrt2, "3:0:1")
    census = oracle.classify(qsqrt2, ctx, 60, emb=emb)
    state = oracle.ClassifierState(qsqrt2, ctx, emb, census)
    rng = random.Random(8)
    coprime = [e for e in census.entries if e.bucket >= 0]
    for _ in range(10):
        a, b = rng.sample(coprime, 2)
        fast = state.equivalent_cached(a, b)
        slow = oracle.ray_equivalent(qsqrt2, ctx, a.ideal, b.ideal, emb)
        assert fast == slow, (a.ideal.hnf, b.ideal.hnf)


def test_classification_order_independent(qi, embeddings_cache,
                                          ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    census1 = oracle.classify(qi, ctx, 20, emb=emb)
    part1 = {frozenset(census1.entries[i].ideal.hnf for i in b)
             for b in census1.buckets}
    census2 = oracle.enumerate_ideals(qi, 20)
    rng = random.Random(99)
    rng.shuffle(census2.entries)
    census2 = oracle.classify(qi, ctx, census2, emb=emb)
    part2 = {frozenset(census2.entries[i].ideal.hnf for i in b)
             for b in census2.buckets}
    assert part1 == part2


def test_find_generator(qi, qsqrt_m5, embeddings_cache):
    o = Order.for_field(qi)
    emb = embeddings_cache(qi)
    a = ideal_from_generators(o, [(1, 3)])
    g = oracle.find_generator(qi, emb, a)
    assert g is not None
    assert ideal_from_generators(o, [g]) == a
    # non-principal ideal of Q(sqrt-5) has no generator
    o5 = Order.for_field(qsqrt_m5)
    emb5 = embeddings_cache(qsqrt_m5)
    j0 = ideal_from_generators(o5, [(2, 0), (1, 1)])
    assert oracle.find_generator(qsqrt_m5, emb5, j0) is None


def test_census_tsv_deterministic(qi, embeddings_cache, ray_ctx_cache):
    emb = embeddings_cache(qi)
    _, _, ctx = ray_ctx_cache(qi, "3:0:1")
    t1 = oracle.census_tsv(oracle.classify(qi, ctx, 15, emb=emb))
    t2 = oracle.census_tsv(oracle.classify(qi, ctx, 15, emb=emb))
    assert t1 == t2
    assert t1.startswith("norm\thnf\tbucket\n")
