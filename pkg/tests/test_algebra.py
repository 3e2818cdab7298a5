import random
from fractions import Fraction

import pytest

from raylat import algebra
from raylat.algebra import (Order, ResidueRing, hnf_rows, ideal_contains,
                            ideal_from_generators, ideal_mul, ideal_pow,
                            ideals_coprime, phi_q, prime_splitting,
                            unit_ideal)


def test_gaussian_products(qi):
    o = Order.for_field(qi)
    assert o.mul((1, 1), (1, -1)) == (2, 0)
    assert o.mul((3, 2), o.one) == (3, 2)
    assert o.norm((1, 1)) == 2
    assert o.norm((0, 0)) == 0


def test_sqrt2_unit_product(qsqrt2):
    o = Order.for_field(qsqrt2)
    assert o.mul((1, 1), (-1, 1)) == (1, 0)
    assert o.norm((1, 1)) == -1


def test_norm_multiplicative_random(qi, qsqrt2, zeta7plus, qsqrt5):
    rng = random.Random(11)
    for fd in (qi, qsqrt2, zeta7plus, qsqrt5):
        o = Order.for_field(fd)
        for _ in range(25):
            x = tuple(rng.randint(-9, 9) for _ in range(fd.degree))
            y = tuple(rng.randint(-9, 9) for _ in range(fd.degree))
            assert o.norm(o.mul(x, y)) == o.norm(x) * o.norm(y)


def test_mul_commutative_associative(zeta7plus):
    rng = random.Random(5)
    o = Order.for_field(zeta7plus)
    for _ in range(20):
        x, y, z = (tuple(rng.randint(-5, 5) for _ in range(3))
                   for _ in range(3))
        assert o.mul(x, y) == o.mul(y, x)
        assert o.mul(o.mul(x, y), z) == o.mul(x, o.mul(y, z))


def test_ideal_from_generators_examples(qi):
    o = Order.for_field(qi)
    a = ideal_from_generators(o, [(1, 1)])
    assert a.norm == 2
    b = ideal_from_generators(o, [(2, 0), (1, 1)])
    assert b.norm == 2 and b == a
    assert ideal_from_generators(o, [o.one]).norm == 1
    with pytest.raises(ValueError):
        ideal_from_generators(o, [(0, 0)])


def test_ideal_mul_and_membership(qi):
    o = Order.for_field(qi)
    a = ideal_from_generators(o, [(1, 1)])
    sq = ideal_mul(o, a, a)
    assert sq.norm == 4
    assert sq == ideal_from_generators(o, [(2, 0)])
    i3 = ideal_from_generators(o, [(3, 0)])
    assert not ideal_contains(i3, (4, 0))
    assert ideal_contains(i3, (0, 3))
    assert ideal_mul(o, a, unit_ideal(o)) == a


def test_norm_multiplicative_ideals(qsqrt2):
    rng = random.Random(23)
    o = Order.for_field(qsqrt2)
    for _ in range(12):
        x = tuple(rng.randint(-9, 9) for _ in range(2))
        y = tuple(rng.randint(-9, 9) for _ in range(2))
        if o.norm(x) == 0 or o.norm(y) == 0:
            continue
        a = ideal_from_generators(o, [x])
        b = ideal_from_generators(o, [y])
        assert ideal_mul(o, a, b).norm == a.norm * b.norm


def test_membership_closure(zeta7plus):
    rng = random.Random(3)
    o = Order.for_field(zeta7plus)
    a = ideal_from_generators(o, [(2, 1, 0), (0, 0, 7)])
    pts = [row for row in a.hnf]
    for _ in range(20):
        x = tuple(sum(rng.randint(-3, 3) * r[i] for r in a.hnf)
                  for i in range(3))
        y = tuple(sum(rng.randint(-3, 3) * r[i] for r in a.hnf)
                  for i in range(3))
        assert ideal_contains(a, o.add(x, y))
        b = tuple(rng.randint(-4, 4) for _ in range(3))
        assert ideal_contains(a, o.mul(b, x))


def test_hnf_uniqueness(qi):
    o = Order.for_field(qi)
    # same ideal through different generator presentations
    a1 = ideal_from_generators(o, [(1, 3)])
    a2 = ideal_from_generators(o, [(3, -1)])   # -i (1+3i) = 3 - i
    assert a1.hnf == a2.hnf and a1 == a2
    # canonical form: entries above each pivot reduced into [0, pivot)
    for row_i, row in enumerate(a1.hnf):
        for j in range(row_i):
            assert 0 <= a1.hnf[j][row_i] < a1.hnf[row_i][row_i]


def test_splitting_examples(qi):
    spl = prime_splitting(qi, 5)
    assert [(p.norm, e, f) for p, e, f in spl] == [(5, 1, 1), (5, 1, 1)]
    spl = prime_splitting(qi, 3)
    assert [(p.norm, e, f) for p, e, f in spl] == [(9, 1, 2)]
    spl = prime_splitting(qi, 2)
    assert [(p.norm, e, f) for p, e, f in spl] == [(2, 2, 1)]


def test_splitting_sum_and_product(qi, qsqrt2, zeta7plus, qsqrt5):
    rng = random.Random(17)
    primes = [p for p in range(2, 100)
              if all(p % d for d in range(2, p))]
    for fd in (qi, qsqrt2, zeta7plus, qsqrt5):
        for p in rng.sample(primes, 8):
            spl = prime_splitting(fd, p)
            assert sum(e * f for _, e, f in spl) == fd.degree
            prod = 1
            for pid, e, f in spl:
                prod *= pid.norm ** e
            assert prod == p ** fd.degree


def test_index_divisor_uses_override(qsqrt5):
    spl = prime_splitting(qsqrt5, 2)
    assert [(p.norm, e, f) for p, e, f in spl] == [(4, 1, 2)]


def test_phi_q_examples(qi):
    o = Order.for_field(qi)
    i3 = ideal_from_generators(o, [(3, 0)])
    assert phi_q(qi, i3, algebra.factor_ideal(qi, i3)) == 8
    a = ideal_from_generators(o, [(1, 1)])
    assert phi_q(qi, a, algebra.factor_ideal(qi, a)) == 1
    assert phi_q(qi, unit_ideal(o), ()) == 1


def test_phi_q_rejects_wrong_factorization(qi):
    o = Order.for_field(qi)
    i3 = ideal_from_generators(o, [(3, 0)])
    a = ideal_from_generators(o, [(1, 1)])
    with pytest.raises(ValueError):
        phi_q(qi, i3, algebra.factor_ideal(qi, a))


def test_residue_ring(qi):
    o = Order.for_field(qi)
    q = ideal_from_generators(o, [(3, 0)])
    rr = ResidueRing(o, q, 8)
    rng = random.Random(9)
    for _ in range(20):
        x = tuple(rng.randint(-20, 20) for _ in range(2))
        r = rr.reduce(x)
        assert rr.reduce(r) == r
        assert ideal_contains(q, o.sub(x, r))


def test_idempotent_one(qi):
    o = Order.for_field(qi)
    a = ideal_from_generators(o, [(1, 1)])
    q = ideal_from_generators(o, [(3, 0)])
    u = algebra.idempotent_one(o, a, q)
    assert ideal_contains(a, u)
    assert ideal_contains(q, o.sub(u, o.one))


def test_factor_ideal_reconstructs(qsqrt2):
    o = Order.for_field(qsqrt2)
    a = ideal_from_generators(o, [(10, 3)])  # norm 82 = 2 * 41
    fac = algebra.factor_ideal(qsqrt2, a)
    prod = unit_ideal(o)
    for pid, e in fac:
        prod = ideal_mul(o, prod, ideal_pow(o, pid, e))
    assert prod == a


def test_coprimality(qi):
    o = Order.for_field(qi)
    a = ideal_from_generators(o, [(1, 1)])
    b = ideal_from_generators(o, [(3, 0)])
    assert ideals_coprime(o, a, b)
    assert not ideals_coprime(o, a, ideal_from_generators(o, [(2, 0)]))
