import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nclfun.field_arith import (
    GF,
    Place,
    count_irreducibles,
    embedding,
    enumerate_places,
    field_of_order,
    fq_factor,
    fq_mul,
    gf,
    is_irreducible,
    make_field,
    monic_polys,
    place_root,
    places_of_degree,
)
from nclfun.ntheory import divisors, is_prime, mobius, primes_up_to

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


def test_make_field_examples():
    F5 = make_field(5, 1)
    assert F5.q == 5 and F5.modulus == (0, 1)
    F8 = make_field(2, 3)
    assert F8.modulus == (1, 1, 0, 1)  # t^3 + t + 1, low-to-high
    with pytest.raises(ValueError):
        make_field(4, 1)


def test_is_irreducible_examples():
    F2, F3 = make_field(2), make_field(3)
    assert not is_irreducible((1, 0, 1), F2)
    assert is_irreducible((1, 1, 1), F2)
    assert is_irreducible((0, 1), F3)


def test_enumerate_places_examples():
    F2 = make_field(2)
    places = enumerate_places(F2, 2)
    assert [p.generator for p in places] == [(0, 1), (1, 1), (1, 1, 1)]
    assert len(enumerate_places(make_field(3), 1)) == 3
    assert len(places_of_degree(F2, 4)) == 3


@pytest.mark.parametrize("q,d,expected", [(2, 1, 2), (2, 4, 3), (3, 2, 3)])
def test_count_irreducibles_examples(q, d, expected):
    assert count_irreducibles(q, d) == expected


@pytest.mark.parametrize("q", [2, 3, 4, 5])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_places_match_brute_force_irreducibility(q, d):
    F = field_of_order(q)
    if q ** d > 700:
        pytest.skip("brute force too large")
    brute = [f for f in monic_polys(F, d) if is_irreducible(f, F)]
    assert sorted(brute) == sorted(p.generator for p in places_of_degree(F, d))
    assert len(brute) == count_irreducibles(q, d)


@given(st.sampled_from([2, 3, 4, 5, 7, 9]), st.integers(1, 8))
def test_mobius_identity(q, n):
    # sum_{d|n} d * I_q(d) = q^n
    assert sum(d * count_irreducibles(q, d) for d in divisors(n)) == q**n
    assert count_irreducibles(q, n) * n == sum(mobius(n // d) * q**d for d in divisors(n))


def _elements(q):
    return st.integers(0, q - 1)


@settings(max_examples=200)
@given(st.sampled_from(ORDERS), st.data())
def test_ring_axioms(q, data):
    K = gf(field_of_order(q))
    a, b, c = (data.draw(_elements(q)) for _ in range(3))
    assert K.add(a, b) == K.add(b, a)
    assert K.mul(a, b) == K.mul(b, a)
    assert K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c))
    assert K.mul(K.mul(a, b), c) == K.mul(a, K.mul(b, c))
    assert K.add(a, K.neg(a)) == 0
    assert K.mul(a, 1) == a and K.add(a, 0) == a
    if a:
        assert K.mul(a, K.inv(a)) == 1


@settings(max_examples=100)
@given(st.sampled_from(ORDERS), st.data())
def test_frobenius_is_additive_and_fixes_q_power(q, data):
    K = gf(field_of_order(q))
    p = K.spec.p
    a, b = data.draw(_elements(q)), data.draw(_elements(q))
    assert K.pow(K.add(a, b), p) == K.add(K.pow(a, p), K.pow(b, p))
    assert K.pow(a, q) == a


@pytest.mark.parametrize("q", ORDERS)
def test_vectorised_ops_agree_with_scalar(q):
    K = gf(field_of_order(q))
    xs = np.arange(q)
    A, Bv = np.meshgrid(xs, xs)
    add, mul = K.vadd(A.ravel(), Bv.ravel()), K.vmul(A.ravel(), Bv.ravel())
    for i, (a, b) in enumerate(zip(A.ravel(), Bv.ravel())):
        assert add[i] == K.add(int(a), int(b))
        assert mul[i] == K.mul(int(a), int(b))


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25])
def test_quadratic_character(q):
    K = gf(field_of_order(q))
    squares = {K.mul(x, x) for x in range(1, q)}
    chi = K.chi(np.arange(q))
    assert chi[0] == 0
    for x in range(1, q):
        assert chi[x] == (1 if x in squares else -1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 4, 5, 7, 9]), st.lists(st.integers(1, 3), min_size=1, max_size=3), st.data())
def test_factor_recovers_random_products(q, degrees, data):
    F = field_of_order(q)
    K = gf(F)
    factors = []
    for d in degrees:
        choices = places_of_degree(F, d)
        factors.append(data.draw(st.sampled_from(choices)).generator)
    prod = (1,)
    for f in factors:
        prod = fq_mul(prod, f, K)
    got = fq_factor(prod, K)
    expected = {}
    for f in factors:
        expected[f] = expected.get(f, 0) + 1
    assert dict(got) == expected


@pytest.mark.parametrize("q,d", [(2, 3), (3, 2), (4, 2), (5, 1), (5, 2)])
def test_place_root_is_a_root(q, d):
    F = field_of_order(q)
    for pl in places_of_degree(F, d):
        ext, alpha = place_root(pl)
        L = gf(ext)
        emb = embedding(F, ext)
        val = L.vpoly_eval([int(emb[c]) for c in pl.generator], np.array([alpha]))
        assert int(val[0]) == 0


def test_place_text_round_trip():
    for pl in enumerate_places(field_of_order(4), 2) + [Place.prime(7)]:
        assert Place.from_text(pl.to_text()) == pl
    with pytest.raises(ValueError):
        Place.from_text("garbage")


def test_place_norms():
    for pl in enumerate_places(field_of_order(3), 3):
        assert pl.norm == 3 ** pl.degree
    assert Place.prime(11).norm == 11


def test_is_prime_against_sieve():
    sieve = set(primes_up_to(5000))
    assert all(is_prime(n) == (n in sieve) for n in range(5000))


def test_gf_type():
    assert isinstance(gf(field_of_order(8)), GF)
    assert list(itertools.islice(monic_polys(field_of_order(2), 1), 5)) == [(0, 1), (1, 1)]
