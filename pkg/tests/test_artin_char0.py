import math

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from nclfun import poly as P
from nclfun.artin_char0 import (
    CyclotomicField,
    cyclotomic_polynomial,
    cyclotomic_splitting,
    dedekind_local_factor,
    zeta_q_partial,
)
from nclfun.ntheory import divisors, primes_up_to, totient, valuation

X = sympy.symbols("x")


@pytest.mark.parametrize("d,p,expected", [(5, 2, (4,)), (5, 11, (1, 1, 1, 1)), (4, 2, (1,))])
def test_splitting_examples(d, p, expected):
    assert cyclotomic_splitting(d, p) == expected


def test_local_factor_examples():
    assert dedekind_local_factor(CyclotomicField(5), 2) == [1, 0, 0, 0, -1]
    assert dedekind_local_factor(1, 7) == [1, -1]
    assert dedekind_local_factor(4, 2) == [1, -1]


def test_cyclotomic_examples():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(6) == (1, -1, 1)


@pytest.mark.parametrize("d", range(1, 31))
def test_cyclotomic_against_sympy(d):
    expected = sympy.Poly(sympy.cyclotomic_poly(d, X), X).all_coeffs()[::-1]
    assert list(cyclotomic_polynomial(d)) == [int(c) for c in expected]


@settings(max_examples=40)
@given(st.integers(1, 40))
def test_cyclotomic_product_identity(n):
    prod = [1]
    for d in divisors(n):
        prod = P.mul(prod, list(cyclotomic_polynomial(d)))
    assert P.trim(prod) == [-1] + [0] * (n - 1) + [1]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.sampled_from(primes_up_to(60)))
def test_splitting_against_sympy_factorization(d, p):
    """Residue degrees are the degrees of the factors of Phi_{d'} mod p, d' the prime-to-p part."""
    d1 = d // p ** valuation(d, p)
    factors = sympy.Poly(sympy.cyclotomic_poly(d1, X), X, modulus=p).factor_list()[1]
    degrees = sorted(f.degree() for f, mult in factors for _ in range(mult))
    assert sorted(cyclotomic_splitting(d, p)) == degrees
    # sum of e f over primes above p is the field degree
    e = totient(p ** valuation(d, p))
    assert e * sum(cyclotomic_splitting(d, p)) == totient(d) == CyclotomicField(d).degree


def test_zeta_q_examples():
    assert abs(zeta_q_partial(2, 10**5) - math.pi**2 / 6) < 1e-4
    oracle3 = math.fsum(1 / n**3 for n in range(1, 10**5))
    assert abs(zeta_q_partial(3, 10**4) - oracle3) < 1e-6
    assert abs(zeta_q_partial(2, 2) - 4 / 3) < 1e-15


def test_invalid_input():
    with pytest.raises(ValueError):
        cyclotomic_splitting(5, 4)
    with pytest.raises(ValueError):
        CyclotomicField(0)
