import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nclfun import poly as P
from nclfun.counting import HypersurfaceSpec, hypersurface_counts, smoothness_probe
from nclfun.field_arith import field_of_order
from nclfun.zeta_recover import (
    AmbiguousWeight,
    FormalPowerSeries,
    RationalFunctionT,
    ReconstructionError,
    WeightBlock,
    from_power_sums,
    hypersurface_betti,
    local_rh_check,
    pade,
    power_map,
    power_sums,
    ps_exp,
    ps_log,
    rational_reconstruct,
    reconstruct_zeta,
    weight_split,
    zeta_from_counts,
)

ELLIPTIC_F5 = (9, 27, 108, 675)


def elliptic_counts(m_max, a=-3, q=5):
    """N_m = q^m + 1 - s_m with s_m = alpha^m + conj^m, alpha + conj = a, alpha conj = q."""
    s = [2, a]
    while len(s) <= m_max:
        s.append(a * s[-1] - q * s[-2])
    return tuple(q**m + 1 - s[m] for m in range(1, m_max + 1))

small_int = st.integers(-3, 3)


def matrices(max_size=4):
    return st.integers(1, max_size).flatmap(
        lambda n: st.lists(st.lists(small_int, min_size=n, max_size=n), min_size=n, max_size=n))


def det_one_minus_tf(rows):
    """det(1 - t f) via sympy's characteristic polynomial, low-to-high."""
    M = sympy.Matrix(rows)
    cp = M.charpoly().all_coeffs()  # det(x - M), high-to-low
    return [int(c) for c in cp]  # reversal of det(x - M) is det(1 - tM)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_log_det_matches_traces(rows):
    M = sympy.Matrix(rows)
    det = det_one_minus_tf(rows)
    lg = ps_log(FormalPowerSeries(tuple(det), 12))
    power = sympy.eye(M.shape[0])
    for n in range(1, 13):
        power = power * M
        assert -lg[n] == Fraction(int(power.trace()), n)


def test_unipotent_example():
    det = det_one_minus_tf([[1, 1], [0, 1]])
    assert det == [1, -2, 1]
    lg = ps_log(FormalPowerSeries(tuple(det), 8))
    assert [-c for c in lg.coeffs[1:]] == [Fraction(2, n) for n in range(1, 9)]


def test_series_examples():
    lg = ps_log(FormalPowerSeries((1, -1), 6))
    assert [-c for c in lg.coeffs[1:]] == [Fraction(1, n) for n in range(1, 7)]
    log1p = FormalPowerSeries((0,) + tuple(Fraction((-1) ** (n + 1), n) for n in range(1, 9)), 8)
    assert P.trim(ps_exp(log1p).coeffs) == [1, 1]


@settings(max_examples=80, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1, max_size=8))
def test_exp_log_round_trip(tail):
    f = FormalPowerSeries((Fraction(1),) + tuple(tail), len(tail))
    assert ps_exp(ps_log(f)).coeffs == f.coeffs
    g = FormalPowerSeries((Fraction(0),) + tuple(tail), len(tail))
    assert ps_log(ps_exp(g)).coeffs == g.coeffs


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.integers(1, 4))
def test_power_map_against_numeric_roots(cp_tail, d):
    cp = [1] + cp_tail
    assume(P.degree(cp) > 0)
    got = power_map(cp, d)
    roots = P.reciprocal_roots(cp)
    expected = P.from_reciprocal_roots([r**d for r in roots])
    assert max(abs(complex(a) - complex(b)) for a, b in zip(P.to_complex(got), expected)) < 1e-6 * (1 + max(map(abs, expected)))
    assert from_power_sums(power_sums(cp, P.degree(cp)), P.degree(cp)) == P.trim(cp)


def test_elliptic_counts_helper():
    assert elliptic_counts(4) == ELLIPTIC_F5


def test_zeta_from_counts_examples():
    p1 = zeta_from_counts((3, 5, 9, 17))
    assert p1.coeffs == tuple(2 ** (n + 1) - 1 for n in range(5))
    assert zeta_from_counts((0, 0, 0)).coeffs == (1, 0, 0, 0)
    ell = zeta_from_counts(ELLIPTIC_F5)
    expected = RationalFunctionT((1, 3, 5), tuple(P.mul([1, -1], [1, -5]))).series(4)
    assert ell.coeffs == expected.coeffs


def test_rational_reconstruct_examples():
    z = rational_reconstruct(zeta_from_counts((3, 5, 9, 17, 33)), 2)
    assert z == RationalFunctionT((1,), tuple(P.mul([1, -1], [1, -2])))
    ell = rational_reconstruct(zeta_from_counts(elliptic_counts(9)), 4)
    assert ell.num == (1, 3, 5)
    assert ell.den == tuple(P.mul([1, -1], [1, -5]))
    exp_series = FormalPowerSeries(tuple(Fraction(1, math.factorial(n)) for n in range(8)), 7)
    with pytest.raises(ReconstructionError):
        rational_reconstruct(exp_series, 3)
    with pytest.raises(ValueError):
        rational_reconstruct(exp_series, 4)


def test_pade_rejects_wrong_shape():
    s = RationalFunctionT((1,), (1, -3, 2)).series(6)
    assert pade(s, 0, 1) is None
    assert pade(s, 0, 2) == RationalFunctionT((1,), (1, -3, 2))


def test_reconstruct_with_betti():
    z = reconstruct_zeta(ELLIPTIC_F5[:2], 5, (1, 2, 1))
    assert z.num == (1, 3, 5)
    with pytest.raises(ReconstructionError):
        reconstruct_zeta((9,), 5, (1, 2, 1))


@pytest.mark.parametrize("n,d,expected", [(2, 3, [1, 2, 1]), (2, 4, [1, 6, 1]), (3, 3, [1, 0, 7, 0, 1]),
                                          (3, 2, [1, 0, 2, 0, 1]), (3, 4, [1, 0, 22, 0, 1])])
def test_hypersurface_betti(n, d, expected):
    assert hypersurface_betti(n, d) == expected


def test_weight_split_examples():
    p1 = weight_split(RationalFunctionT((1,), tuple(P.mul([1, -1], [1, -2]))), 2)
    assert [(b.w, b.charpoly) for b in p1] == [(0, (1, -1)), (2, (1, -2))]
    ell = weight_split(RationalFunctionT((1, 3, 5), tuple(P.mul([1, -1], [1, -5]))), 5)
    assert [b.w for b in ell] == [0, 1, 2]
    w1 = ell[1]
    assert w1.charpoly == (1, 3, 5)
    expected = sorted([complex(-1.5, math.sqrt(11) / 2), complex(-1.5, -math.sqrt(11) / 2)], key=lambda z: z.imag)
    got = sorted(w1.roots, key=lambda z: z.imag)
    assert all(abs(a - b) < 1e-12 for a, b in zip(got, expected))
    assert all(abs(abs(r) - math.sqrt(5)) < 1e-12 for r in w1.roots)
    fermat = weight_split(RationalFunctionT((1, 0, 2), tuple(P.mul([1, -1], [1, -2]))), 2)
    assert sorted((round(r.imag, 12) for r in fermat[1].roots)) == [-round(math.sqrt(2), 12), round(math.sqrt(2), 12)]


def test_weight_split_rejects_off_weight_roots():
    with pytest.raises(AmbiguousWeight):
        weight_split(RationalFunctionT((1, -3), tuple(P.mul([1, -1], [1, -5]))), 5)


def test_local_rh_examples():
    ell = weight_split(RationalFunctionT((1, 3, 5), tuple(P.mul([1, -1], [1, -5]))), 5)
    rep = local_rh_check(ell, 5)
    assert rep.passed and rep.max_deviation < 1e-12
    assert not local_rh_check([WeightBlock(1, (2 + 0j,))], 2).passed
    p2 = weight_split(RationalFunctionT((1,), tuple(P.mul(P.mul([1, -1], [1, -3]), [1, -9]))), 3)
    rep = local_rh_check(p2, 3)
    assert rep.passed and rep.max_deviation == 0.0


def test_weight_block_json_round_trip():
    b = WeightBlock.from_charpoly(1, (1, 3, 5))
    back = WeightBlock.from_json(b.to_json())
    assert back.charpoly == b.charpoly and back.w == 1 and back.beta == 2


def _functional_equation_holds(num, q, g):
    c = [Fraction(x) for x in num] + [Fraction(0)] * (2 * g + 1 - len(num))
    return all(c[2 * g - k] == Fraction(q) ** (g - k) * c[k] for k in range(2 * g + 1))


PLANE_MONOMIALS = {
    3: [(3, 0, 0), (0, 3, 0), (0, 0, 3), (2, 1, 0), (2, 0, 1), (1, 2, 0), (0, 2, 1), (1, 0, 2), (0, 1, 2), (1, 1, 1)],
    4: [(i, j, 4 - i - j) for i in range(5) for j in range(5 - i)],
}


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([(2, 3), (3, 3), (5, 3), (2, 4)]), st.data())
def test_curve_functional_equation(qd, data):
    q, d = qd
    mons = PLANE_MONOMIALS[d]
    coeffs = data.draw(st.lists(st.integers(0, q - 1), min_size=len(mons), max_size=len(mons)))
    terms = tuple((c, m) for c, m in zip(coeffs, mons) if c)
    assume(terms)
    spec = HypersurfaceSpec(field_of_order(q), 2, terms)
    assume(smoothness_probe(spec, 4))
    g = (d - 1) * (d - 2) // 2
    counts = hypersurface_counts(spec, 2 * g).counts
    z = reconstruct_zeta(counts, q, hypersurface_betti(2, d))
    assert P.degree(z.num) == 2 * g
    assert _functional_equation_holds(z.num, q, g)
    assert local_rh_check(weight_split(z, q), q).passed
