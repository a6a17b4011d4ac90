import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nclfun import poly as P
from nclfun.field_arith import Place, field_of_order, fq_gcd, fq_mul, gf, monic_polys, places_of_degree
from nclfun.lfunctions import (
    EVEN,
    ODD,
    CohomDatum,
    ConstantFamily,
    ExcludedPlace,
    ExplicitLocal,
    LSeriesHandle,
    abscissa,
    closed_form,
    closed_form_constant_family,
    convergence_scan,
    dirichlet_expand,
    empty_datum,
    euler_product_eval,
    euler_series,
    local_factor,
    log_tail_bound,
    places_in,
    tate_twist_assemble,
    trace_bound_violations,
    trace_sequence,
    verify_weight_shift,
    zeta_source,
)
from nclfun.zeta_recover import FormalPowerSeries, WeightBlock, ps_log

F5 = field_of_order(5)


def blocks_of(*pairs):
    return [WeightBlock.from_charpoly(w, cp) for w, cp in pairs]


ELLIPTIC = blocks_of((0, [1, -1]), (1, [1, 3, 5]), (2, [1, -5]))
P1_F2 = blocks_of((0, [1, -1]), (2, [1, -2]))
FERMAT_F2 = blocks_of((0, [1, -1]), (1, [1, 0, 2]), (2, [1, -2]))


def place(q, poly):
    return Place.function(field_of_order(q), poly)


def test_assembly_examples():
    even, odd = tate_twist_assemble(P1_F2, 2)
    assert [src.eigenvalues for src in even.sources] == [(1 + 0j,), (1 + 0j,)]
    assert odd.sources == ()
    even, odd = tate_twist_assemble(ELLIPTIC, 5)
    (w1,) = odd.sources
    assert w1.charpoly == (1, 3, 5) and w1.mu == Fraction(1, 2)
    assert all(abs(abs(z) - math.sqrt(5)) < 1e-12 for z in w1.eigenvalues)
    even, _ = tate_twist_assemble(blocks_of((2, [1, -5])), 5)
    assert even.sources[0].charpoly == (1, -1)


def test_local_factor_examples():
    trivial = CohomDatum(EVEN, 5, (zeta_source(5),))
    assert P.trim(local_factor(trivial, place(5, (3, 1)))) == [1, -1]
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    assert P.trim(local_factor(odd, place(5, (0, 1)))) == [1, 3, 5]
    deg2 = places_of_degree(F5, 2)[0]
    assert P.trim(local_factor(odd, deg2)) == [1, 1, 25]


def test_local_factor_degree_d_matches_root_powers():
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    roots = P.reciprocal_roots([1, 3, 5])
    for d in (1, 2, 3, 4):
        pl = places_of_degree(F5, d)[0]
        expected = P.from_reciprocal_roots([r**d for r in roots])
        got = P.to_complex(local_factor(odd, pl))
        assert max(abs(a - b) for a, b in zip(got, expected)) < 1e-9 * 5**d


def test_trace_examples():
    trivial = CohomDatum(EVEN, 5, (zeta_source(5),))
    assert trace_sequence(trivial, place(5, (0, 1)), 4).values == (1, 1, 1, 1)
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    assert trace_sequence(odd, place(5, (0, 1)), 3).values == (-3, -1, 18)
    even, _ = tate_twist_assemble(P1_F2, 2)
    assert trace_sequence(even, place(2, (0, 1)), 5).values == (2,) * 5


def test_trace_log_series_matches_local_factor():
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    pl = place(5, (1, 1))
    ts = trace_sequence(odd, pl, 8)
    lg = ps_log(FormalPowerSeries(tuple(local_factor(odd, pl)), 8))
    assert ts.log_series().coeffs == tuple(-c for c in lg.coeffs)


def test_trace_bounds_hold_for_reference_data():
    for blocks, q in ((ELLIPTIC, 5), (P1_F2, 2), (FERMAT_F2, 2)):
        for datum in tate_twist_assemble(blocks, q):
            assert trace_bound_violations(datum, places_in(q, 0, 3), 6) == []


def test_trace_bound_detects_violation():
    # explicit data is bounded by its own roots; a constant family with a wrong mu is not
    explicit = CohomDatum(EVEN, 2, (ExplicitLocal.from_map({place(2, (0, 1)).to_text(): (1, -3)}),))
    wrong = CohomDatum(EVEN, 2, (ConstantFamily(2, (1, -2), Fraction(0)),))
    assert trace_bound_violations(wrong, places_in(2, 0, 1), 3)
    assert trace_bound_violations(explicit, places_in(2, 0, 1), 3) == []


def test_zeta_fq_t_at_two():
    handle = LSeriesHandle(CohomDatum(EVEN, 2, (zeta_source(2),)), 10)
    res = euler_product_eval(handle, 2)
    # the cutoff-10 error is covered by the tail bound
    assert abs(res.value - 2) <= res.tail_bound
    deep = euler_product_eval(LSeriesHandle(handle.datum, 40), 2)
    assert abs(deep.value - 2) < 1e-9


def test_zeta_q_at_two_against_partial_sums():
    handle = LSeriesHandle(CohomDatum(EVEN, None, (zeta_source(None),)), 10**5)
    res = euler_product_eval(handle, 2)
    oracle = math.fsum(1 / n**2 for n in range(1, 10**6))
    assert abs(res.value - oracle) < 1e-4
    assert abs(res.value - math.pi**2 / 6) < 1e-4


def test_empty_datum_is_one():
    for q in (2, 5, None):
        res = euler_product_eval(LSeriesHandle(empty_datum(EVEN, q), 5), complex(0.3, 2))
        assert res.value == 1


@pytest.mark.parametrize("B", [4, 6])
def test_tail_bound_dominates_error(B):
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    exact = closed_form(odd)
    for s in (2.0, complex(1.8, 3.0)):
        res = euler_product_eval(LSeriesHandle(odd, B), s)
        truth = exact.evaluate(5 ** (-s))
        assert abs(res.value - truth) <= res.tail_bound


def test_tail_bound_infinite_outside_region():
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    assert log_tail_bound(odd, 5, 1.25) == math.inf
    assert abscissa(odd) == 1.5


def test_closed_forms():
    trivial = CohomDatum(EVEN, 3, (zeta_source(3),))
    assert closed_form(trivial).den == (1, -3)
    even, _ = tate_twist_assemble(P1_F2, 2)
    assert closed_form(even).den == tuple(P.mul([1, -2], [1, -2]))
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    assert closed_form(odd).den == (1, 15, 125)
    assert closed_form_constant_family(ELLIPTIC, 5, ODD) == closed_form(odd)


@pytest.mark.parametrize("blocks,q", [(ELLIPTIC, 5), (P1_F2, 2), (FERMAT_F2, 2)])
def test_euler_series_matches_closed_form(blocks, q):
    for datum in tate_twist_assemble(blocks, q):
        B = 6
        assert euler_series(datum, B).coeffs == closed_form(datum).series(B).coeffs


def test_dirichlet_zeta_fq_t():
    coeffs = dirichlet_expand(CohomDatum(EVEN, 2, (zeta_source(2),)), 2**6)
    assert all(v == 1 for v in coeffs.values.values())
    assert [coeffs.degree_sum(n) for n in range(7)] == [2**n for n in range(7)]


def test_dirichlet_trivial_over_q():
    coeffs = dirichlet_expand(CohomDatum(EVEN, None, (zeta_source(None),)), 200)
    assert all(coeffs[n] == 1 for n in range(1, 201))


def test_dirichlet_elliptic_first_order():
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    coeffs = dirichlet_expand(odd, 25)
    # 1/(1 + 3x + 5x^2) = 1 - 3x + 4x^2 - ...
    assert coeffs[(0, 1)] == -3
    assert coeffs[(0, 0, 1)] == 4


def test_dirichlet_degree_sums_match_euler_series():
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    coeffs = dirichlet_expand(odd, 5**3)
    series = euler_series(odd, 3)
    assert [coeffs.degree_sum(n) for n in range(4)] == list(series.coeffs)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_dirichlet_multiplicativity(data):
    q = 3
    F = field_of_order(q)
    K = gf(F)
    _, odd = tate_twist_assemble(blocks_of((1, [1, 1, 3])), q)
    datum = CohomDatum(ODD, q, odd.sources + (zeta_source(q),))
    coeffs = _cached_expansion(datum)
    monics = [m for d in range(1, 3) for m in monic_polys(F, d)]
    a = data.draw(st.sampled_from(monics))
    b = data.draw(st.sampled_from(monics))
    if len(fq_gcd(a, b, K)) > 1:
        return
    assert coeffs[fq_mul(a, b, K)] == coeffs[a] * coeffs[b]


_EXPANSIONS = {}


def _cached_expansion(datum):
    key = repr(datum)
    if key not in _EXPANSIONS:
        _EXPANSIONS[key] = dirichlet_expand(datum, 3**4)
    return _EXPANSIONS[key]


def test_dirichlet_partial_sum_approximates_value():
    # sum_I b_I N(I)^-s over I of degree <= n equals the u-series truncated at u^n
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    coeffs = dirichlet_expand(odd, 5**4)
    s = 2.5
    u = 5 ** (-s)
    partial = sum(complex(v) * coeffs.norms[k] ** (-s) for k, v in coeffs.values.items())
    truncated = sum(complex(c) * u**n for n, c in enumerate(closed_form(odd).series(4).coeffs))
    assert abs(partial - truncated) < 1e-12


@pytest.mark.parametrize("blocks,q,parity,s", [
    (P1_F2, 2, EVEN, 2.5), (ELLIPTIC, 5, ODD, 2.0), (FERMAT_F2, 2, EVEN, 2.5), (FERMAT_F2, 2, ODD, complex(2.2, 1.0)),
])
def test_weight_shift(blocks, q, parity, s):
    rep = verify_weight_shift(blocks, q, [s, s + 0.5], 6, parity)
    assert rep.max_residual < 1e-9
    assert rep.dirichlet_equal


def test_convergence_examples():
    zeta2 = CohomDatum(EVEN, 2, (zeta_source(2),))
    (row,) = convergence_scan(zeta2, [1.25], list(range(2, 12)))
    incs = [e["increment"] for e in row.entries]
    ratios = [b / a for a, b in zip(incs, incs[1:])]
    assert all(r < 1 for r in ratios)
    assert abs(ratios[-1] - 2 ** -0.25) < 0.06
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    inside, outside = convergence_scan(odd, [1.75, 1.25], list(range(2, 9)))
    assert not inside.outside_region and inside.bounded
    assert outside.outside_region
    (diverging,) = convergence_scan(zeta2, [0.5], list(range(2, 9)))
    assert diverging.outside_region


def test_excluded_places():
    pl = place(5, (0, 1))
    d = CohomDatum(EVEN, 5, (zeta_source(5),), (pl.to_text(),))
    with pytest.raises(ExcludedPlace):
        local_factor(d, pl)
    with_t = euler_product_eval(LSeriesHandle(CohomDatum(EVEN, 5, (zeta_source(5),)), 8), 2).value
    without = euler_product_eval(LSeriesHandle(d, 8), 2).value
    assert abs(without - with_t * (1 - 5 ** -2)) < 1e-12


def test_pole_reported():
    res = euler_product_eval(LSeriesHandle(CohomDatum(EVEN, 2, (zeta_source(2),)), 3), complex(0, 2 * math.pi / math.log(2)))
    assert res.poles


def test_datum_json_round_trip():
    even, odd = tate_twist_assemble(ELLIPTIC, 5)
    for datum in (even, odd):
        assert CohomDatum.from_json(datum.to_json()) == datum


def test_evaluation_is_deterministic():
    _, odd = tate_twist_assemble(ELLIPTIC, 5)
    h = LSeriesHandle(odd, 5)
    a = euler_product_eval(h, complex(2, 1), workers=1)
    b = euler_product_eval(h, complex(2, 1), workers=4)
    assert a.value == b.value
    assert cmath.isfinite(a.value)
