import pytest

from nclfun import poly as P
from nclfun.counting import BudgetExceeded, CountCache
from nclfun.varieties import VarietySpec, zeta_pipeline
from nclfun.verify import SUITES, group_algebra_oracle, multiplicativity_trials, run_suite


def test_elliptic_pipeline():
    rep = zeta_pipeline(VarietySpec.from_json({"kind": "weierstrass", "q": 5, "a": [0, 0, 0, 1, 1]}))
    assert rep.counts.counts[0] == 9
    assert rep.zeta.num == (1, 3, 5)
    assert [b.w for b in rep.blocks] == [0, 1, 2]


def test_projective_plane_pipeline():
    rep = zeta_pipeline(VarietySpec.from_json({"kind": "projective_space", "q": 3, "n": 2}))
    assert rep.zeta.num == (1,)
    assert rep.zeta.den == tuple(P.mul(P.mul([1, -1], [1, -3]), [1, -9]))


def test_hypersurface_pipeline_uses_betti():
    spec = VarietySpec.fermat(2, 3, 3)
    assert spec.resolved_betti() == (1, 0, 7, 0, 1)
    rep = zeta_pipeline(spec)
    assert rep.counts.B == 7
    assert sum(b.beta for b in rep.blocks) == 9


def test_generic_reconstruction_without_betti():
    spec = VarietySpec.from_json({"kind": "hypersurface", "q": 3, "n": 2, "equation": "x^2*y"})
    rep = zeta_pipeline(spec, max_total_degree=3)
    assert rep.betti is None
    # x^2 y = 0 is two lines meeting in a point: N_m = 2 q^m + 1
    assert rep.counts.counts[:3] == (7, 19, 55)


def test_pipeline_uses_cache(tmp_path):
    spec = VarietySpec.from_json({"kind": "weierstrass", "q": 5, "a": [0, 0, 0, 1, 1]})
    cache = CountCache(tmp_path)
    cold = zeta_pipeline(spec, cache=cache)
    warm = zeta_pipeline(spec, cache=cache, budget=1)  # a hit never touches the counter
    assert cold.zeta == warm.zeta and cold.counts == warm.counts


def test_budget_propagates():
    with pytest.raises(BudgetExceeded):
        zeta_pipeline(VarietySpec.fermat(5, 3, 3), budget=1000)


@pytest.mark.parametrize("raw", [
    {"kind": "weierstrass", "q": 5, "a": [0, 1]},
    {"kind": "hypersurface", "q": 6, "n": 2, "equation": "x"},
    {"kind": "torus", "q": 5},
    {"q": 5},
])
def test_malformed_specs(raw):
    with pytest.raises(ValueError):
        VarietySpec.from_json(raw)


@pytest.mark.parametrize("n,p,expected", [
    (5, 2, [1, -1, 0, 0, -1, 1]),  # x^5 - 1 = (x - 1) * irreducible quartic mod 2
    (1, 3, [1, -1]),
    (4, 2, [1, -3, 3, -1]),  # 4 = 2^2: x - 1 with multiplicity 3
])
def test_group_algebra_oracle(n, p, expected):
    assert P.trim(group_algebra_oracle(n, p)) == expected


def test_multiplicativity_trials_small():
    trials, failures = multiplicativity_trials(trials=50, seed=7)
    assert trials == 50 and failures == 0


@pytest.mark.parametrize("suite", [s for s in SUITES if s != "convergence"])
def test_suites_pass(suite):
    res = run_suite(suite)
    assert res.passed, res.to_json()


def test_convergence_suite_reports_every_check():
    res = run_suite("convergence")
    names = [c.name for c in res.checks]
    assert len(names) == 5
    # every check except strict monotonicity of the elliptic increments holds
    failing = [c.name for c in res.checks if not c.passed]
    assert failing == [names[0]]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nonsense")
