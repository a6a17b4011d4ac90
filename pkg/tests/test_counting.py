import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nclfun.counting import (
    BudgetExceeded,
    CountCache,
    CountVector,
    HypersurfaceSpec,
    count_hypersurface,
    count_projective_space,
    count_weierstrass_points,
    fermat,
    smoothness_probe,
    variety_hash,
    weierstrass_counts,
)
from nclfun.field_arith import field_of_order


def brute_projective_count(p, n, poly):
    """Points of P^n(F_p) on {poly = 0}, poly a Python callable, by scanning normalized vectors."""
    count = 0
    for v in itertools.product(range(p), repeat=n + 1):
        nz = [c for c in v if c]
        if not nz or nz[0] != 1:
            continue
        if poly(*v) % p == 0:
            count += 1
    return count


@pytest.mark.parametrize("q,n,m,expected", [(2, 1, 1, 3), (2, 2, 2, 21), (3, 3, 1, 40)])
def test_projective_space(q, n, m, expected):
    assert count_projective_space(q, n, m) == expected


def test_hypersurface_examples():
    F2, F3 = field_of_order(2), field_of_order(3)
    assert count_hypersurface(fermat(F2, 2, 3)) == 3
    assert count_hypersurface(HypersurfaceSpec.parse(F3, 3, "x*w - y*z")) == 16
    assert count_hypersurface(HypersurfaceSpec.parse(F2, 2, "x + y + z")) == 3


@pytest.mark.parametrize("p,n,text,fn", [
    (3, 2, "x^2 + y^2 - z^2", lambda x, y, z: x * x + y * y - z * z),
    (5, 2, "x^3 + y^3 + z^3", lambda x, y, z: x**3 + y**3 + z**3),
    (3, 3, "x^3 + y^3 + z^3 + w^3", lambda x, y, z, w: x**3 + y**3 + z**3 + w**3),
    (5, 2, "y^2*z - x^3 - x*z^2 - z^3", lambda x, y, z: y * y * z - x**3 - x * z * z - z**3),
    (7, 2, "x^4 + 3*y^4 + z^4 + x*y*z^2", lambda x, y, z: x**4 + 3 * y**4 + z**4 + x * y * z * z),
])
def test_hypersurface_against_independent_scan(p, n, text, fn):
    spec = HypersurfaceSpec.parse(field_of_order(p), n, text)
    assert count_hypersurface(spec) == brute_projective_count(p, n, fn)


def test_weierstrass_examples():
    F5, F3 = field_of_order(5), field_of_order(3)
    assert count_weierstrass_points((0, 0, 0, 1, 1), F5) == 9
    assert count_weierstrass_points((0, 0, 0, 0, 0), F5, include_singular=False) == 5
    assert count_weierstrass_points((0, 0, 0, -1, 0), F3) == 4


def test_weierstrass_matches_plane_cubic():
    F5 = field_of_order(5)
    spec = HypersurfaceSpec.parse(F5, 2, "y^2*z - x^3 - x*z^2 - z^3")
    for m in (1, 2, 3):
        assert count_weierstrass_points((0, 0, 0, 1, 1), F5, m=m) == count_hypersurface(spec, m)


def test_extension_counts_satisfy_hasse():
    vec = weierstrass_counts((0, 0, 0, 1, 1), field_of_order(5), 4)
    assert vec.counts == (9, 27, 108, 675)
    for m, N in enumerate(vec.counts, start=1):
        assert abs(N - (5**m + 1)) <= 2 * 5 ** (m / 2)


def test_smoothness_probe_examples():
    assert smoothness_probe(fermat(field_of_order(5), 2, 3), 2)
    assert not smoothness_probe(HypersurfaceSpec.parse(field_of_order(3), 2, "x^2*y"), 1)
    assert smoothness_probe(HypersurfaceSpec.parse(field_of_order(2), 3, "x*w - y*z"), 2)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        count_hypersurface(fermat(field_of_order(5), 3, 3), 2, budget=100)


def test_invalid_specs():
    F = field_of_order(3)
    with pytest.raises(ValueError):
        HypersurfaceSpec.parse(F, 2, "x^2 + y")  # not homogeneous
    with pytest.raises(ValueError):
        HypersurfaceSpec.parse(F, 2, "0*x")
    with pytest.raises(ValueError):
        CountVector(3, (1, -1))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_random_conics_match_scan(p, coeffs):
    a, b, c = (x % p for x in coeffs)
    if not (a or b or c):
        return
    text = f"{a}*x^2 + {b}*y^2 + {c}*x*z"
    spec = HypersurfaceSpec(field_of_order(p), 2, ((a, (2, 0, 0)), (b, (0, 2, 0)), (c, (1, 0, 1))))
    assert count_hypersurface(spec) == brute_projective_count(p, 2, lambda x, y, z: a * x * x + b * y * y + c * x * z), text


def test_parallel_count_is_deterministic():
    spec = fermat(field_of_order(3), 3, 3)
    assert count_hypersurface(spec, 2, workers=1) == count_hypersurface(spec, 2, workers=4)


def test_cache_round_trip(tmp_path):
    spec = fermat(field_of_order(2), 2, 3)
    cache = CountCache(tmp_path)
    canonical = spec.canonical()
    assert cache.get(canonical, 3) is None
    path = cache.put(canonical, CountVector(2, (3, 9, 9)))
    data = json.loads(path.read_text())
    assert data["schema_version"] == 1 and data["variety_hash"] == variety_hash(canonical)
    assert data["counts"] == [3, 9, 9]
    assert cache.get(canonical, 2).counts == (3, 9)
    assert cache.get(canonical, 4) is None
    # a shorter vector never replaces a longer one
    cache.put(canonical, CountVector(2, (3,)))
    assert cache.get(canonical, 3).counts == (3, 9, 9)


def test_cache_rejects_corrupt_files(tmp_path):
    spec = fermat(field_of_order(2), 2, 3)
    cache = CountCache(tmp_path)
    path = cache.put(spec.canonical(), CountVector(2, (3,)))
    path.write_text("{not json")
    assert cache.get(spec.canonical(), 1) is None


def test_canonical_is_order_independent():
    F = field_of_order(5)
    a = HypersurfaceSpec.parse(F, 2, "x^3 + y^3 + z^3")
    b = HypersurfaceSpec.parse(F, 2, "z^3 + x^3 + y^3")
    assert variety_hash(a.canonical()) == variety_hash(b.canonical())
