"""Named identity suites run by ``ncl verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from . import poly as P
from .artin_char0 import dedekind_local_factor
from .field_arith import enumerate_places, field_of_order, fq_factor, gf
from .lfunctions import (
    EVEN,
    ODD,
    CohomDatum,
    ConstantFamily,
    ExplicitLocal,
    LSeriesHandle,
    convergence_scan,
    local_factor,
    places_in,
    tate_twist_assemble,
    trace_bound_violations,
    verify_weight_shift,
    zeta_source,
)
from .motives import (
    NCMotive,
    cy_summand,
    direct_sum,
    gluing,
    group_algebra_atom,
    hpd_check,
    local_identity,
    variety_motive,
    zeta_motive,
)
from .ntheory import primes_up_to, valuation
from .varieties import VarietySpec, zeta_pipeline

SUITES = ("weight-shift", "multiplicativity", "trace-bounds", "convergence", "cy", "gluing", "finite1", "hpd")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_json(self) -> dict:
        return {"suite": self.suite, "verdict": "pass" if self.passed else "fail",
                "checks": [{"name": c.name, "verdict": "pass" if c.passed else "fail", "detail": c.detail}
                           for c in self.checks]}


# --- reference varieties -------------------------------------------------------------------

REFERENCE = {
    "p1_f2": lambda: VarietySpec("projective_space", 2, (1,), (1, 0, 1)),
    "elliptic_f5": lambda: VarietySpec("weierstrass", 5, (0, 0, 0, 1, 1), (1, 2, 1)),
    "fermat_cubic_f2": lambda: VarietySpec.fermat(2, 2, 3),
    "cubic_surface_f2": lambda: VarietySpec.fermat(2, 3, 3),
    "quadric_f3": lambda: VarietySpec.from_json({"kind": "hypersurface", "q": 3, "n": 3, "equation": "x*w - y*z"}),
    "fermat_cubic_f5": lambda: VarietySpec.fermat(5, 2, 3),
}


@lru_cache(maxsize=None)
def reference_blocks(name: str):
    spec = REFERENCE[name]()
    return spec.q, tuple(zeta_pipeline(spec).blocks)


def reference_motive(name: str) -> NCMotive:
    q, blocks = reference_blocks(name)
    return variety_motive(blocks, q, name)


# --- suites ---------------------------------------------------------------------------------


SAMPLES = (2.0, 2.5, 3 + 1j, 1.8 - 2j, 4.0)


def suite_weight_shift(B: int = 6, tol: float = 1e-9) -> SuiteResult:
    res = SuiteResult("weight-shift")
    for name in ("p1_f2", "elliptic_f5", "fermat_cubic_f2"):
        q, blocks = reference_blocks(name)
        for parity in (EVEN, ODD):
            rep = verify_weight_shift(blocks, q, SAMPLES, B, parity)
            res.add(f"{name} {parity}", rep.max_residual < tol and rep.dirichlet_equal,
                    f"max residual {rep.max_residual:.3g}; Dirichlet coefficients to norm {q}^{B} "
                    f"{'equal' if rep.dirichlet_equal else 'differ'}")
    return res


def random_motive(rng: random.Random, q: int | None) -> NCMotive:
    """A few random atoms: zeta factors, integer charpolys, explicit local polynomials.

    Rational coefficients have power-of-two denominators and complex ones
    integer parts, so floating-point products are exact and equality can be
    tested with ``==``.
    """
    m = NCMotive.empty(q)
    places = places_in(q, 0, 2 if q else 13)
    for _ in range(rng.randint(0, 3)):
        parity = rng.choice((EVEN, ODD))
        kind = rng.choice(("zeta", "charpoly", "explicit"))
        if kind == "zeta":
            src = zeta_source(q, "zeta")
        elif kind == "charpoly" and q is not None:
            cp = (1,) + tuple(rng.randint(-4, 4) for _ in range(rng.randint(1, 3)))
            if cp[-1] == 0:
                cp = cp[:-1] + (1,)
            src = ConstantFamily(q, cp, Fraction(1, 2) if parity == ODD else 0, "cp")
        else:
            chosen = rng.sample(places, k=min(len(places), rng.randint(1, 3)))
            polys = {}
            for pl in chosen:
                deg = rng.randint(1, 2)
                polys[pl] = (1,) + tuple(complex(rng.randint(-3, 3), rng.randint(-3, 3)) if rng.random() < 0.5
                                         else Fraction(rng.randint(-5, 5), rng.choice((1, 2, 4, 8))) for _ in range(deg))
                if polys[pl][-1] == 0:
                    polys[pl] = polys[pl][:-1] + (2,)
            src = ExplicitLocal.from_map(polys, "explicit")
        atom = CohomDatum(parity, q, (src,))
        part = NCMotive(q, atom if parity == EVEN else CohomDatum(EVEN, q),
                        atom if parity == ODD else CohomDatum(ODD, q), (kind,))
        m = direct_sum(m, part)
    return m


def multiplicativity_trials(trials: int = 1000, seed: int = 20240501, max_degree: int = 4) -> tuple[int, int]:
    """(trials, failures): local factor of m1 + m2 versus the product, exactly."""
    rng = random.Random(seed)
    bases = (2, 3, None)
    places = {q: places_in(q, 0, max_degree if q else 47) for q in bases}
    failures = 0
    for _ in range(trials):
        q = rng.choice(bases)
        m1, m2 = random_motive(rng, q), random_motive(rng, q)
        s = direct_sum(m1, m2)
        for pl in places[q]:
            for par in (EVEN, ODD):
                lhs = local_factor(s.datum(par), pl)
                rhs = P.mul(local_factor(m1.datum(par), pl), local_factor(m2.datum(par), pl))
                if P.trim(lhs) != P.trim(rhs):
                    failures += 1
    return trials, failures


def suite_multiplicativity(trials: int = 1000) -> SuiteResult:
    res = SuiteResult("multiplicativity")
    n, fails = multiplicativity_trials(trials)
    res.add(f"{n} random direct sums", fails == 0, f"{fails} mismatched local factors")
    for name in ("elliptic_f5", "p1_f2"):
        q = reference_blocks(name)[0]
        m1 = reference_motive(name)
        m2 = reference_motive("elliptic_f5" if q == 5 else "fermat_cubic_f2")
        s = direct_sum(m1, m2)
        ok = all(P.trim(local_factor(s.datum(par), pl))
                 == P.trim(P.mul(local_factor(m1.datum(par), pl), local_factor(m2.datum(par), pl)))
                 for pl in enumerate_places(field_of_order(q), 3) for par in (EVEN, ODD))
        res.add(f"{name} + companion, places of degree <= 3", ok)
    return res


CONSTANT_FAMILIES = ("p1_f2", "elliptic_f5", "fermat_cubic_f2", "cubic_surface_f2", "quadric_f3")


def suite_trace_bounds(max_degree: int = 4, n_max: int = 6) -> SuiteResult:
    res = SuiteResult("trace-bounds")
    for name in CONSTANT_FAMILIES:
        q, blocks = reference_blocks(name)
        even, odd = tate_twist_assemble(blocks, q)
        places = enumerate_places(field_of_order(q), max_degree)
        for datum in (even, odd):
            bad = trace_bound_violations(datum, places, n_max)
            res.add(f"{name} {datum.parity}", not bad,
                    f"{len(places)} places, n <= {n_max}, {len(bad)} violation(s)")
    return res


def elliptic_odd_datum() -> CohomDatum:
    q, blocks = reference_blocks("elliptic_f5")
    return tate_twist_assemble(blocks, q)[1]


def suite_convergence() -> SuiteResult:
    res = SuiteResult("convergence")
    datum = elliptic_odd_datum()
    inside, outside = convergence_scan(datum, [1.75, 1.25], list(range(2, 9)))
    incs = ", ".join(f"{e['increment']:.4g}" for e in inside.entries)
    res.add("elliptic odd datum, s=1.75: increments decrease monotonically (B=2..8)", inside.monotone, incs)
    res.add("elliptic odd datum, s=1.75: increments within the tail bound", inside.bounded and not inside.outside_region)
    res.add("elliptic odd datum, s=1.25: outside-region flag raised", outside.outside_region)
    zeta2 = CohomDatum(EVEN, 2, (zeta_source(2),))
    (row,) = convergence_scan(zeta2, [1.25], list(range(2, 13)))
    ratios = [b["increment"] / a["increment"] for a, b in zip(row.entries, row.entries[1:])]
    res.add("zeta of F_2[t], s=1.25: geometric decay of increments", row.monotone and max(ratios) < 1,
            f"max ratio {max(ratios):.3f} (2^(1-s) = {2 ** -0.25:.3f})")
    (trivial,) = convergence_scan(zeta2, [0.5], list(range(2, 9)))
    res.add("zeta of F_2[t], s=0.5: flagged outside the region", trivial.outside_region)
    return res


def suite_cy(check_degree: int = 3) -> SuiteResult:
    res = SuiteResult("cy")
    cases = (("cubic_surface_f2", 3, 3, 8), ("quadric_f3", 3, 2, None), ("fermat_cubic_f5", 2, 3, None))
    for name, n, deg, expect in cases:
        m = reference_motive(name)
        t = cy_summand(m, n, deg, check_degree)
        k = n - deg + 1
        rep = local_identity(direct_sum(t, zeta_motive(m.q, k)), m, check_degree, tol=0.0)
        beta = sum(s.beta for s in t.even.sources)
        ok = rep.passed and (expect is None or beta == expect)
        res.add(f"{name}: L_even = L_even(T) * zeta^{k}", ok,
                f"{rep.places_checked} places, residual {rep.max_residual}; T has {beta} even eigenvalues")
    return res


def suite_gluing(B: int = 3) -> SuiteResult:
    res = SuiteResult("gluing")
    p1 = reference_motive("p1_f2")
    rep = local_identity(gluing(p1, p1), zeta_motive(2, 4), B, tol=0.0)
    res.add("glue(P1, P1) = zeta^4", rep.passed)
    e = reference_motive("elliptic_f5")
    point = zeta_motive(5, 1)
    g = gluing(e, point)
    ok = all(P.trim(local_factor(g.odd, pl)) == P.trim(local_factor(e.odd, pl))
             for pl in enumerate_places(field_of_order(5), B))
    res.add("glue(E, point) has the odd part of E", ok)
    res.add("glue(m, empty) = m", local_identity(gluing(e, NCMotive.empty(5)), e, B, tol=0.0).passed)
    f = reference_motive("fermat_cubic_f2")
    res.add("glue and sum agree", local_identity(gluing(p1, f), direct_sum(p1, f), B, tol=0.0).passed)
    return res


def group_algebra_oracle(n: int, p: int) -> list[int]:
    """Local factor of Q[Z/n] at p from the factorization of x^n' - 1 over F_p.

    With n = n' p^v, the primes above p of prod_{d | n} Q(zeta_d) have the
    residue degrees of the irreducible factors of x^n' - 1 mod p, each
    appearing v + 1 times.
    """
    v = valuation(n, p)
    n1 = n // p**v
    K = gf(field_of_order(p))
    f = tuple([K.neg(1)] + [0] * (n1 - 1) + [1])
    out = [1]
    for g, mult in fq_factor(f, K):
        assert mult == 1
        d = len(g) - 1
        out = P.mul(out, [1] + [0] * (d - 1) + [-1])
    return P.power(out, v + 1)


def suite_finite1(n_max: int = 12, prime_bound: int = 100) -> SuiteResult:
    res = SuiteResult("finite1")
    for n in range(1, n_max + 1):
        m = group_algebra_atom(n)
        bad = []
        for p in primes_up_to(prime_bound):
            pl = places_in(None, p - 1, p)[0]
            got = P.trim(local_factor(m.even, pl))
            via_dedekind = [1]
            for src in m.even.sources:
                via_dedekind = P.mul(via_dedekind, dedekind_local_factor(src.d, p))
            if got != P.trim(via_dedekind) or got != P.trim(group_algebra_oracle(n, p)):
                bad.append(p)
            if P.trim(local_factor(m.odd, pl)) != [1]:
                bad.append(p)
        res.add(f"Q[Z/{n}]: L_even = prod_(d|n) zeta_Q(zeta_d), L_odd = 1", not bad,
                f"primes <= {prime_bound}; mismatches at {bad}" if bad else f"primes <= {prime_bound}")
    return res


def suite_hpd(B: int = 3) -> SuiteResult:
    res = SuiteResult("hpd")
    common = reference_motive("elliptic_f5")
    x = direct_sum(common, zeta_motive(5, 3))
    y = direct_sum(common, zeta_motive(5, 1))
    res.add("synthetic C + zeta^3 vs C + zeta^1 (a=3, b=1)", hpd_check(x, y, 3, 1, B).passed)
    q, blocks = reference_blocks("elliptic_f5")
    even, odd = tate_twist_assemble(blocks, q)
    bent = odd.with_sources((ConstantFamily(5, (1, 3, 6), Fraction(1, 2), "w1"),))
    x_bad = NCMotive(5, direct_sum(common, zeta_motive(5, 3)).even, bent)
    rep = hpd_check(x_bad, y, 3, 1, B)
    first = rep.failures[0]["place"] if rep.failures else "none"
    res.add("perturbed eigenvalue is detected", not rep.passed, f"first failing place {first}")
    quadric = reference_motive("quadric_f3")
    p1 = variety_motive(zeta_pipeline(VarietySpec("projective_space", 3, (1,), (1, 0, 1))).blocks, 3, "p1_f3")
    rep = hpd_check(quadric, p1, 2, 0, B)
    res.add("quadric surface vs P1 over F_3 (a=2, b=0)", rep.passed, f"max residual {rep.max_residual}")
    return res


RUNNERS: dict[str, Callable[..., SuiteResult]] = {
    "weight-shift": suite_weight_shift,
    "multiplicativity": suite_multiplicativity,
    "trace-bounds": suite_trace_bounds,
    "convergence": suite_convergence,
    "cy": suite_cy,
    "gluing": suite_gluing,
    "finite1": suite_finite1,
    "hpd": suite_hpd,
}


def run_suite(name: str, **params) -> SuiteResult:
    if name not in RUNNERS:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return RUNNERS[name](**params)
