"""Elliptic surfaces over F_q(t): reduction types and the L-polynomial.

Only characteristic >= 5 is supported. Point counts on fibers use the
completed-square model y^2 = x^3 + (b2/4) x^2 + (b4/2) x + b6/4, so
a_v = -sum_x chi(f(x)) over the residue field. That one formula gives the
trace at good places and +1 / -1 / 0 at split, nonsplit and additive fibers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import poly as P
from .field_arith import (
    FieldSpec,
    Place,
    embedding,
    extension,
    field_of_order,
    fq_add,
    fq_degree,
    fq_factor,
    fq_mul,
    fq_scale,
    fq_sub,
    fq_trim,
    fq_valuation,
    gf,
    place_root,
    places_of_degree,
)
from .riemann_check import RHVerdict, zeros_from_rational
from .zeta_recover import FormalPowerSeries, RationalFunctionT, ps_exp

STABILIZATION_WINDOW = 3
INFINITY = "inf"


class NonMinimalModel(ValueError):
    """The Weierstrass model is not minimal at some place."""


class ConstantFamilyError(ValueError):
    """A constant family has no L-polynomial here; use the lfunctions closed form."""


class NoStabilization(ValueError):
    """The truncated series did not end in enough zero coefficients."""

    def __init__(self, message: str, series: Sequence[int]):
        super().__init__(message)
        self.series = tuple(series)


def _const(c: int, p: int) -> int:
    return c % p


@dataclass(frozen=True)
class EllipticFamily:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with a_i in F_q[t]."""

    field: FieldSpec
    a: tuple  # (a1, a2, a3, a4, a6), each a coefficient tuple

    def __post_init__(self):
        if self.field.p in (2, 3):
            raise ValueError("characteristic 2 and 3 are not supported")
        if len(self.a) != 5:
            raise ValueError("need five Weierstrass coefficients a1, a2, a3, a4, a6")
        object.__setattr__(self, "a", tuple(fq_trim(c) for c in self.a))
        if not self.disc:
            raise ValueError("singular generic fiber: discriminant is zero")

    @classmethod
    def short(cls, field: FieldSpec, A: Sequence[int], B: Sequence[int]) -> "EllipticFamily":
        """y^2 = x^3 + A(t) x + B(t)."""
        return cls(field, ((), (), (), tuple(A), tuple(B)))

    @classmethod
    def legendre(cls, field: FieldSpec) -> "EllipticFamily":
        """y^2 = x(x - 1)(x - t)."""
        K = gf(field)
        return cls(field, ((), (K.neg(1), K.neg(1)), (), (0, 1), ()))

    @classmethod
    def from_json(cls, data: dict) -> "EllipticFamily":
        F = field_of_order(int(data["q"]))
        if "a" in data:
            return cls(F, tuple(tuple(int(c) for c in poly) for poly in data["a"]))
        return cls.short(F, [int(c) for c in data["A"]], [int(c) for c in data["B"]])

    def to_json(self) -> dict:
        return {"q": self.field.q, "a": [list(c) for c in self.a]}

    @property
    def K(self):
        return gf(self.field)

    def _c(self, n: int) -> int:
        return _const(n, self.field.p)

    def _lin(self, *terms) -> tuple:
        K = self.K
        out: tuple = ()
        for coef, poly in terms:
            out = fq_add(out, fq_scale(poly, self._c(coef), K), K)
        return out

    @cached_property
    def b(self) -> tuple:
        K = self.K
        a1, a2, a3, a4, a6 = self.a
        m = lambda x, y: fq_mul(x, y, K)  # noqa: E731
        b2 = self._lin((1, m(a1, a1)), (4, a2))
        b4 = self._lin((2, a4), (1, m(a1, a3)))
        b6 = self._lin((1, m(a3, a3)), (4, a6))
        return b2, b4, b6

    @cached_property
    def c4c6(self) -> tuple:
        K = self.K
        b2, b4, b6 = self.b
        m = lambda x, y: fq_mul(x, y, K)  # noqa: E731
        c4 = self._lin((1, m(b2, b2)), (-24, b4))
        c6 = self._lin((-1, m(b2, m(b2, b2))), (36, m(b2, b4)), (-216, b6))
        return c4, c6

    @cached_property
    def AB(self) -> tuple:
        """Short model y^2 = x^3 + A x + B with A = -27 c4, B = -54 c6."""
        c4, c6 = self.c4c6
        return self._lin((-27, c4)), self._lin((-54, c6))

    @cached_property
    def disc(self) -> tuple:
        """-16 (4A^3 + 27B^2) of the short model; 6^12 times the usual discriminant."""
        K = self.K
        A, B = self.AB
        A3 = fq_mul(A, fq_mul(A, A, K), K)
        B2 = fq_mul(B, B, K)
        return self._lin((-64, A3), (-432, B2))

    @cached_property
    def cubic(self) -> tuple:
        """Coefficients (f0, f1, f2) of f(x) = x^3 + f2 x^2 + f1 x + f0 in F_q[t]."""
        K = self.K
        b2, b4, b6 = self.b
        inv2, inv4 = K.inv(self._c(2)), K.inv(self._c(4))
        return fq_scale(b6, inv4, K), fq_scale(b4, inv2, K), fq_scale(b2, inv4, K)

    @property
    def is_constant(self) -> bool:
        return all(len(c) <= 1 for c in self.a)

    @cached_property
    def is_isotrivial(self) -> bool:
        """j-invariant constant, i.e. A^3 and B^2 proportional."""
        K = self.K
        A, B = self.AB
        if not A or not B:
            return True
        A3 = fq_mul(A, fq_mul(A, A, K), K)
        B2 = fq_mul(B, B, K)
        return fq_scale(A3, B2[-1], K) == fq_scale(B2, A3[-1], K) and len(A3) == len(B2)

    def j_invariant(self) -> tuple[tuple, tuple]:
        """(numerator, denominator) of j = 1728 * 4A^3 / (4A^3 + 27B^2)."""
        K = self.K
        A, B = self.AB
        A3 = fq_mul(A, fq_mul(A, A, K), K)
        den = self._lin((4, A3), (27, fq_mul(B, B, K)))
        return self._lin((1728 * 4, A3)), den


@dataclass(frozen=True)
class LocalReduction:
    place: str
    degree: int
    norm: int
    kind: str  # good | multiplicative-split | multiplicative-nonsplit | additive
    a_v: int
    v_disc: int

    @property
    def good(self) -> bool:
        return self.kind == "good"

    def local_factor(self) -> list[int]:
        """Polynomial in T: 1 - a T^d + N T^2d (good) or 1 - a T^d (bad)."""
        d = self.degree
        out = [0] * (2 * d + 1 if self.good else d + 1)
        out[0] = 1
        out[d] -= self.a_v
        if self.good:
            out[2 * d] += self.norm
        return P.trim(out)

    def to_json(self) -> dict:
        return {"place": self.place, "degree": self.degree, "norm": self.norm, "type": self.kind,
                "a_v": self.a_v, "v_disc": self.v_disc}


def _char_sum(K, f0: int, f1: int, f2: int) -> int:
    """sum over x in K of chi(x^3 + f2 x^2 + f1 x + f0)."""
    x = K.elements()
    val = K.vpoly_eval([f0, f1, f2, 1], x)
    return int(K.chi(val).sum())


def _embed_eval(poly: tuple, emb: np.ndarray, K, alpha: int) -> int:
    if not poly:
        return 0
    return int(K.vpoly_eval([int(emb[c]) for c in poly], np.array([alpha]))[0])


def infinity_model(E: EllipticFamily) -> tuple[EllipticFamily, int]:
    """Model over F_q[s], s = 1/t: A' = s^4m A(1/s), B' = s^6m B(1/s), m minimal."""
    if E.is_constant:
        return E, 0
    A, B = E.AB
    m = max(math.ceil(max(fq_degree(A), 0) / 4), math.ceil(max(fq_degree(B), 0) / 6), 0)

    def flip(poly, n):
        padded = list(poly) + [0] * (n + 1 - len(poly))
        return tuple(padded[::-1])

    return EllipticFamily.short(E.field, flip(A, 4 * m), flip(B, 6 * m)), m


def _check_minimal_at(E: EllipticFamily, gen: tuple, vd: int) -> None:
    if vd >= 12:
        A = E.AB[0]
        if not A or fq_valuation(A, gen, E.K) >= 4:
            raise NonMinimalModel(f"model is not minimal at {gen}; minimalize first (v(disc) = {vd})")


def reduce_at_place(E: EllipticFamily, v: Place | str) -> LocalReduction:
    """Reduction type and a_v at a finite place, or at ``"inf"`` via the infinity model."""
    if v == INFINITY:
        Einf, _ = infinity_model(E)
        red = reduce_at_place(Einf, Place.function(E.field, (0, 1)))
        return LocalReduction(INFINITY, 1, E.field.q, red.kind, red.a_v, red.v_disc)
    if v.kind != "function" or v.field != E.field:
        raise ValueError(f"{v} is not a place of F_{E.field.q}(t)")
    K0 = E.K
    vd = fq_valuation(E.disc, v.generator, K0)
    _check_minimal_at(E, v.generator, vd)
    big, alpha = place_root(v)
    K = gf(big)
    emb = embedding(E.field, big)
    f0, f1, f2 = (_embed_eval(c, emb, K, alpha) for c in E.cubic)
    a_v = -_char_sum(K, f0, f1, f2)
    if vd == 0:
        kind = "good"
    else:
        A, B = E.AB
        if _embed_eval(A, emb, K, alpha) == 0 and _embed_eval(B, emb, K, alpha) == 0:
            kind = "additive"
        else:
            kind = "multiplicative-split" if a_v == 1 else "multiplicative-nonsplit"
    return LocalReduction(v.to_text(), v.degree, v.norm, kind, a_v, vd)


def check_minimal(E: EllipticFamily) -> None:
    """Raise NonMinimalModel if v(disc) >= 12 and v(c4) >= 4 at some finite place."""
    for pi, mult in fq_factor(E.disc, E.K):
        if mult >= 12:
            _check_minimal_at(E, pi, mult)


def bad_reductions(E: EllipticFamily, include_infinity: bool = True) -> list[LocalReduction]:
    out = [reduce_at_place(E, Place.function(E.field, pi)) for pi, _ in fq_factor(E.disc, E.K)]
    if include_infinity:
        inf = reduce_at_place(E, INFINITY)
        if not inf.good:
            out.append(inf)
    return out


# --- L-polynomial ----------------------------------------------------------------------


def _fiber_sum_fast(E: EllipticFamily, n: int) -> int:
    """sum over t in F_{q^n} of a_t, for f(x, t) of degree <= 2 in t.

    For fixed x the inner sum over t of chi(c2 t^2 + c1 t + c0) has a
    closed form, so the work is linear in q^n.
    """
    big = extension(E.field, n)
    K = gf(big)
    emb = embedding(E.field, big)
    Q = K.q
    x = K.elements()
    x2 = K.vmul(x, x)
    x3 = K.vmul(x2, x)
    f0, f1, f2 = E.cubic
    coeff = []
    for k in range(3):
        acc = x3 if k == 0 else np.zeros_like(x)
        for poly, xp in ((f0, None), (f1, x), (f2, x2)):
            if len(poly) > k and poly[k]:
                c = int(emb[poly[k]])
                term = np.full_like(x, c) if xp is None else K.vmul(xp, c)
                acc = K.vadd(acc, term)
        coeff.append(acc)
    c0, c1, c2 = coeff
    disc = K.vsub(K.vmul(c1, c1), K.vmul(K.vmul(c2, c0), int(emb[4 % E.field.p])))
    chi2 = K.chi(c2)
    total = np.where(c2 != 0, np.where(disc != 0, -chi2, (Q - 1) * chi2), 0)
    total = total + np.where((c2 == 0) & (c1 == 0), Q * K.chi(c0), 0)
    return -int(total.sum())


def _fiber_sum_direct(E: EllipticFamily, n: int, chunk: int = 1 << 20) -> int:
    big = extension(E.field, n)
    K = gf(big)
    emb = embedding(E.field, big)
    t = K.elements()
    fs = [K.vpoly_eval([int(emb[c]) for c in poly], t) if poly else np.zeros_like(t) for poly in E.cubic]
    x = K.elements()
    total = 0
    step = max(1, chunk // K.q)
    for i in range(0, K.q, step):
        f0, f1, f2 = (f[i : i + step, None] for f in fs)
        xx = x[None, :]
        val = K.vadd(K.vmul(K.vadd(K.vmul(K.vadd(xx, f2), xx), f1), xx), f0)
        total += int(K.chi(val).sum())
    return -total


def trace_sum(E: EllipticFamily, n: int) -> int:
    """c_n = sum over t in P^1(F_{q^n}) of the fiber trace a_t(q^n)."""
    fast = max(len(c) for c in E.cubic) <= 3
    finite = _fiber_sum_fast(E, n) if fast else _fiber_sum_direct(E, n)
    Einf, _ = infinity_model(E)
    big = extension(E.field, n)
    K = gf(big)
    emb = embedding(E.field, big)
    f0, f1, f2 = (int(emb[c[0]]) if c else 0 for c in Einf.cubic)
    return finite - _char_sum(K, f0, f1, f2)


@dataclass
class LPolynomial:
    coeffs: tuple[int, ...]
    B: int
    series: tuple[int, ...]
    route: str
    isotrivial: bool = False
    reductions: list[LocalReduction] = field(default_factory=list)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def reciprocal_roots(self) -> list[complex]:
        return P.reciprocal_roots(list(self.coeffs)) if self.degree > 0 else []

    def functional_equation_sign(self, q: int) -> int | None:
        """epsilon with c_{D-k} = epsilon q^(D-2k) c_k for all k, or None."""
        D = self.degree
        for eps in (1, -1):
            if all(self.coeffs[D - k] * q ** max(2 * k - D, 0) == eps * self.coeffs[k] * q ** max(D - 2 * k, 0)
                   for k in range(D + 1)):
                return eps
        return None

    def symmetry_residual(self, q: int) -> float:
        """max over roots rho of the distance from q^2/rho to the nearest root, relative to q."""
        roots = self.reciprocal_roots()
        worst = 0.0
        for r in roots:
            image = q * q / r
            worst = max(worst, min(abs(image - s) for s in roots) / q)
        return worst

    def to_json(self) -> dict:
        return {"L_coeffs": list(self.coeffs), "degree": self.degree, "B": self.B, "route": self.route,
                "series": list(self.series), "isotrivial": self.isotrivial}


def _stabilize(series: Sequence[int], B: int, window: int) -> tuple[int, ...]:
    D = max((i for i, c in enumerate(series) if c), default=0)
    if B - D < window:
        raise NoStabilization(
            f"coefficients did not vanish on T^{D + 1}..T^{D + window} within cutoff {B}; raise B", series)
    return tuple(int(c) for c in series[: D + 1])


def series_by_traces(E: EllipticFamily, B: int) -> list[int]:
    logs = [0] + [P._div(trace_sum(E, n), n) for n in range(1, B + 1)]
    out = ps_exp(FormalPowerSeries(tuple(logs), B)).coeffs
    if any(c.denominator != 1 for c in out):
        raise ArithmeticError("non-integral L-series; inconsistent traces")  # pragma: no cover
    return [int(c) for c in out]


def series_by_places(E: EllipticFamily, B: int) -> tuple[list[int], list[LocalReduction]]:
    """prod of inverse local factors over all places of degree <= B (and infinity)."""
    g = [1] + [0] * B
    reds = []
    places = [INFINITY] + [pl for d in range(1, B + 1) for pl in places_of_degree(E.field, d)]
    for pl in places:
        red = reduce_at_place(E, pl)
        if not red.good:
            reds.append(red)
        d, a = red.degree, red.a_v
        N = red.norm if red.good else 0
        for k in range(d, B + 1):  # multiply g by 1/(1 - a T^d + N T^2d)
            g[k] += a * g[k - d] - (N * g[k - 2 * d] if k >= 2 * d else 0)
    return g, reds


def l_polynomial(E: EllipticFamily, B: int, route: str = "traces",
                 window: int = STABILIZATION_WINDOW) -> LPolynomial:
    """The L-polynomial, read off the Euler product truncated at degree B."""
    if B < 1:
        raise ValueError("B must be >= 1")
    if E.is_constant:
        raise ConstantFamilyError("constant family: the L-function is not a polynomial; use the constant-family closed form")
    check_minimal(E)
    if route == "traces":
        series, reds = series_by_traces(E, B), bad_reductions(E)
    elif route == "places":
        series, reds = series_by_places(E, B)
    else:
        raise ValueError(f"unknown route {route!r}")
    coeffs = _stabilize(series, B, window)
    return LPolynomial(coeffs, B, tuple(series), route, E.is_isotrivial, reds)


def elliptic_rh_verdict(L: Sequence[int] | LPolynomial, q: int, tol: float = 1e-9) -> RHVerdict:
    """Zeros of L(q^-s) against the line Re(s) = 1 (|rho| = q for reciprocal roots)."""
    coeffs = list(L.coeffs) if isinstance(L, LPolynomial) else list(L)
    return zeros_from_rational(RationalFunctionT(tuple(coeffs), (1,)), q, "odd", tol)
