"""Parity-graded L-functions: local factors, Euler products, Dirichlet series.

A ``CohomDatum`` is a list of sources whose local factors multiply. Over
F_q(t) the places are the monic irreducibles of F_q[t]; the place at
infinity is not part of the product. Over Q the places are the primes.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Sequence

from . import poly as P
from .artin_char0 import dedekind_local_factor
from .field_arith import (
    Place,
    count_irreducibles,
    field_of_order,
    fq_mul,
    gf,
    places_of_degree,
)
from .ntheory import is_prime, primes_up_to, totient
from .zeta_recover import (
    FormalPowerSeries,
    RationalFunctionT,
    WeightBlock,
    power_map,
    power_sums,
    ps_exp,
)

EVEN, ODD = "even", "odd"


class ExcludedPlace(LookupError):
    """Raised by ``local_factor`` at a place in the datum's excluded set."""


# --- sources -------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantFamily:
    """Frobenius eigenvalues of a variety over F_q, base-changed to F_q(t).

    ``charpoly`` is prod (1 - lambda x) and every |lambda| should be q^mu.
    At a degree-d place Frobenius acts by lambda^d.
    """

    q: int
    charpoly: tuple
    mu: Fraction = Fraction(0)
    label: str = ""

    def __post_init__(self):
        cp = tuple(P.trim(self.charpoly))
        if not cp or cp[0] != 1:
            raise ValueError("characteristic polynomial must have constant term 1")
        if P.exact(cp):
            cp = tuple(Fraction(c) for c in cp)
        object.__setattr__(self, "charpoly", cp)
        object.__setattr__(self, "mu", Fraction(self.mu))

    @property
    def beta(self) -> int:
        return len(self.charpoly) - 1

    @cached_property
    def eigenvalues(self) -> tuple[complex, ...]:
        return tuple(P.reciprocal_roots(self.charpoly)) if self.beta else ()

    def local(self, place: Place) -> list:
        return _power_map_cached(self.charpoly, place.degree)

    def to_json(self) -> dict:
        return {"kind": "constant_family", "q": self.q, "mu": str(self.mu), "label": self.label,
                "charpoly": [_num_to_json(c) for c in self.charpoly]}


@lru_cache(maxsize=4096)
def _power_map_cached(charpoly: tuple, d: int) -> list:
    return power_map(list(charpoly), d)


@dataclass(frozen=True)
class ExplicitLocal:
    """User-supplied local polynomials at finitely many places (1 elsewhere)."""

    polys: tuple[tuple[str, tuple], ...]
    label: str = ""

    def __post_init__(self):
        norm = []
        for text, coeffs in self.polys:
            place = Place.from_text(text) if isinstance(text, str) else text
            cs = tuple(P.trim(coeffs))
            if not cs or cs[0] != 1:
                raise ValueError(f"local polynomial at {place} must have constant term 1")
            norm.append((place.to_text(), cs))
        object.__setattr__(self, "polys", tuple(sorted(norm, key=lambda kv: Place.from_text(kv[0]).sort_key())))

    @classmethod
    def from_map(cls, mapping: dict, label: str = "") -> "ExplicitLocal":
        return cls(tuple((k.to_text() if isinstance(k, Place) else k, tuple(v)) for k, v in mapping.items()), label)

    @cached_property
    def table(self) -> dict[str, tuple]:
        return dict(self.polys)

    @cached_property
    def places(self) -> tuple[Place, ...]:
        return tuple(Place.from_text(t) for t, _ in self.polys)

    def local(self, place: Place) -> list:
        return list(self.table.get(place.to_text(), (1,)))

    def to_json(self) -> dict:
        return {"kind": "explicit_local", "label": self.label, "places": [t for t, _ in self.polys],
                "polys": [[_num_to_json(c) for c in cs] for _, cs in self.polys]}


@dataclass(frozen=True)
class ArtinAtom:
    """Dedekind zeta of Q(zeta_d) as an Artin motive over Q."""

    d: int
    label: str = ""

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")

    @property
    def beta(self) -> int:
        return totient(self.d)

    mu = Fraction(0)

    def local(self, place: Place) -> list:
        if place.kind != "number":
            raise ValueError("Artin atoms live over Q")
        return dedekind_local_factor(self.d, place.generator)

    def to_json(self) -> dict:
        return {"kind": "artin", "d": self.d, "label": self.label}


Source = ConstantFamily | ExplicitLocal | ArtinAtom


def _num_to_json(c):
    if isinstance(c, complex):
        return [c.real, c.imag]
    if isinstance(c, float):
        return c
    return str(Fraction(c))


def num_from_json(c):
    if isinstance(c, list):
        return complex(c[0], c[1])
    if isinstance(c, float):
        return c
    return Fraction(c)


def source_from_json(data: dict) -> Source:
    kind = data["kind"]
    label = data.get("label", "")
    if kind == "constant_family":
        return ConstantFamily(int(data["q"]), tuple(num_from_json(c) for c in data["charpoly"]),
                              Fraction(data.get("mu", "0")), label)
    if kind == "explicit_local":
        return ExplicitLocal(tuple((t, tuple(num_from_json(c) for c in cs))
                                   for t, cs in zip(data["places"], data["polys"])), label)
    if kind == "artin":
        return ArtinAtom(int(data["d"]), label)
    raise ValueError(f"unknown source kind {kind!r}")


# --- data ----------------------------------------------------------------------


@dataclass(frozen=True)
class CohomDatum:
    """One parity of the cohomology: sources over F_q(t) (q given) or Q (q None)."""

    parity: str
    q: int | None
    sources: tuple = ()
    excluded_places: frozenset = frozenset()

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be even or odd, not {self.parity!r}")
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(
            self, "excluded_places",
            frozenset(p.to_text() if isinstance(p, Place) else Place.from_text(p).to_text() for p in self.excluded_places),
        )
        for src in self.sources:
            if isinstance(src, ConstantFamily) and src.q != self.q:
                raise ValueError(f"constant family over F_{src.q} in a datum over {self.base_name}")
            if isinstance(src, ArtinAtom) and self.q is not None:
                raise ValueError("Artin atoms need the base field Q")
            if isinstance(src, ExplicitLocal):
                for pl in src.places:
                    if (pl.kind == "number") != (self.q is None) or (self.q and pl.field.q != self.q):
                        raise ValueError(f"place {pl} does not belong to {self.base_name}")

    @property
    def base_name(self) -> str:
        return "Q" if self.q is None else f"F_{self.q}(t)"

    @property
    def is_function_field(self) -> bool:
        return self.q is not None

    @property
    def beta(self) -> int:
        return sum(getattr(s, "beta", 0) for s in self.sources if not isinstance(s, ExplicitLocal))

    @property
    def max_mu(self) -> Fraction:
        return max((s.mu for s in self.sources if not isinstance(s, ExplicitLocal)), default=Fraction(0))

    def with_sources(self, sources: Iterable) -> "CohomDatum":
        return CohomDatum(self.parity, self.q, tuple(sources), self.excluded_places)

    def is_excluded(self, place: Place) -> bool:
        return place.to_text() in self.excluded_places

    def to_json(self) -> dict:
        return {"parity": self.parity, "q": self.q, "sources": [s.to_json() for s in self.sources],
                "excluded_places": sorted(self.excluded_places)}

    @classmethod
    def from_json(cls, data: dict) -> "CohomDatum":
        return cls(data["parity"], data.get("q"), tuple(source_from_json(s) for s in data.get("sources", [])),
                   frozenset(data.get("excluded_places", [])))


def empty_datum(parity: str, q: int | None) -> CohomDatum:
    return CohomDatum(parity, q, ())


def zeta_source(q: int | None, label: str = "zeta") -> Source:
    """The unit motive: charpoly 1 - x over F_q(t), Q(zeta_1) over Q."""
    return ConstantFamily(q, (1, -1), 0, label) if q is not None else ArtinAtom(1, label)


def tate_twist_assemble(blocks: Sequence[WeightBlock], q: int) -> tuple[CohomDatum, CohomDatum]:
    """Weight-normalized even and odd data of a variety over F_q.

    Weight-w eigenvalues are divided by q^(w/2) (w even) or q^((w-1)/2)
    (w odd), one constant-family source per nonempty block.
    """
    even, odd = [], []
    for b in sorted(blocks, key=lambda b: b.w):
        if not b.beta:
            continue
        shift = b.w // 2
        cp = b.charpoly if b.charpoly is not None else tuple(P.from_reciprocal_roots(b.roots))
        twisted = P.scale_variable(list(cp), Fraction(1, q**shift) if P.exact(cp) else q ** (-shift))
        mu = Fraction(b.w, 2) - shift
        src = ConstantFamily(q, tuple(twisted), mu, f"w{b.w}")
        (odd if b.w % 2 else even).append(src)
    return CohomDatum(EVEN, q, tuple(even)), CohomDatum(ODD, q, tuple(odd))


def untwisted_sources(blocks: Sequence[WeightBlock], q: int, parity: str) -> list[tuple[int, ConstantFamily]]:
    """(shift, L_w source) for every block of the given parity."""
    out = []
    for b in sorted(blocks, key=lambda b: b.w):
        if b.beta and (b.w % 2 == (parity == ODD)):
            cp = b.charpoly if b.charpoly is not None else tuple(P.from_reciprocal_roots(b.roots))
            out.append((b.w // 2, ConstantFamily(q, tuple(cp), Fraction(b.w, 2), f"w{b.w}")))
    return out


def local_factor(datum: CohomDatum, place: Place) -> list:
    """det(1 - x Frob | datum) at ``place``, with x = N^-s."""
    if datum.is_excluded(place):
        raise ExcludedPlace(place.to_text())
    out: list = [1]
    for src in datum.sources:
        out = P.mul(out, src.local(place))
    return out


# --- traces ----------------------------------------------------------------------


@dataclass(frozen=True)
class TraceSequence:
    place: Place
    parity: str
    values: tuple

    def log_series(self) -> FormalPowerSeries:
        """sum_n values_n x^n / n, which should equal log(1/local_factor)."""
        n = len(self.values)
        return FormalPowerSeries((0,) + tuple(P._div(v, k) for k, v in enumerate(self.values, start=1)), n)


def trace_sequence(datum: CohomDatum, place: Place, n_max: int) -> TraceSequence:
    """Power sums of the local eigenvalues for n = 1..n_max."""
    f = local_factor(datum, place)
    vals = power_sums(f, n_max) if P.degree(f) > 0 else [0] * n_max
    return TraceSequence(place, datum.parity, tuple(vals))


def trace_bound(datum: CohomDatum, place: Place, n: int) -> float:
    """sum over sources of beta * N^(n mu)."""
    total = 0.0
    for src in datum.sources:
        if isinstance(src, ExplicitLocal):
            f = src.local(place)
            total += sum(abs(r) ** n for r in P.reciprocal_roots(f)) if P.degree(f) > 0 else 0.0
        else:
            total += src.beta * float(place.norm) ** (n * float(src.mu))
    return total


def trace_bound_violations(datum: CohomDatum, places: Iterable[Place], n_max: int,
                           rel_tol: float = 1e-12) -> list[tuple[str, int, float, float]]:
    """Every (place, n, |trace|, bound) with |trace| above the magnitude bound."""
    out = []
    for pl in places:
        if datum.is_excluded(pl):
            continue
        ts = trace_sequence(datum, pl, n_max)
        for n, v in enumerate(ts.values, start=1):
            bound = trace_bound(datum, pl, n)
            if abs(complex(v)) > bound * (1 + rel_tol) + 1e-12:
                out.append((pl.to_text(), n, abs(complex(v)), bound))
    return out


# --- places ----------------------------------------------------------------------


def places_in(datum_q: int | None, lo: int, hi: int) -> list[Place]:
    """Places with degree (function field) or prime (Q) in (lo, hi]."""
    if datum_q is None:
        return [Place.prime(p) for p in primes_up_to(hi) if p > lo]
    F = field_of_order(datum_q)
    out = []
    for d in range(lo + 1, hi + 1):
        out.extend(places_of_degree(F, d))
    return out


def _is_constant(src) -> bool:
    return isinstance(src, ConstantFamily)


def _evaluate(f: Sequence, x: complex) -> complex:
    return complex(P.evaluate([complex(c) for c in f], x))


# --- Euler products -------------------------------------------------------------------


@dataclass(frozen=True)
class LSeriesHandle:
    datum: CohomDatum
    B: int
    closed_form: RationalFunctionT | None = None

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("cutoff must be >= 1")


@dataclass
class EulerResult:
    s: complex
    B: int
    value: complex
    log_value: complex
    last_increment: float
    log_tail_bound: float
    tail_bound: float
    poles: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "s": [self.s.real, self.s.imag], "B": self.B,
            "value": [self.value.real, self.value.imag],
            "last_increment": self.last_increment, "log_tail_bound": _finite(self.log_tail_bound),
            "tail_bound": _finite(self.tail_bound), "poles": self.poles,
        }


def _finite(x: float):
    return x if math.isfinite(x) else "inf"


@dataclass
class _Slice:
    re: list[float] = field(default_factory=list)
    im: list[float] = field(default_factory=list)
    poles: list[str] = field(default_factory=list)

    def add(self, z: complex) -> None:
        self.re.append(z.real)
        self.im.append(z.imag)

    def total(self) -> complex:
        return complex(math.fsum(self.re), math.fsum(self.im))


POLE_TOL = 1e-12


def _neg_log(f: Sequence, x: complex) -> complex | None:
    """-log f(x) for f(0) = 1, accurate when f(x) is close to 1; None at a pole."""
    g = complex(P.evaluate([0] + [complex(c) for c in f[1:]], x))
    w = 1 + g
    if not cmath.isfinite(w) or abs(w) <= POLE_TOL * max(1.0, abs(g)):
        return None
    if abs(g) > 0.5:
        return -cmath.log(w)
    return -complex(0.5 * math.log1p(2 * g.real + abs(g) ** 2), math.atan2(g.imag, 1 + g.real))


def _slice_ff(datum: CohomDatum, d: int, s: complex) -> _Slice:
    """sum of -log F_v(N_v^-s) over the degree-d places."""
    q = datum.q
    out = _Slice()
    x = cmath.exp(-s * d * math.log(q))
    excluded = [Place.from_text(t) for t in sorted(datum.excluded_places)]
    n_exc = sum(1 for p in excluded if p.degree == d)
    count = count_irreducibles(q, d) - n_exc
    probe = Place("function", (0,) * d + (1,), d, q**d, field_of_order(q))
    for src in datum.sources:
        if _is_constant(src):
            z = _neg_log(src.local(probe), x)
            if z is None:
                out.poles.extend(pl.to_text() for pl in places_of_degree(field_of_order(q), d)
                                 if not datum.is_excluded(pl))
                continue
            out.add(count * z)
        else:
            for pl in src.places:
                if pl.degree != d or datum.is_excluded(pl):
                    continue
                z = _neg_log(src.local(pl), x)
                if z is None:
                    out.poles.append(pl.to_text())
                else:
                    out.add(z)
    return out


def _slice_q(datum: CohomDatum, lo: int, hi: int, s: complex) -> _Slice:
    out = _Slice()
    explicit = {}
    for src in datum.sources:
        if isinstance(src, ExplicitLocal):
            for pl in src.places:
                explicit.setdefault(pl.generator, []).append(src)
    for p in primes_up_to(hi):
        if p <= lo:
            continue
        pl = Place.prime(p)
        if datum.is_excluded(pl):
            continue
        x = cmath.exp(-s * math.log(p))
        for src in datum.sources:
            if isinstance(src, ExplicitLocal):
                continue
            z = _neg_log(src.local(pl), x)
            if z is None:
                out.poles.append(pl.to_text())
            else:
                out.add(z)
        for src in explicit.get(p, []):
            z = _neg_log(src.local(pl), x)
            if z is None:
                out.poles.append(pl.to_text())
            else:
                out.add(z)
    return out


def _slices(datum: CohomDatum, bounds: Sequence[int], s: complex, workers: int = 1) -> list[_Slice]:
    """Slices (bounds[i-1], bounds[i]] with bounds[-1] := 0, in fixed order."""
    edges = list(zip([0] + list(bounds[:-1]), bounds))

    def one(edge):
        lo, hi = edge
        if datum.is_function_field:
            parts = [_slice_ff(datum, d, s) for d in range(lo + 1, hi + 1)]
            merged = _Slice()
            for part in parts:
                merged.add(part.total())
                merged.poles.extend(part.poles)
            return merged
        return _slice_q(datum, lo, hi, s)

    if workers > 1 and len(edges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, edges))
    return [one(e) for e in edges]


def log_tail_bound(datum: CohomDatum, B: int, sigma: float) -> float:
    """Upper bound for |sum of -log F_v(N_v^-s)| over places beyond the cutoff.

    Each source contributes at most beta * sum_v -log(1 - N_v^-(sigma - mu)),
    compared with a geometric series (function field, q^d/d places of
    degree d) or with sum n^-z (Q).
    """
    total = 0.0
    for src in datum.sources:
        if isinstance(src, ExplicitLocal):
            for pl in src.places:
                if (pl.degree if datum.is_function_field else pl.norm) > B and not datum.is_excluded(pl):
                    f = src.local(pl)
                    radius = float(pl.norm) ** (-sigma)
                    total += sum(-math.log1p(-min(abs(r) * radius, 1 - 1e-16))
                                 for r in (P.reciprocal_roots(f) if P.degree(f) > 0 else []))
            continue
        beta = src.beta
        if not beta:
            continue
        z = sigma - float(src.mu)
        if z <= 1:
            return math.inf
        if datum.is_function_field:
            q = datum.q
            n = B + 1
            total += beta * q ** (n * (1 - z)) / (n * (1 - q ** (-n * z)) * (1 - q ** (1 - z)))
        else:
            total += beta * B ** (1 - z) / ((z - 1) * (1 - (B + 1) ** (-z)))
    return total


def euler_product_eval(handle: LSeriesHandle, s: complex, workers: int = 1) -> EulerResult:
    """prod over places up to the cutoff of 1/F_v(N_v^-s), with tail diagnostics."""
    s = complex(s)
    datum, B = handle.datum, handle.B
    if datum.is_function_field:
        slices = _slices(datum, list(range(1, B + 1)), s, workers)
    else:
        prev = max((p for p in primes_up_to(B) if p < B), default=0) if B >= 2 else 0
        slices = _slices(datum, [prev, B] if prev else [B], s, workers)
    poles = [p for sl in slices for p in sl.poles]
    totals = [sl.total() for sl in slices]
    log_value = complex(math.fsum(t.real for t in totals), math.fsum(t.imag for t in totals))
    value = cmath.exp(log_value) if not poles else complex(math.inf, 0)
    last = abs(totals[-1]) if totals else 0.0
    ltb = log_tail_bound(datum, B, s.real)
    tb = abs(value) * math.expm1(ltb) if math.isfinite(ltb) and not poles else math.inf
    return EulerResult(s, B, value, log_value, last, ltb, tb, poles)


def euler_series(datum: CohomDatum, B: int) -> FormalPowerSeries:
    """The truncated Euler product over F_q(t) as a power series in u = q^-s, to u^B."""
    if not datum.is_function_field:
        raise ValueError("power series in u = q^-s exist only over F_q(t)")
    logs = [0] * (B + 1)
    F = field_of_order(datum.q)
    for d in range(1, B + 1):
        places = None
        for src in datum.sources:
            if _is_constant(src):
                n_exc = sum(1 for t in datum.excluded_places if Place.from_text(t).degree == d)
                groups = [(count_irreducibles(datum.q, d) - n_exc, src.local(Place("function", (0,) * d + (1,), d, datum.q**d, F)))]
            else:
                if places is None:
                    places = set(places_of_degree(F, d))
                groups = [(1, src.local(pl)) for pl in src.places if pl.degree == d and not datum.is_excluded(pl)]
            for count, f in groups:
                if P.degree(f) <= 0 or count == 0:
                    continue
                ps = power_sums(f, B // d)
                for n, pn in enumerate(ps, start=1):
                    logs[n * d] += count * P._div(pn, n)
    return ps_exp(FormalPowerSeries(tuple(logs), B))


def closed_form(datum: CohomDatum) -> RationalFunctionT | None:
    """prod_j 1/(1 - q lambda_j u) when every source is a constant family."""
    if not datum.is_function_field or datum.excluded_places:
        return None
    if not all(_is_constant(s) for s in datum.sources):
        return None
    den: list = [1]
    for src in datum.sources:
        den = P.mul(den, P.scale_variable(list(src.charpoly), datum.q))
    if not P.exact(den):
        return None
    return RationalFunctionT((1,), tuple(den))


def closed_form_constant_family(blocks: Sequence[WeightBlock], q: int, parity: str) -> RationalFunctionT:
    even, odd = tate_twist_assemble(blocks, q)
    cf = closed_form(even if parity == EVEN else odd)
    if cf is None:
        raise ValueError("blocks need exact characteristic polynomials for a closed form")
    return cf


def closed_form_complex(datum: CohomDatum) -> tuple[list, list]:
    """(num, den) as complex polynomials in u, for data without exact charpolys."""
    den: list = [1]
    for src in datum.sources:
        if not _is_constant(src):
            raise ValueError("closed forms need constant-family sources")
        den = P.mul(den, P.scale_variable([complex(c) for c in src.charpoly], datum.q))
    return [1], den


# --- Dirichlet series -----------------------------------------------------------------


@dataclass
class DirichletCoefficients:
    """b_I for every monic I (as a coefficient tuple) or positive integer I, N(I) <= bound."""

    q: int | None
    norm_bound: int
    values: dict
    norms: dict

    def degree_sum(self, n: int):
        """Sum of b_I over monic I of degree n (function field only)."""
        return sum(v for k, v in self.values.items() if len(k) - 1 == n)

    def __getitem__(self, key):
        return self.values[key]


def _local_series(f: Sequence, order: int) -> list:
    if order <= 0:
        return [1]
    return list(FormalPowerSeries(tuple(f), order).inverse().coeffs)


def dirichlet_from_local(q: int | None, norm_bound: int, local: Callable[[Place], Sequence | None]) -> DirichletCoefficients:
    """Multiplicative expansion; ``local`` returns the place's polynomial or None to skip it."""
    if norm_bound < 1:
        raise ValueError("norm_bound must be >= 1")
    if q is None:
        values = {1: Fraction(1)}
        spf = list(range(norm_bound + 1))
        for p in primes_up_to(int(math.isqrt(norm_bound))):
            for m in range(p * p, norm_bound + 1, p):
                if spf[m] == m:
                    spf[m] = p
        series = {}
        for n in range(2, norm_bound + 1):
            p = spf[n]
            m, e = n, 0
            while m % p == 0:
                m //= p
                e += 1
            if p not in series:
                order = int(math.log(norm_bound) / math.log(p) + 1e-9)
                f = local(Place.prime(p))
                series[p] = _local_series(f, order) if f is not None else [1] + [0] * order
            values[n] = values[m] * series[p][e]
        return DirichletCoefficients(None, norm_bound, values, {n: n for n in values})
    D = 0
    while q ** (D + 1) <= norm_bound:
        D += 1
    F = field_of_order(q)
    K = gf(F)
    one = (1,)
    buckets: list[dict] = [{one: Fraction(1)}] + [{} for _ in range(D)]
    for d in range(1, D + 1):
        for pl in places_of_degree(F, d):
            f = local(pl)
            kmax = D // d
            ser = _local_series(f, kmax) if f is not None else [1] + [0] * kmax
            powers = [one]
            for _ in range(kmax):
                powers.append(fq_mul(powers[-1], pl.generator, K))
            # snapshot: entries made with this place must not be multiplied by it again
            old = [list(buckets[deg].items()) for deg in range(D - d + 1)]
            for deg, items in enumerate(old):
                for k in range(1, (D - deg) // d + 1):
                    target = buckets[deg + k * d]
                    pk, sk = powers[k], ser[k]
                    for key, val in items:
                        target[fq_mul(key, pk, K)] = val * sk
    values = {k: v for b in buckets for k, v in b.items()}
    return DirichletCoefficients(q, norm_bound, values, {k: q ** (len(k) - 1) for k in values})


def dirichlet_expand(handle: LSeriesHandle | CohomDatum, norm_bound: int) -> DirichletCoefficients:
    datum = handle.datum if isinstance(handle, LSeriesHandle) else handle

    def local(pl):
        return None if datum.is_excluded(pl) else local_factor(datum, pl)

    return dirichlet_from_local(datum.q, norm_bound, local)


# --- weight normalization ---------------------------------------------------------------


@dataclass
class WeightShiftReport:
    parity: str
    max_residual: float
    dirichlet_equal: bool
    samples: list[tuple[complex, complex, complex]]

    @property
    def passed(self) -> bool:
        return self.dirichlet_equal

    def to_json(self) -> dict:
        return {"parity": self.parity, "max_residual": self.max_residual, "dirichlet_equal": self.dirichlet_equal,
                "samples": [{"s": [s.real, s.imag], "nc": [a.real, a.imag], "classical": [b.real, b.imag]}
                            for s, a, b in self.samples]}


def verify_weight_shift(blocks: Sequence[WeightBlock], q: int, s_samples: Iterable[complex], B: int,
                        parity: str = EVEN, dirichlet: bool = True) -> WeightShiftReport:
    """Compare the normalized datum with prod_w L_w(s + shift_w).

    Values are compared at each sample with the same cutoff, and the
    Dirichlet coefficients up to norm q^B are compared exactly.
    """
    even, odd = tate_twist_assemble(blocks, q)
    nc = even if parity == EVEN else odd
    classical = untwisted_sources(blocks, q, parity)
    samples = []
    worst = 0.0
    for s in s_samples:
        s = complex(s)
        a = euler_product_eval(LSeriesHandle(nc, B), s).value
        b = complex(1)
        for shift, src in classical:
            b *= euler_product_eval(LSeriesHandle(CohomDatum(parity, q, (src,)), B), s + shift).value
        samples.append((s, a, b))
        worst = max(worst, abs(a - b))
    equal = True
    if dirichlet:
        lhs = dirichlet_expand(nc, q**B)

        def shifted(pl):
            f: list = [1]
            for shift, src in classical:
                f = P.mul(f, P.scale_variable(src.local(pl), _inverse_power(pl.norm, shift)))
            return f

        rhs = dirichlet_from_local(q, q**B, shifted)
        equal = lhs.values == rhs.values
    return WeightShiftReport(parity, worst, equal, samples)


def _inverse_power(n: int, k: int):
    return Fraction(1, n**k)


# --- convergence ------------------------------------------------------------------------


def abscissa(datum: CohomDatum) -> float:
    """Right edge of the region where the Euler product is not known to converge absolutely."""
    return 1.0 + float(datum.max_mu)


@dataclass
class ConvergenceRow:
    s: complex
    outside_region: bool
    monotone: bool
    bounded: bool
    entries: list[dict]


def convergence_scan(handle: LSeriesHandle | CohomDatum, s_grid: Sequence[complex], B_grid: Sequence[int]) -> list[ConvergenceRow]:
    """Partial products and |log increments| along an increasing cutoff grid."""
    datum = handle.datum if isinstance(handle, LSeriesHandle) else handle
    if not s_grid or not B_grid:
        raise ValueError("grids must be nonempty")
    Bs = sorted(set(int(b) for b in B_grid))
    edges = [Bs[0] - 1] + Bs if Bs[0] > 1 else Bs
    rows = []
    for s in s_grid:
        s = complex(s)
        slices = _slices(datum, edges, s)
        acc_re, acc_im = [], []
        entries = []
        offset = 1 if edges[0] != Bs[0] else 0
        for i, sl in enumerate(slices):
            t = sl.total()
            acc_re.append(t.real)
            acc_im.append(t.imag)
            if i < offset:
                continue
            B = edges[i]
            lv = complex(math.fsum(acc_re), math.fsum(acc_im))
            prev_bound = log_tail_bound(datum, edges[i - 1], s.real) if i > 0 else math.inf
            entries.append({"B": B, "value": cmath.exp(lv), "increment": abs(t),
                            "log_tail_bound": log_tail_bound(datum, B, s.real),
                            "bounded": abs(t) <= prev_bound, "poles": list(sl.poles)})
        incs = [e["increment"] for e in entries]
        monotone = all(b < a for a, b in zip(incs, incs[1:]))
        rows.append(ConvergenceRow(s, s.real <= abscissa(datum), monotone,
                                   all(e["bounded"] for e in entries), entries))
    return rows
