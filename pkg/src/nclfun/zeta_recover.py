"""Zeta functions from point counts.

Exact truncated power series (log/exp), rational reconstruction of
Z(X, T) = exp(sum N_m T^m / m), and the split of the reciprocal roots into
weight blocks |alpha| = q^(w/2) with a per-root purity audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import poly as P


class ReconstructionError(ValueError):
    """No rational function of the requested shape matches the series."""


class AmbiguousWeight(ValueError):
    """A reciprocal root is not close to any q^(w/2) of the right parity."""


# --- formal power series ------------------------------------------------------


def _over(c, n: int):
    return Fraction(c) / n if P.is_exact(c) else c / n


@dataclass(frozen=True)
class FormalPowerSeries:
    """c_0 + c_1 T + ... + c_B T^B + O(T^(B+1))."""

    coeffs: tuple
    order: int

    def __post_init__(self):
        cs = tuple(self.coeffs[: self.order + 1])
        cs = cs + (0,) * (self.order + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def from_poly(cls, poly: Sequence, order: int) -> "FormalPowerSeries":
        return cls(tuple(poly), order)

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __mul__(self, other: "FormalPowerSeries") -> "FormalPowerSeries":
        order = min(self.order, other.order)
        return FormalPowerSeries(tuple(P.mul_trunc(self.coeffs, other.coeffs, order)), order)

    def inverse(self) -> "FormalPowerSeries":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        out = [_over(1, 1) / c0 if P.is_exact(c0) else 1 / c0]
        for n in range(1, self.order + 1):
            acc = sum(self.coeffs[k] * out[n - k] for k in range(1, n + 1))
            out.append(-acc / c0 if not P.is_exact(acc) or not P.is_exact(c0) else -Fraction(acc) / c0)
        return FormalPowerSeries(tuple(out), self.order)

    def truncate(self, order: int) -> "FormalPowerSeries":
        return FormalPowerSeries(self.coeffs, min(order, self.order))


def ps_log(f: FormalPowerSeries) -> FormalPowerSeries:
    """log f for f(0) = 1, via (log f)' = f'/f."""
    if f.coeffs[0] != 1:
        raise ValueError("ps_log needs constant term 1")
    B = f.order
    a = f.coeffs
    g = [0] * (B + 1)  # g = log f
    # n g_n = n a_n - sum_{k=1}^{n-1} k g_k a_{n-k}
    for n in range(1, B + 1):
        acc = n * a[n] - sum(k * g[k] * a[n - k] for k in range(1, n))
        g[n] = _over(acc, n)
    return FormalPowerSeries(tuple(g), B)


def ps_exp(f: FormalPowerSeries) -> FormalPowerSeries:
    """exp f for f(0) = 0, via g' = f' g."""
    if f.coeffs[0] != 0:
        raise ValueError("ps_exp needs constant term 0")
    B = f.order
    a = f.coeffs
    g = [Fraction(1) if P.exact(a) else 1.0 + 0j] + [0] * B
    for n in range(1, B + 1):
        acc = sum(k * a[k] * g[n - k] for k in range(1, n + 1))
        g[n] = _over(acc, n)
    return FormalPowerSeries(tuple(g), B)


def power_sums(charpoly: Sequence, count: int) -> list:
    """p_k = sum lambda^k for k = 1..count, where charpoly = prod (1 - lambda x)."""
    series = FormalPowerSeries(tuple(charpoly), count)
    lg = ps_log(series) if charpoly and charpoly[0] == 1 else None
    if lg is None:
        raise ValueError("characteristic polynomial must have constant term 1")
    # log prod(1 - l x) = -sum p_k x^k / k
    return [-k * lg.coeffs[k] for k in range(1, count + 1)]


def from_power_sums(sums: Sequence, degree: int) -> list:
    """prod (1 - lambda x) of degree ``degree`` from p_1..p_degree."""
    f = FormalPowerSeries((0,) + tuple(-_over(s, k) for k, s in enumerate(sums[:degree], start=1)), degree)
    return P.trim(ps_exp(f).coeffs)


def power_map(charpoly: Sequence, d: int) -> list:
    """prod (1 - lambda^d x) from prod (1 - lambda x)."""
    n = P.degree(charpoly)
    if d == 1 or n <= 0:
        return P.trim(charpoly) if n > 0 else [1]
    sums = power_sums(charpoly, n * d)
    return from_power_sums(sums[d - 1 :: d], n)


def zeta_from_counts(counts: Sequence[int] | "object") -> FormalPowerSeries:
    """exp(sum_{m<=B} N_m T^m / m) to order B."""
    counts = tuple(getattr(counts, "counts", counts))
    if not counts:
        raise ValueError("need at least one count")
    B = len(counts)
    return ps_exp(FormalPowerSeries((0,) + tuple(Fraction(n, m) for m, n in enumerate(counts, start=1)), B))


# --- rational functions in T ----------------------------------------------------


@dataclass(frozen=True)
class RationalFunctionT:
    """num/den in lowest terms with den(0) = 1 (exact rational coefficients)."""

    num: tuple
    den: tuple

    def __post_init__(self):
        num, den = P.as_fractions(self.num), P.as_fractions(self.den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = P.gcd(num, den) if num else [1]
        if P.degree(g) > 0:
            num = P.divmod_poly(num, g)[0]
            den = P.divmod_poly(den, g)[0]
        c = den[0]
        if c == 0:
            raise ValueError("denominator must not vanish at T = 0")
        object.__setattr__(self, "num", tuple(P.scale(num, 1 / c)))
        object.__setattr__(self, "den", tuple(P.scale(den, 1 / c)))

    @classmethod
    def from_polys(cls, num: Sequence, den: Sequence = (1,)) -> "RationalFunctionT":
        return cls(tuple(num), tuple(den))

    def series(self, order: int) -> FormalPowerSeries:
        return FormalPowerSeries(tuple(self.num), order) * FormalPowerSeries(tuple(self.den), order).inverse()

    def __mul__(self, other: "RationalFunctionT") -> "RationalFunctionT":
        return RationalFunctionT(tuple(P.mul(self.num, other.num)), tuple(P.mul(self.den, other.den)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunctionT):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def evaluate(self, u: complex) -> complex:
        return complex(P.evaluate(self.num, u)) / complex(P.evaluate(self.den, u))

    @property
    def total_degree(self) -> int:
        return max(P.degree(self.num), 0) + max(P.degree(self.den), 0)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.num + self.den)

    def __str__(self) -> str:
        return f"({P.format_poly(self.num, 'T')}) / ({P.format_poly(self.den, 'T')})"


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """One solution of an (over/under)determined linear system, or None."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in m):
        return None
    sol = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = m[i][-1]
    return sol


def pade(series: FormalPowerSeries, a: int, b: int) -> RationalFunctionT | None:
    """N/D with deg N <= a, deg D <= b, D(0) = 1 and N/D = series to its order."""
    B = series.order
    s = [Fraction(c) for c in series.coeffs]
    if a + b > B:
        raise ValueError(f"type ({a},{b}) needs order >= {a + b}, have {B}")
    # D = 1 + d_1 T + ... ; coefficients a+1..B of D*S vanish
    rows, rhs = [], []
    for k in range(a + 1, B + 1):
        rows.append([s[k - j] if k - j >= 0 else Fraction(0) for j in range(1, b + 1)])
        rhs.append(-s[k])
    if b:
        sol = _solve_exact(rows, rhs)
        if sol is None:
            return None
    else:
        if any(s[k] != 0 for k in range(a + 1, B + 1)):
            return None
        sol = []
    den = [Fraction(1)] + sol
    num = P.mul_trunc(den, s, a)
    cand = RationalFunctionT(tuple(num), tuple(den))
    if cand.series(B).coeffs != tuple(s):
        return None
    return cand


def rational_reconstruct(series: FormalPowerSeries, max_total_degree: int) -> RationalFunctionT:
    """The unique rational function of total degree <= D matching the series.

    Shapes are tried by increasing total degree; uniqueness needs the
    series order to be at least 2D + 1.
    """
    D = max_total_degree
    if series.order < 2 * D + 1:
        raise ValueError(f"order {series.order} too small for total degree {D}; need {2 * D + 1}")
    for total in range(D + 1):
        for b in range(total + 1):
            cand = pade(series, total - b, b)
            if cand is not None:
                return cand
    raise ReconstructionError(f"no rational function of total degree <= {D} matches the series")


def reconstruct_zeta(counts: Sequence[int], q: int, betti: Sequence[int]) -> RationalFunctionT:
    """Z(X, T) for a geometrically connected smooth projective X with known Betti numbers.

    The weight-0 and top-weight factors 1 - T and 1 - q^n T are known, so
    only sum(betti) - 2 further coefficients must come from the counts.
    """
    counts = tuple(getattr(counts, "counts", counts))
    dim2 = len(betti) - 1
    if dim2 % 2 or betti[0] != 1 or betti[-1] != 1:
        raise ValueError("Betti numbers must run over weights 0..2n with b_0 = b_2n = 1")
    top = q ** (dim2 // 2)
    a = sum(b for w, b in enumerate(betti) if w % 2)
    b = sum(bb for w, bb in enumerate(betti) if w % 2 == 0) - (2 if dim2 else 1)
    known_den = P.mul([1, -1], [1, -top]) if dim2 else [1, -1]
    need = a + b
    if len(counts) < max(need, 1):
        raise ReconstructionError(f"need {need} counts, have {len(counts)}")
    z = zeta_from_counts(counts)
    rest = z * FormalPowerSeries(tuple(known_den), z.order)
    cand = pade(rest, a, b)
    if cand is None or P.degree(cand.num) > a or P.degree(cand.den) > b:
        raise ReconstructionError("counts are inconsistent with the declared Betti numbers")
    return RationalFunctionT(cand.num, tuple(P.mul(cand.den, known_den)))


def hypersurface_betti(n: int, d: int) -> list[int]:
    """Betti numbers of a smooth degree-d hypersurface in P^n (n >= 2)."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    dim = n - 1
    prim = ((d - 1) ** (n + 1) + (-1) ** (n + 1) * (d - 1)) // d
    out = [1 if w % 2 == 0 else 0 for w in range(2 * dim + 1)]
    out[dim] = prim + (1 if dim % 2 == 0 else 0)
    return out


# --- weight blocks --------------------------------------------------------------


@dataclass(frozen=True)
class WeightBlock:
    """Frobenius reciprocal roots on weight-w cohomology."""

    w: int
    roots: tuple[complex, ...]
    charpoly: tuple | None = None  # exact prod (1 - alpha T), when known

    @property
    def beta(self) -> int:
        return len(self.roots)

    def to_json(self) -> dict:
        out = {"w": self.w, "beta": self.beta, "roots": [[z.real, z.imag] for z in self.roots]}
        if self.charpoly is not None:
            out["charpoly"] = [str(c) for c in self.charpoly]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "WeightBlock":
        charpoly = tuple(Fraction(c) for c in data["charpoly"]) if "charpoly" in data else None
        if "roots" in data:
            roots = tuple(complex(r[0], r[1]) for r in data["roots"])
        elif charpoly is not None:
            roots = tuple(P.reciprocal_roots(charpoly))
        else:
            raise ValueError("weight block needs roots or charpoly")
        return cls(int(data["w"]), roots, charpoly)

    @classmethod
    def from_charpoly(cls, w: int, charpoly: Sequence) -> "WeightBlock":
        cp = tuple(P.as_fractions(charpoly))
        return cls(w, tuple(P.reciprocal_roots(cp)) if len(cp) > 1 else (), cp)


def _exact_factor(roots: Sequence[complex], whole: Sequence[Fraction]) -> tuple | None:
    approx = P.from_reciprocal_roots(roots)
    guess = []
    for c in approx:
        r = round(complex(c).real)
        if abs(complex(c) - r) > 1e-6 * max(1.0, abs(r)):
            return None
        guess.append(Fraction(r))
    guess = P.trim(guess)
    if P.divmod_poly(whole, guess)[1]:
        return None
    return tuple(guess)


def weight_split(z: RationalFunctionT, q: int, tol: float = 1e-6) -> list[WeightBlock]:
    """Cluster reciprocal roots of num (odd weights) and den (even weights)."""
    logq = math.log(q)
    groups: dict[int, list[complex]] = {}
    for source, parity in ((z.num, 1), (z.den, 0)):
        for alpha in (P.reciprocal_roots(source) if P.degree(source) > 0 else []):
            mag = abs(alpha)
            if mag == 0:
                raise AmbiguousWeight("zero reciprocal root")
            w = round(2 * math.log(mag) / logq)
            target = q ** (w / 2)
            if w < 0 or abs(mag - target) > tol * target:
                raise AmbiguousWeight(f"|{alpha:.6g}| = {mag:.6g} is not within {tol} of any q^(w/2)")
            if w % 2 != parity:
                where = "numerator" if parity else "denominator"
                raise AmbiguousWeight(f"weight {w} root in the {where}: unsupported zeta shape")
            groups.setdefault(w, []).append(alpha)
    blocks = []
    for w in sorted(groups):
        roots = sorted(groups[w], key=lambda c: (round(c.real, 9), round(c.imag, 9)))
        whole = z.num if w % 2 else z.den
        blocks.append(WeightBlock(w, tuple(roots), _exact_factor(roots, whole)))
    return blocks


@dataclass
class RHReport:
    passed: bool
    max_deviation: float
    tol: float
    deviations: list[tuple[int, complex, float]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "max_deviation": self.max_deviation,
            "tol": self.tol,
            "roots": [{"w": w, "re": z.real, "im": z.imag, "deviation": d} for w, z, d in self.deviations],
        }


def local_rh_check(blocks: Iterable[WeightBlock], q: int, tol: float = 1e-6) -> RHReport:
    """Relative deviation of every |alpha| from q^(w/2)."""
    devs = []
    for b in blocks:
        target = q ** (b.w / 2)
        for z in b.roots:
            devs.append((b.w, z, abs(abs(z) - target) / target))
    worst = max((d for _, _, d in devs), default=0.0)
    return RHReport(worst <= tol, worst, tol, devs)


def betti_sums(blocks: Iterable[WeightBlock]) -> tuple[int, int]:
    """(sum of even-weight betas, sum of odd-weight betas)."""
    even = odd = 0
    for b in blocks:
        if b.w % 2:
            odd += b.beta
        else:
            even += b.beta
    return even, odd
