"""Finite fields F_q, polynomials over F_q and places of F_q(t) and Q.

Elements of F_q with q = p**e are encoded as integers 0 <= a < q whose base-p
digits are the coefficients of a polynomial in the generator modulo the
field's defining polynomial. Prime-field elements are their own residues.

``GF`` carries exp/log tables so that arithmetic vectorizes over numpy
arrays; the counting kernels rely on this.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .ntheory import divisors, factorint, is_prime, mobius

FqPoly = tuple  # coefficients low-to-high, no trailing zeros; () is zero


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    modulus: tuple[int, ...]  # monic, degree e, over F_p, low-to-high

    @property
    def q(self) -> int:
        return self.p**self.e

    def __str__(self) -> str:
        return f"F_{self.q}" if self.e == 1 else f"F_{self.p}^{self.e}"


# --- prime-field polynomial helpers (used to build fields) -----------------


def _trim(a: Iterable[int]) -> tuple[int, ...]:
    out = list(a)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> tuple[int, ...]:
    rem = list(a)
    inv_lead = pow(m[-1], -1, p)
    while len(rem) >= len(m):
        c = rem[-1] * inv_lead % p
        shift = len(rem) - len(m)
        if c:
            for i, y in enumerate(m):
                rem[shift + i] = (rem[shift + i] - c * y) % p
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return _trim(rem)


def _ppowmod(a: Sequence[int], k: int, m: Sequence[int], p: int) -> tuple[int, ...]:
    out: tuple[int, ...] = (1,)
    base = _pmod(a, m, p)
    while k:
        if k & 1:
            out = _pmod(_pmul(out, base, p), m, p)
        k >>= 1
        if k:
            base = _pmod(_pmul(base, base, p), m, p)
    return out


def _digits(n: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        n, r = divmod(n, p)
        out.append(r)
    return out


def _from_digits(d: Sequence[int], p: int) -> int:
    n = 0
    for c in reversed(d):
        n = n * p + c
    return n


# --- field construction ----------------------------------------------------


def _monics(q: int, d: int) -> Iterable[tuple[int, ...]]:
    """Monic degree-d tuples over {0..q-1} in increasing integer encoding."""
    for n in range(q**d):
        yield tuple(_digits(n, q, d)) + (1,)


@lru_cache(maxsize=None)
def _prime_field(p: int) -> FieldSpec:
    return FieldSpec(p, 1, (0, 1))


@lru_cache(maxsize=None)
def make_field(p: int, e: int = 1) -> FieldSpec:
    """F_{p^e} defined by the lexicographically smallest monic irreducible."""
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not isinstance(e, int) or e < 1:
        raise ValueError(f"extension degree must be >= 1, got {e}")
    if e == 1:
        return _prime_field(p)
    base = _prime_field(p)
    for cand in _monics(p, e):
        if is_irreducible(cand, base):
            return FieldSpec(p, e, cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def field_of_order(q: int) -> FieldSpec:
    f = factorint(q)
    if q < 2 or len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, e),) = f.items()
    return make_field(p, e)


class GF:
    """Arithmetic tables for one finite field.

    Scalar methods take and return ints; ``v*`` methods take numpy int64
    arrays. Build through :func:`gf` so tables are shared.
    """

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        self.p, self.e, self.q = spec.p, spec.e, spec.q
        self.order = self.q - 1
        self.generator = self._find_generator()
        self.exp, self.log = self._tables()
        self._exp_list: list[int] | None = None
        self._log_list: list[int] | None = None
        self._pows = self.p ** np.arange(self.e, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GF({self.spec})"

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        primes = list(factorint(self.order))
        mod = self.spec.modulus
        for g in range(2 if self.e == 1 else self.p, self.q):
            poly = _trim(_digits(g, self.p, self.e))
            if all(_ppowmod(poly, self.order // r, mod, self.p) != (1,) for r in primes):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _mul_matrix(self, h: Sequence[int]) -> np.ndarray:
        p, e, mod = self.p, self.e, self.spec.modulus
        cols = []
        for j in range(e):
            prod = _pmod(_pmul(h, (0,) * j + (1,), p), mod, p)
            cols.append(list(prod) + [0] * (e - len(prod)))
        return np.array(cols, dtype=np.int64).T

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        p, e, n = self.p, self.e, self.order
        digits = np.zeros((n, e), dtype=np.int64)
        digits[0, 0] = 1
        filled = 1
        gpow = _trim(_digits(self.generator, p, e))
        while filled < n:
            take = min(filled, n - filled)
            m = self._mul_matrix(gpow)
            digits[filled : filled + take] = (digits[:take] @ m.T) % p
            filled += take
            if filled < n:
                gpow = _pmod(_pmul(gpow, gpow, p), self.spec.modulus, p)
        exp = digits @ (p ** np.arange(e, dtype=np.int64))
        log = np.full(self.q, -1, dtype=np.int64)
        log[exp] = np.arange(n, dtype=np.int64)
        if (log[1:] < 0).any():
            raise AssertionError("generator is not primitive")  # pragma: no cover
        return exp, log

    # scalar arithmetic ----------------------------------------------------
    def _lists(self):
        if self._exp_list is None:
            self._exp_list = self.exp.tolist()
            self._log_list = self.log.tolist()
        return self._exp_list, self._log_list

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return _from_digits(
            [(x + y) % self.p for x, y in zip(_digits(a, self.p, self.e), _digits(b, self.p, self.e))], self.p
        )

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return _from_digits([(-x) % self.p for x in _digits(a, self.p, self.e)], self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        exp, log = self._lists()
        return exp[(log[a] + log[b]) % self.order]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.e == 1:
            return pow(a, -1, self.p)
        exp, log = self._lists()
        return exp[(-log[a]) % self.order]

    def pow(self, a: int, k: int) -> int:
        if k == 0:
            return 1
        if a == 0:
            if k < 0:
                raise ZeroDivisionError("inverse of zero in finite field")
            return 0
        if self.e == 1:
            return pow(a, k, self.p)
        exp, log = self._lists()
        return exp[(log[a] * k) % self.order]

    # vectorized arithmetic ------------------------------------------------
    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for pw in self._pows.tolist():
            out += ((a // pw + b // pw) % self.p) * pw
        return out

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.e == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        out = np.zeros_like(a)
        for pw in self._pows.tolist():
            out += ((-(a // pw)) % self.p) * pw
        return out

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.e == 1:
            return (a * b) % self.p
        out = self.exp[(self.log[a] + self.log[b]) % self.order]
        return np.where((a == 0) | (b == 0), 0, out)

    def vpow(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        out = self.exp[(self.log[a] * k) % self.order]
        return np.where(a == 0, 0, out)

    def vfrobenius(self, a, times: int = 1):
        """x -> x**(p**times) elementwise."""
        return self.vpow(a, pow(self.p, times, self.order) if self.order > 1 else 1)

    def chi(self, a):
        """Quadratic character (odd characteristic), vectorized."""
        if self.p == 2:
            raise ValueError("quadratic character needs odd characteristic")
        a = np.asarray(a, dtype=np.int64)
        sign = 1 - 2 * (self.log[a] & 1)
        return np.where(a == 0, 0, sign)

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def vpoly_eval(self, coeffs: Sequence[int], x):
        """Horner evaluation of a polynomial with coefficients in this field."""
        x = np.asarray(x, dtype=np.int64)
        acc = np.zeros_like(x)
        for c in reversed(list(coeffs)):
            acc = self.vadd(self.vmul(acc, x), c)
        return acc


@lru_cache(maxsize=32)
def gf(spec: FieldSpec) -> GF:
    return GF(spec)


@lru_cache(maxsize=64)
def embedding(small: FieldSpec, big: FieldSpec) -> np.ndarray:
    """Array mapping elements of ``small`` to elements of ``big``.

    The generator of ``small`` goes to the smallest root of its modulus in
    ``big``, so the choice is deterministic.
    """
    if small.p != big.p or big.e % small.e:
        raise ValueError(f"{small} is not a subfield of {big}")
    if small.e == 1:
        return np.arange(small.p, dtype=np.int64)
    K = gf(big)
    vals = K.vpoly_eval(small.modulus, K.elements())
    root = int(np.flatnonzero(vals == 0)[0])
    powers = [1]
    for _ in range(small.e - 1):
        powers.append(K.mul(powers[-1], root))
    out = np.zeros(small.q, dtype=np.int64)
    idx = np.arange(small.q, dtype=np.int64)
    for i, beta in enumerate(powers):
        digit = (idx // small.p**i) % small.p
        out = K.vadd(out, K.vmul(digit, beta))
    return out


def extension(field: FieldSpec, m: int) -> FieldSpec:
    """The degree-m extension F_{q^m}, built over the prime field."""
    return make_field(field.p, field.e * m)


# --- polynomials over F_q ---------------------------------------------------


def fq_trim(a: Iterable[int]) -> FqPoly:
    return _trim(a)


def fq_degree(a: FqPoly) -> int:
    return len(a) - 1


def fq_add(a: FqPoly, b: FqPoly, F: GF) -> FqPoly:
    n = max(len(a), len(b))
    return _trim(F.add(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n))


def fq_sub(a: FqPoly, b: FqPoly, F: GF) -> FqPoly:
    return fq_add(a, tuple(F.neg(c) for c in b), F)


def fq_mul(a: FqPoly, b: FqPoly, F: GF) -> FqPoly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return _trim(out)


def fq_scale(a: FqPoly, c: int, F: GF) -> FqPoly:
    return _trim(F.mul(x, c) for x in a)


def fq_divmod(a: FqPoly, b: FqPoly, F: GF) -> tuple[FqPoly, FqPoly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    quo = [0] * max(len(a) - len(b) + 1, 0)
    inv_lead = F.inv(b[-1])
    while len(rem) >= len(b):
        c = F.mul(rem[-1], inv_lead)
        shift = len(rem) - len(b)
        quo[shift] = c
        if c:
            for i, y in enumerate(b):
                rem[shift + i] = F.sub(rem[shift + i], F.mul(c, y))
        rem.pop()
        while rem and rem[-1] == 0:
            rem.pop()
    return _trim(quo), _trim(rem)


def fq_eval(a: FqPoly, x: int, F: GF) -> int:
    acc = 0
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def fq_valuation(a: FqPoly, prime: FqPoly, F: GF) -> int:
    """Exponent of ``prime`` in ``a``; raises for the zero polynomial."""
    if not a:
        raise ValueError("valuation of the zero polynomial")
    v = 0
    while True:
        quo, rem = fq_divmod(a, prime, F)
        if rem:
            return v
        a, v = quo, v + 1


def fq_monic(a: FqPoly, F: GF) -> FqPoly:
    return fq_scale(a, F.inv(a[-1]), F) if a else a


def fq_gcd(a: FqPoly, b: FqPoly, F: GF) -> FqPoly:
    """Monic gcd."""
    while b:
        a, b = b, fq_divmod(a, b, F)[1]
    return fq_monic(a, F)


def fq_powmod(a: FqPoly, k: int, m: FqPoly, F: GF) -> FqPoly:
    out: FqPoly = (1,)
    base = fq_divmod(a, m, F)[1]
    while k:
        if k & 1:
            out = fq_divmod(fq_mul(out, base, F), m, F)[1]
        k >>= 1
        if k:
            base = fq_divmod(fq_mul(base, base, F), m, F)[1]
    return out


def _equal_degree_split(g: FqPoly, d: int, F: GF, rng) -> list[FqPoly]:
    """Cantor-Zassenhaus: g is a product of distinct monic irreducibles of degree d."""
    if len(g) - 1 == d:
        return [g]
    n = len(g) - 1
    while True:
        a = _trim([rng.randrange(F.q) for _ in range(n)])
        if len(a) < 2:
            continue
        if F.p == 2:
            k = F.spec.e * d
            acc, cur = a, a
            for _ in range(k - 1):
                cur = fq_divmod(fq_mul(cur, cur, F), g, F)[1]
                acc = fq_add(acc, cur, F)
            h = fq_gcd(g, acc, F)
        else:
            h = fq_gcd(g, fq_sub(fq_powmod(a, (F.q**d - 1) // 2, g, F), (1,), F), F)
        if 0 < len(h) - 1 < n:
            return _equal_degree_split(h, d, F, rng) + _equal_degree_split(fq_divmod(g, h, F)[0], d, F, rng)


def fq_factor(f: FqPoly, F: GF) -> list[tuple[FqPoly, int]]:
    """Monic irreducible factors with multiplicity, sorted by place order.

    Distinct-degree splitting by gcd with t^(q^d) - t, then Cantor-Zassenhaus
    with a fixed seed so the result is deterministic.
    """
    f = fq_monic(_trim(f), F)
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    rng = random.Random(0)
    out = []
    d = 1
    t = (0, 1)
    while len(f) - 1 >= 2 * d:
        xq = fq_powmod(t, F.q**d, f, F)
        g = fq_gcd(f, fq_sub(xq, t, F), F)
        if len(g) > 1:
            for pi in _equal_degree_split(g, d, F, rng):
                v = fq_valuation(f, pi, F)
                out.append((pi, v))
                for _ in range(v):
                    f = fq_divmod(f, pi, F)[0]
        d += 1
    if len(f) > 1:
        out.append((f, 1))
    out.sort(key=lambda fv: (len(fv[0]), poly_key(fv[0], F.q)))
    return out


def poly_key(a: FqPoly, q: int) -> int:
    """Integer encoding; sorting by it orders by degree, then lexicographically."""
    n = 0
    for c in reversed(a):
        n = n * q + c
    return n


# --- irreducibility and places ---------------------------------------------


@lru_cache(maxsize=None)
def _trial_pool(field: FieldSpec, d: int) -> tuple[FqPoly, ...]:
    """Monic irreducibles of exact degree d, found by trial division."""
    if d == 1:
        return tuple((a, 1) for a in range(field.q))
    return tuple(f for f in _monics(field.q, d) if _trial_irreducible(f, field))


def _trial_irreducible(f: FqPoly, field: FieldSpec) -> bool:
    F = gf(field)
    n = len(f) - 1
    if n == 1:
        return True
    if f[0] == 0:
        return False
    for d in range(1, n // 2 + 1):
        for g in _trial_pool(field, d):
            if not fq_divmod(f, g, F)[1]:
                return False
    return True


def is_irreducible(f: Sequence[int], field: FieldSpec) -> bool:
    """Trial division by all monic irreducibles of degree <= deg(f)/2."""
    f = _trim(f)
    if len(f) < 2:
        raise ValueError("irreducibility test needs degree >= 1")
    if f[-1] != 1:
        raise ValueError("irreducibility test needs a monic polynomial")
    if any(not 0 <= c < field.q for c in f):
        raise ValueError(f"coefficients must be elements of {field}")
    return _trial_irreducible(f, field)


def count_irreducibles(q: int, d: int) -> int:
    """Number of monic irreducibles of degree d over F_q (necklace formula)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    total = sum(mobius(d // k) * q**k for k in divisors(d))
    return total // d


@dataclass(frozen=True)
class Place:
    """A finite place of F_q(t) (monic irreducible) or of Q (a prime)."""

    kind: str  # "function" | "number"
    generator: tuple[int, ...] | int
    degree: int
    norm: int
    field: FieldSpec | None = None

    @classmethod
    def function(cls, field: FieldSpec, poly: Sequence[int]) -> "Place":
        poly = _trim(poly)
        return cls("function", poly, len(poly) - 1, field.q ** (len(poly) - 1), field)

    @classmethod
    def prime(cls, p: int) -> "Place":
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        return cls("number", p, 1, p, None)

    def to_text(self) -> str:
        if self.kind == "number":
            return f"p={self.generator}"
        f = self.field
        return f"q={f.p}^{f.e};poly=" + ",".join(str(c) for c in self.generator)

    @classmethod
    def from_text(cls, text: str) -> "Place":
        text = text.strip()
        if text.startswith("p="):
            return cls.prime(int(text[2:]))
        try:
            head, poly = text.split(";")
            p, e = head.removeprefix("q=").split("^")
            coeffs = [int(c) for c in poly.removeprefix("poly=").split(",")]
        except ValueError as exc:
            raise ValueError(f"malformed place: {text!r}") from exc
        return cls.function(make_field(int(p), int(e)), coeffs)

    def sort_key(self):
        if self.kind == "number":
            return (self.norm,)
        return (self.degree, poly_key(self.generator, self.field.q))

    def __str__(self) -> str:
        return self.to_text()


@lru_cache(maxsize=None)
def _degree_slice(field: FieldSpec, d: int) -> tuple[tuple[FqPoly, ...], tuple[int, ...]]:
    """Monic irreducibles of degree d and one root of each in F_{q^d}.

    Places correspond to Frobenius orbits of size d in F_{q^d}; each minimal
    polynomial is assembled from its orbit.
    """
    q = field.q
    if d == 1:
        big = field
        polys = tuple((gf(field).neg(a), 1) for a in range(q))
        order = sorted(range(q), key=lambda i: poly_key(polys[i], q))
        return tuple(polys[i] for i in order), tuple(order)
    big = extension(field, d)
    K = gf(big)
    x = K.elements()
    frob = lambda a, k: K.vpow(a, pow(q, k, K.order))  # noqa: E731
    mask = np.ones(K.q, dtype=bool)
    for dd in divisors(d):
        if dd < d:
            mask &= frob(x, dd) != x
    cand = x[mask]
    orbit = [cand]
    for i in range(1, d):
        orbit.append(frob(cand, i))
    orbit_arr = np.stack(orbit)
    reps_all = orbit_arr.min(axis=0)
    reps = np.unique(reps_all)
    # minimal polynomials, vectorized across orbits
    roots = [frob(reps, i) for i in range(d)]
    coeffs = [np.ones_like(reps)]
    for r in roots:
        nr = K.vneg(r)
        new = [K.vmul(coeffs[0], nr)]
        for j in range(1, len(coeffs)):
            new.append(K.vadd(coeffs[j - 1], K.vmul(coeffs[j], nr)))
        new.append(coeffs[-1])
        coeffs = new
    emb = embedding(field, big)
    back = np.full(K.q, -1, dtype=np.int64)
    back[emb] = np.arange(q, dtype=np.int64)
    mat = np.stack([back[c] for c in coeffs], axis=1)
    if (mat < 0).any():
        raise AssertionError("minimal polynomial not defined over the base field")  # pragma: no cover
    polys = [tuple(int(c) for c in row) for row in mat]
    order = sorted(range(len(polys)), key=lambda i: poly_key(polys[i], q))
    return tuple(polys[i] for i in order), tuple(int(reps[i]) for i in order)


def enumerate_places(field: FieldSpec, max_degree: int) -> list[Place]:
    """All finite places of F_q(t) of degree <= max_degree, sorted."""
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    out = []
    for d in range(1, max_degree + 1):
        out.extend(Place.function(field, f) for f in _degree_slice(field, d)[0])
    return out


def places_of_degree(field: FieldSpec, d: int) -> list[Place]:
    return [Place.function(field, f) for f in _degree_slice(field, d)[0]]


def place_root(place: Place) -> tuple[FieldSpec, int]:
    """A root of the place's generator inside F_{q^d}, as (field, element)."""
    field = place.field
    big = field if place.degree == 1 else extension(field, place.degree)
    return big, _root_index(field, place.degree)[place.generator]


@lru_cache(maxsize=None)
def _root_index(field: FieldSpec, d: int) -> dict[FqPoly, int]:
    polys, roots = _degree_slice(field, d)
    return dict(zip(polys, roots))


def monic_polys(field: FieldSpec, d: int) -> Iterable[FqPoly]:
    return (tuple(c) + (1,) for c in itertools.product(range(field.q), repeat=d))
