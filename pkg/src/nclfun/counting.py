"""Brute-force point counts over finite fields and their extensions.

Projective points are enumerated through normalized representatives (first
nonzero coordinate equal to 1) in fixed-size blocks, and polynomial values
are computed with the vectorized tables of :class:`nclfun.field_arith.GF`.
Every count is an exact integer, so splitting the scan across worker threads
cannot change the result.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import SCHEMA_VERSION
from .field_arith import FieldSpec, GF, embedding, extension, gf, make_field

DEFAULT_BUDGET = 10**8
CHUNK = 1 << 18


class BudgetExceeded(RuntimeError):
    """A count would need more point evaluations than the configured cap."""


@dataclass(frozen=True)
class CountVector:
    q: int
    counts: tuple[int, ...]  # N_1..N_B

    def __post_init__(self):
        if any(n < 0 for n in self.counts):
            raise ValueError("point counts are non-negative")

    @property
    def B(self) -> int:
        return len(self.counts)


Term = tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class HypersurfaceSpec:
    """A hypersurface in P^n over F_q given by a homogeneous polynomial.

    ``terms`` holds (coefficient, exponent vector) pairs with coefficients
    encoded as elements of ``field``; exponent vectors have length n + 1.
    """

    field: FieldSpec
    n: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        terms = tuple((c, tuple(k)) for c, k in self.terms if c != 0)
        if not terms:
            raise ValueError("hypersurface polynomial must be nonzero")
        if any(len(k) != self.n + 1 for _, k in terms):
            raise ValueError(f"exponent vectors must have length {self.n + 1}")
        if len({sum(k) for _, k in terms}) != 1:
            raise ValueError("polynomial is not homogeneous")
        if any(not 0 <= c < self.field.q for c, _ in terms):
            raise ValueError(f"coefficients must be elements of {self.field}")
        merged: dict[tuple[int, ...], int] = {}
        F = gf(self.field)
        for c, k in terms:
            merged[k] = F.add(merged.get(k, 0), c)
        object.__setattr__(self, "terms", tuple(sorted((c, k) for k, c in merged.items() if c)))

    @property
    def degree(self) -> int:
        return sum(self.terms[0][1])

    @classmethod
    def parse(cls, field: FieldSpec, n: int, text: str) -> "HypersurfaceSpec":
        """Parse e.g. ``"x^3 + y^3 + 2*z^3"`` (integer coefficients mod p)."""
        return cls(field, n, tuple(parse_polynomial(text, n, field.p)))

    def canonical(self) -> dict:
        return {
            "kind": "hypersurface",
            "p": self.field.p,
            "e": self.field.e,
            "n": self.n,
            "terms": [[c, list(k)] for c, k in self.terms],
        }


_VARS = "xyzwuv"
_TERM = re.compile(r"^(\d*)\*?((?:[a-z]\d*(?:\^\d+)?\*?)*)$")


def parse_polynomial(text: str, n: int, p: int) -> list[Term]:
    names = {ch: i for i, ch in enumerate(_VARS[: n + 1])} if n < len(_VARS) else {}
    for i in range(n + 1):
        names[f"x{i}"] = i
    src = text.replace(" ", "").replace("-", "+-")
    out: list[Term] = []
    for raw in filter(None, src.split("+")):
        sign = -1 if raw.startswith("-") else 1
        raw = raw.lstrip("-")
        m = _TERM.match(raw)
        if not m:
            raise ValueError(f"cannot parse term {raw!r}")
        coef = int(m.group(1)) if m.group(1) else 1
        exps = [0] * (n + 1)
        for var, power in re.findall(r"([a-z]\d*)(?:\^(\d+))?", m.group(2)):
            if var not in names:
                raise ValueError(f"unknown variable {var!r} for P^{n}")
            exps[names[var]] += int(power) if power else 1
        out.append(((sign * coef) % p, tuple(exps)))
    if not out:
        raise ValueError("empty polynomial")
    return out


def count_projective_space(q: int, n: int, m: int = 1) -> int:
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    Q = q**m
    return (Q ** (n + 1) - 1) // (Q - 1)


def _projective_blocks(K: GF, n: int) -> Iterator[list[np.ndarray]]:
    """Coordinate arrays for all normalized points of P^n(K), in blocks."""
    Q = K.q
    for lead in range(n + 1):
        free = n - lead
        total = Q**free
        for start in range(0, total, CHUNK):
            idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
            cols = [np.zeros_like(idx) for _ in range(lead)] + [np.ones_like(idx)]
            rest = idx
            for _ in range(free):
                cols.append(rest % Q)
                rest = rest // Q
            yield cols


def _eval_terms(K: GF, terms: Sequence[Term], cols: Sequence[np.ndarray]) -> np.ndarray:
    powers: dict[tuple[int, int], np.ndarray] = {}
    acc = np.zeros_like(cols[0])
    for c, k in terms:
        mono = np.full_like(cols[0], c)
        for j, kj in enumerate(k):
            if kj:
                key = (j, kj)
                if key not in powers:
                    powers[key] = K.vpow(cols[j], kj)
                mono = K.vmul(mono, powers[key])
        acc = K.vadd(acc, mono)
    return acc


def _embed_terms(terms: Sequence[Term], emb: np.ndarray) -> list[Term]:
    return [(int(emb[c]), k) for c, k in terms]


def _common_zeros(field: FieldSpec, n: int, systems: Sequence[Sequence[Term]], m: int,
                  budget: int, workers: int = 1) -> int:
    total = count_projective_space(field.q, n, m)
    if total > budget:
        raise BudgetExceeded(f"{total} points in P^{n}(F_{field.q}^{m}) exceed budget {budget}")
    big = extension(field, m)
    K = gf(big)
    emb = embedding(field, big)
    embedded = [_embed_terms(t, emb) for t in systems]

    def block_count(cols):
        mask = np.ones(cols[0].shape, dtype=bool)
        for terms in embedded:
            if not terms:
                continue
            mask &= _eval_terms(K, terms, cols) == 0
        return int(mask.sum())

    blocks = _projective_blocks(K, n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(block_count, blocks))
    return sum(block_count(cols) for cols in blocks)


def count_hypersurface(spec: HypersurfaceSpec, m: int = 1, budget: int = DEFAULT_BUDGET,
                       workers: int = 1) -> int:
    """#X(F_{q^m}) for the hypersurface X, by exhaustive projective scan."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _common_zeros(spec.field, spec.n, [spec.terms], m, budget, workers)


def partial_derivative(spec: HypersurfaceSpec, j: int) -> list[Term]:
    F = gf(spec.field)
    out = []
    for c, k in spec.terms:
        if k[j] % spec.field.p:
            kk = list(k)
            kk[j] -= 1
            out.append((F.mul(c, k[j] % spec.field.p), tuple(kk)))
    return out


def smoothness_probe(spec: HypersurfaceSpec, max_ext: int = 1, budget: int = DEFAULT_BUDGET) -> bool:
    """No common zero of F and its partials over F_{q^m} for m <= max_ext.

    A partial certificate only: singular points defined over larger
    extensions are not seen.
    """
    if max_ext < 1:
        raise ValueError("max_ext must be >= 1")
    systems = [spec.terms] + [partial_derivative(spec, j) for j in range(spec.n + 1)]
    return all(_common_zeros(spec.field, spec.n, systems, m, budget) == 0 for m in range(1, max_ext + 1))


def count_weierstrass_points(a: Sequence[int], field: FieldSpec, include_singular: bool = True,
                             m: int = 1, budget: int = DEFAULT_BUDGET) -> int:
    """Projective points of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.

    ``a`` is (a1, a2, a3, a4, a6) over ``field``; counts are over the
    degree-m extension. With ``include_singular=False`` singular points are
    skipped (the point at infinity is always nonsingular).
    """
    if len(a) != 5:
        raise ValueError("expected (a1, a2, a3, a4, a6)")
    big = extension(field, m)
    K = gf(big)
    Q = K.q
    if Q * Q > budget:
        raise BudgetExceeded(f"{Q * Q} affine pairs exceed budget {budget}")
    emb = embedding(field, big)
    a1, a2, a3, a4, a6 = (int(emb[c % field.q]) for c in a)
    ys = K.elements()
    count = 1  # point at infinity
    two, three = 2 % K.p, 3 % K.p
    for x in range(Q):
        xv = np.full_like(ys, x)
        x2 = K.vmul(xv, xv)
        rhs = K.vadd(K.vadd(K.vmul(x2, xv), K.vmul(x2, a2)), K.vadd(K.vmul(xv, a4), a6))
        lhs = K.vadd(K.vmul(ys, ys), K.vmul(ys, K.vadd(K.vmul(xv, a1), a3)))
        on = K.vsub(lhs, rhs) == 0
        if not include_singular:
            fx = K.vsub(K.vmul(ys, a1), K.vadd(K.vadd(K.vmul(x2, three), K.vmul(xv, K.mul(two, a2))), a4))
            fy = K.vadd(K.vadd(K.vmul(ys, two), K.vmul(xv, a1)), a3)
            on &= ~((fx == 0) & (fy == 0))
        count += int(on.sum())
    return count


def hypersurface_counts(spec: HypersurfaceSpec, B: int, budget: int = DEFAULT_BUDGET,
                        workers: int = 1) -> CountVector:
    return CountVector(spec.field.q, tuple(count_hypersurface(spec, m, budget, workers) for m in range(1, B + 1)))


def weierstrass_counts(a: Sequence[int], field: FieldSpec, B: int, budget: int = DEFAULT_BUDGET) -> CountVector:
    return CountVector(field.q, tuple(count_weierstrass_points(a, field, True, m, budget) for m in range(1, B + 1)))


# --- persistent count cache --------------------------------------------------


def variety_hash(canonical: dict) -> str:
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class CountCache:
    """Versioned JSON files, one per variety, replaced atomically."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def _path(self, key: str) -> Path:
        return self.directory / f"counts-{key[:32]}.json"

    def get(self, canonical: dict, B: int | None = None) -> CountVector | None:
        """The first B cached counts (all of them when B is None), or None on a miss."""
        key = variety_hash(canonical)
        path = self._path(key)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if data.get("schema_version") != SCHEMA_VERSION or data.get("variety_hash") != key:
            return None
        counts = data["counts"]
        if B is None:
            B = len(counts)
        if len(counts) < B:
            return None
        return CountVector(data["field"]["q"], tuple(counts[:B]))

    def put(self, canonical: dict, vector: CountVector) -> Path:
        key = variety_hash(canonical)
        existing = self.get(canonical)
        if existing is not None and existing.B > vector.B:
            return self._path(key)
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "field": {"p": canonical.get("p"), "e": canonical.get("e", 1), "q": vector.q},
            "variety_hash": key,
            "variety": canonical,
            "counts": list(vector.counts),
        }
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        path = self._path(key)
        os.replace(tmp, path)
        return path


def fermat(field: FieldSpec, n: int, d: int) -> HypersurfaceSpec:
    """x_0^d + ... + x_n^d."""
    return HypersurfaceSpec(field, n, tuple((1, tuple(d if i == j else 0 for i in range(n + 1))) for j in range(n + 1)))

