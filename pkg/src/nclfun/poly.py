"""Dense univariate polynomials over Q (``Fraction``) or C (``complex``).

A polynomial is a list of coefficients, lowest degree first, with no trailing
zeros; the zero polynomial is ``[]``. Functions never mutate their inputs.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Number
from typing import Sequence

import numpy as np

Poly = list


def is_exact(c) -> bool:
    return isinstance(c, (int, Fraction))


def exact(poly: Sequence) -> bool:
    return all(is_exact(c) for c in poly)


def trim(poly: Sequence) -> Poly:
    out = list(poly)
    while out and out[-1] == 0:
        out.pop()
    return out


def as_fractions(poly: Sequence) -> Poly:
    return trim(Fraction(c) for c in poly)


def degree(poly: Sequence) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(trim(poly)) - 1


def add(a: Sequence, b: Sequence) -> Poly:
    n = max(len(a), len(b))
    return trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def sub(a: Sequence, b: Sequence) -> Poly:
    return add(a, [-c for c in b])


def scale(a: Sequence, c) -> Poly:
    return trim(x * c for x in a)


def mul(a: Sequence, b: Sequence) -> Poly:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def mul_trunc(a: Sequence, b: Sequence, n: int) -> Poly:
    """Product of a and b modulo x**(n+1), padded to length n+1."""
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: n + 1 - i]):
            out[i + j] += x * y
    return out


def power(a: Sequence, k: int) -> Poly:
    out: Poly = [1]
    base = list(a)
    while k:
        if k & 1:
            out = mul(out, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return out


def _div(x, y):
    if is_exact(x) and is_exact(y):
        return Fraction(x) / Fraction(y)
    return x / y


def divmod_poly(a: Sequence, b: Sequence) -> tuple[Poly, Poly]:
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = trim(a)
    if len(rem) < len(b):
        return [], rem
    quo = [0] * (len(rem) - len(b) + 1)
    lead = b[-1]
    while len(rem) >= len(b) and rem:
        shift = len(rem) - len(b)
        c = _div(rem[-1], lead)
        quo[shift] = c
        for i, y in enumerate(b):
            rem[shift + i] -= c * y
        rem.pop()
        rem = trim(rem)
    return trim(quo), rem


def monic(a: Sequence) -> Poly:
    a = trim(a)
    return [_div(c, a[-1]) for c in a]


def gcd(a: Sequence, b: Sequence) -> Poly:
    """Monic gcd over Q (exact inputs only)."""
    a, b = as_fractions(a), as_fractions(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a) if a else []


def derivative(a: Sequence) -> Poly:
    return trim(i * c for i, c in enumerate(a) if i > 0)


def evaluate(a: Sequence, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def scale_variable(a: Sequence, c) -> Poly:
    """Return a(c*x)."""
    out = []
    f = 1
    for coef in a:
        out.append(coef * f)
        f *= c
    return trim(out)


def reverse(a: Sequence, deg: int | None = None) -> Poly:
    """x**deg * a(1/x)."""
    a = trim(a)
    deg = len(a) - 1 if deg is None else deg
    padded = list(a) + [0] * (deg + 1 - len(a))
    return trim(padded[::-1])


def from_reciprocal_roots(roots: Sequence) -> Poly:
    """prod (1 - r x)."""
    out: Poly = [1]
    for r in roots:
        out = mul(out, [1, -r])
    return out


def squarefree_decomposition(a: Sequence) -> list[tuple[Poly, int]]:
    """Yun's algorithm over Q: a = const * prod f_i**i with squarefree coprime f_i."""
    a = as_fractions(a)
    if len(a) <= 1:
        return []
    out = []
    b = gcd(a, derivative(a))
    c = divmod_poly(a, b)[0]
    d = sub(divmod_poly(derivative(a), b)[0], derivative(c))
    i = 1
    while degree(c) > 0:
        g = gcd(c, d)
        if degree(g) > 0:
            out.append((g, i))
        c = divmod_poly(c, g)[0]
        d = sub(divmod_poly(d, g)[0], derivative(c))
        i += 1
    return out


def _polish(coeffs: Sequence, z: complex, steps: int = 3) -> complex:
    dc = derivative(coeffs)
    for _ in range(steps):
        fz = evaluate(coeffs, z)
        dz = evaluate(dc, z)
        if dz == 0:
            break
        step = complex(fz) / complex(dz)
        if not cmath.isfinite(step):
            break
        z -= step
    return z


def roots(a: Sequence) -> list[complex]:
    """Complex roots with multiplicity.

    Exact inputs are split into squarefree parts first so repeated roots are
    found to full double precision; every root gets a few Newton steps.
    """
    a = trim(a)
    if len(a) <= 1:
        return []
    if exact(a):
        out: list[complex] = []
        for factor, mult in squarefree_decomposition(a):
            fc = [complex(c) for c in factor]
            for z in np.roots(fc[::-1]):
                out.extend([_polish(factor, complex(z))] * mult)
        return out
    ac = [complex(c) for c in a]
    return [_polish(ac, complex(z)) for z in np.roots(ac[::-1])]


def reciprocal_roots(a: Sequence) -> list[complex]:
    """The r with a(x) = a(0) * prod (1 - r x); a(0) must be nonzero."""
    a = trim(a)
    if not a or a[0] == 0:
        raise ValueError("reciprocal roots need a nonzero constant term")
    return roots(reverse(a))


def to_complex(a: Sequence) -> Poly:
    return [complex(c) for c in a]


def max_abs_diff(a: Sequence, b: Sequence):
    d = sub(a, b)
    if not d:
        return 0
    return max(abs(c) for c in d)


def format_poly(a: Sequence, var: str = "x") -> str:
    a = trim(a)
    if not a:
        return "0"
    terms = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if isinstance(c, Number) and not isinstance(c, complex):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            body = str(mag) if (mag != 1 or not mon) else ""
            terms.append((sign, f"{body}{'*' if body and mon else ''}{mon}"))
        else:
            terms.append(("+", f"({c}){'*' if mon else ''}{mon}"))
    first_sign, first = terms[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        text += f" {sign} {body}"
    return text
