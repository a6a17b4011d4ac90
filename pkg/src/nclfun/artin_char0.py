"""Cyclotomic fields over Q: prime splitting and Dedekind zeta Euler factors."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .ntheory import is_prime, multiplicative_order, primes_up_to, totient, valuation


@dataclass(frozen=True)
class CyclotomicField:
    """Q(zeta_d)."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")

    @property
    def degree(self) -> int:
        return totient(self.d)


@lru_cache(maxsize=4096)
def cyclotomic_splitting(d: int, p: int) -> tuple[int, ...]:
    """Residue degrees of the primes of Q(zeta_d) above p."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    dp = d // p ** valuation(d, p)
    f = multiplicative_order(p, dp) if dp > 1 else 1
    return (f,) * (totient(dp) // f)


def dedekind_local_factor(field: CyclotomicField | int, p: int) -> list[int]:
    """prod_i (1 - x^{f_i}); the Euler factor of zeta_{Q(zeta_d)} at p is its inverse."""
    d = field.d if isinstance(field, CyclotomicField) else int(field)
    out = [1]
    for f in cyclotomic_splitting(d, p):
        nxt = out + [0] * f
        for i, c in enumerate(out):
            nxt[i + f] -= c
        out = nxt
    return out


@lru_cache(maxsize=256)
def cyclotomic_polynomial(d: int) -> tuple[int, ...]:
    """Phi_d with integer coefficients, lowest degree first."""
    if d < 1:
        raise ValueError("d must be >= 1")
    num = [-1] + [0] * (d - 1) + [1]  # x^d - 1
    for k in range(1, d):
        if d % k == 0:
            num = _exact_div(num, cyclotomic_polynomial(k))
    return tuple(num)


def _exact_div(a: list[int], b: tuple[int, ...]) -> list[int]:
    # b is monic
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1]
        out[i] = c
        for j, y in enumerate(b):
            a[i + j] -= c * y
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact cyclotomic division")  # pragma: no cover
    return out


def zeta_q_partial(s: complex, prime_bound: int) -> complex:
    """prod_{p <= bound} (1 - p^-s)^-1, summing logs with math.fsum."""
    re, im = [], []
    for p in primes_up_to(prime_bound):
        z = -cmath.log(1 - cmath.exp(-s * math.log(p)))
        re.append(z.real)
        im.append(z.imag)
    return cmath.exp(complex(math.fsum(re), math.fsum(im)))
