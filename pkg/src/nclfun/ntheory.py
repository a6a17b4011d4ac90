"""Small elementary number theory helpers (integers only)."""

from __future__ import annotations

from functools import lru_cache
from math import gcd, isqrt

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    # deterministic Miller-Rabin for n < 3.3e24
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if a % n == 0 or x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(bound: int) -> list[int]:
    """Sieve of Eratosthenes, returned in increasing order."""
    if bound < 2:
        return []
    sieve = np.ones(bound + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def factorint(n: int) -> dict[int, int]:
    if n < 1:
        raise ValueError("factorint needs a positive integer")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorint(n).items():
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    f = factorint(n)
    if any(k > 1 for k in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n: int) -> int:
    out = n
    for p in factorint(n):
        out = out // p * (p - 1)
    return out


def multiplicative_order(a: int, n: int) -> int:
    """Order of ``a`` in (Z/n)^*; the order of anything mod 1 is 1."""
    if n == 1:
        return 1
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit modulo {n}")
    order = totient(n)
    for p in factorint(order):
        while order % p == 0 and pow(a, order // p, n) == 1:
            order //= p
    return order


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p**e, or raise."""
    f = factorint(q)
    if q < 2 or len(f) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, e),) = f.items()
    return p, e
