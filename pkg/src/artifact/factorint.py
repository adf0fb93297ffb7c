"""Integer factorization utilities: deterministic Miller-Rabin, Brent's rho,
prime sieves, and batched small-prime stripping for census workloads."""
from __future__ import annotations

import math
import random
from functools import lru_cache

import numpy as np

# Bases giving a deterministic Miller-Rabin test for all n < 2^64.
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_PROBABLE_ROUNDS = 64
_TRIAL_BOUND = 10_000


def sieve_primes(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (empty for n < 2)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p:: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def smallest_prime_factors(n: int) -> np.ndarray:
    """spf[k] = smallest prime factor of k, for 0 <= k <= n (spf[0]=spf[1]=0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    spf[2::2] = 2
    for p in range(3, math.isqrt(n) + 1, 2):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    rem = np.flatnonzero(spf[2:] == 0) + 2
    spf[rem] = rem
    return spf


@lru_cache(maxsize=1)
def _trial_primes() -> tuple[int, ...]:
    return tuple(int(p) for p in sieve_primes(_TRIAL_BOUND))


def _miller_rabin(n: int, bases) -> bool:
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Primality: deterministic below 2^64, 64-round probabilistic above."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    if n < 2**64:
        return _miller_rabin(n, _MR_BASES_64)
    rng = random.Random(n)
    return _miller_rabin(n, [rng.randrange(2, n - 1) for _ in range(_PROBABLE_ROUNDS)])


def _brent_rho(n: int) -> int:
    """A nontrivial factor of composite n (Brent's cycle-finding variant)."""
    if n % 2 == 0:
        return 2
    rng = random.Random(n)
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}. factorize(1) == {}."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out: dict[int, int] = {}
    for p in _trial_primes():
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _brent_rho(m)
        stack.extend((d, m // d))
    return dict(sorted(out.items()))


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n))


def big_omega(n: int) -> int:
    """Number of prime factors with multiplicity."""
    return sum(factorize(n).values())


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def batch_strip_small(values: list[int], bound: int = _TRIAL_BOUND):
    """Strip prime factors <= bound from each value using vectorized division.

    Returns (factor_dicts, residuals): per-value {small prime: exponent} and the
    remaining cofactor (1 if fully factored). Values must fit in int64.
    """
    vals = np.asarray(values, dtype=np.int64)
    facs: list[dict[int, int]] = [{} for _ in values]
    primes = sieve_primes(bound)
    for p in primes:
        p = int(p)
        div = vals % p == 0
        while div.any():
            idxs = np.flatnonzero(div)
            for i in idxs:
                facs[int(i)][p] = facs[int(i)].get(p, 0) + 1
            vals[idxs] //= p
            div[idxs] = vals[idxs] % p == 0
    return facs, [int(v) for v in vals]
