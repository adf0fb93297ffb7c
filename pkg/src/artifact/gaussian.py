"""Exact arithmetic in Z[i]: primary normalization, prime splitting via
Cornacchia, Euclidean gcd, and square-free ideals with d, Phi and Mobius."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .factorint import is_prime, sieve_primes


@dataclass(frozen=True)
class GaussInt:
    """Gaussian integer re + im*i with arbitrary-precision components."""

    re: int
    im: int

    def __add__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussInt":
        return GaussInt(-self.re, -self.im)

    def __pow__(self, k: int) -> "GaussInt":
        if k < 0:
            raise ValueError("negative powers are not Gaussian integers")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I_UNIT = GaussInt(0, 1)
UNITS = (ONE, I_UNIT, GaussInt(-1, 0), GaussInt(0, -1))
RAMIFIED = GaussInt(1, 1)
TWO_I_PLUS_2 = GaussInt(2, 2)


def _rounded_div(num: int, den: int) -> int:
    """Nearest integer to num/den, ties toward +infinity."""
    return (2 * num + den) // (2 * den)


def gauss_divmod(a: GaussInt, b: GaussInt) -> tuple[GaussInt, GaussInt]:
    """Euclidean division a = q*b + r with norm(r) <= norm(b)/2."""
    if b.is_zero():
        raise ZeroDivisionError("division by zero Gaussian integer")
    nb = b.norm()
    t = a * b.conjugate()
    q = GaussInt(_rounded_div(t.re, nb), _rounded_div(t.im, nb))
    return q, a - q * b


def gauss_divides(a: GaussInt, b: GaussInt) -> bool:
    """True when a divides b exactly."""
    _, r = gauss_divmod(b, a)
    return r.is_zero()


def exact_div(a: GaussInt, b: GaussInt) -> GaussInt:
    q, r = gauss_divmod(a, b)
    if not r.is_zero():
        raise ValueError(f"{a} is not divisible by {b}")
    return q


def canonical_associate(z: GaussInt) -> GaussInt:
    """The unique associate with re > 0 and im >= 0; units map to 1, 0 to 0."""
    if z.is_zero():
        return z
    if z.is_unit():
        return ONE
    for u in UNITS:
        w = z * u
        if w.re > 0 and w.im >= 0:
            return w
    raise AssertionError("unreachable: one associate is always canonical")


def primary_associate(z: GaussInt) -> GaussInt:
    """The unique unit multiple congruent to 1 modulo 2(1+i)."""
    if z.norm() % 2 == 0:
        raise ValueError("no primary associate")
    for u in UNITS:
        w = z * u
        if gauss_divides(TWO_I_PLUS_2, w - ONE):
            return w
    raise AssertionError("unreachable: odd-norm elements have a primary associate")


def is_primary(z: GaussInt) -> bool:
    return z.norm() % 2 == 1 and gauss_divides(TWO_I_PLUS_2, z - ONE)


def _sqrt_minus_one_mod_p(p: int) -> int:
    """A square root of -1 modulo a prime p = 1 (mod 4), via Tonelli-Shanks
    on the cyclic group: x = a^((p-1)/4) for a quadratic non-residue a."""
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) == p - 1:
            x = pow(a, (p - 1) // 4, p)
            if x * x % p == p - 1:
                return x
    raise AssertionError(f"no sqrt(-1) found mod {p}")


def _cornacchia_two_squares(p: int) -> tuple[int, int]:
    """(a, b) with a^2 + b^2 = p for a prime p = 1 (mod 4)."""
    x = _sqrt_minus_one_mod_p(p)
    r0, r1 = p, x
    while r1 * r1 > p:
        r0, r1 = r1, r0 % r1
    a = r1
    b2 = p - a * a
    b = math.isqrt(b2)
    if a * a + b * b != p:
        raise AssertionError(f"Cornacchia failed for {p}")
    return (a, b) if a >= b else (b, a)


def split_prime(p: int) -> GaussInt:
    """Primary pi with norm(pi) = p, for a rational prime p = 1 (mod 4)."""
    if p % 4 != 1 or not is_prime(p):
        raise ValueError("prime does not split")
    a, b = _cornacchia_two_squares(p)
    return primary_associate(GaussInt(a, b))


def split_prime_search(p: int) -> GaussInt:
    """Test oracle: exhaustive search for the primary norm-p element."""
    if p % 4 != 1 or not is_prime(p):
        raise ValueError("prime does not split")
    for a in range(1, math.isqrt(p) + 1):
        b2 = p - a * a
        b = math.isqrt(b2)
        if b * b == b2:
            return primary_associate(GaussInt(a, b))
    raise AssertionError(f"{p} is not a sum of two squares")


def gauss_gcd(a: GaussInt, b: GaussInt) -> GaussInt:
    """Greatest common divisor, returned as the canonical associate."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero():
        _, r = gauss_divmod(a, b)
        a, b = b, r
    return canonical_associate(a)


def enumerate_primary_primes(x: int) -> Iterator[tuple[int, GaussInt]]:
    """(p, pi_p) for every prime p = 1 (mod 4) with p <= x, in increasing p."""
    for p in sieve_primes(int(x)):
        p = int(p)
        if p % 4 == 1:
            yield p, split_prime(p)


# ---------------------------------------------------------------------------
# Square-free ideals

RAMIFIED_TAG = "ramified"
SPLIT_TAG = "split"
SPLIT_CONJ_TAG = "split-conjugate"
INERT_TAG = "inert"
_TAGS = (RAMIFIED_TAG, SPLIT_TAG, SPLIT_CONJ_TAG, INERT_TAG)


@dataclass(frozen=True)
class SquareFreeIdeal:
    """Square-free ideal of Z[i] as a product of distinct prime ideals,
    each stored as (tag, generator)."""

    factors: tuple[tuple[str, GaussInt], ...]

    def __post_init__(self) -> None:
        seen = set()
        for tag, gen in self.factors:
            if tag not in _TAGS:
                raise ValueError(f"unknown prime-ideal tag {tag!r}")
            key = canonical_associate(gen)
            key = (key.re, key.im)
            if key in seen:
                raise ValueError("ideal is not square-free")
            seen.add(key)

    @staticmethod
    def unit_ideal() -> "SquareFreeIdeal":
        return SquareFreeIdeal(())

    def norm(self) -> int:
        out = 1
        for _, gen in self.factors:
            out *= gen.norm()
        return out

    def generator(self) -> GaussInt:
        out = ONE
        for _, gen in self.factors:
            out = out * gen
        return canonical_associate(out)


def ideal_from_primes(parts) -> SquareFreeIdeal:
    """Build a SquareFreeIdeal from (tag, generator) pairs or from bare
    Gaussian-prime generators (tags are then derived by classification)."""
    normalized = []
    for item in parts:
        if isinstance(item, GaussInt):
            normalized.append((classify_gauss_prime(item), item))
        else:
            tag, gen = item
            normalized.append((tag, gen))
    return SquareFreeIdeal(tuple(normalized))


def classify_gauss_prime(gen: GaussInt) -> str:
    """Tag for a Gaussian prime: ramified, split, split-conjugate or inert.

    Split primes above p are tagged "split" when the primary associate has
    positive imaginary part and "split-conjugate" otherwise (a fixed
    convention so that conjugate ideals receive distinct tags)."""
    n = gen.norm()
    if n == 2:
        return RAMIFIED_TAG
    if is_prime(n):
        return SPLIT_TAG if primary_associate(gen).im > 0 else SPLIT_CONJ_TAG
    root = math.isqrt(n)
    if root * root == n and is_prime(root) and root % 4 == 3:
        return INERT_TAG
    raise ValueError(f"{gen} is not a Gaussian prime")


def ideal_d(a: SquareFreeIdeal) -> int:
    """d(a): the positive generator of the ideal's intersection with Z."""
    rational = 1
    seen: set[int] = set()
    for tag, gen in a.factors:
        if tag == RAMIFIED_TAG:
            q = 2
        elif tag == INERT_TAG:
            q = math.isqrt(gen.norm())
        else:
            q = gen.norm()
        if q not in seen:
            seen.add(q)
            rational *= q
    return rational


def ideal_phi(a: SquareFreeIdeal) -> int:
    """Generalized Euler function: product of N(prime) - 1 over the factors."""
    out = 1
    for _, gen in a.factors:
        out *= gen.norm() - 1
    return out


def ideal_mobius(a: SquareFreeIdeal) -> int:
    """Mobius value (-1)^(number of prime factors) for a square-free ideal."""
    return -1 if len(a.factors) % 2 else 1
