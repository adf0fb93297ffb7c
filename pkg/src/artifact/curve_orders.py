"""Frobenius data and exact orders/group structures of E(F_{p^n}) for the
curve y^2 = x^3 - x (conductor 32), with brute-force cross-validation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .factorint import factorize, is_prime
from .gaussian import ONE, GaussInt, split_prime

BAD_PRIMES = frozenset({2})
BRUTE_FORCE_BOUND = 10**8


@dataclass(frozen=True)
class FrobeniusData:
    """Frobenius trace data at an odd prime of good reduction."""

    p: int
    a_p: int
    pi: GaussInt | None  # None marks the supersingular case (p = 3 mod 4)

    @property
    def supersingular(self) -> bool:
        return self.pi is None


def frobenius(p: int) -> FrobeniusData:
    """Frobenius data for y^2 = x^3 - x at an odd prime p."""
    if p in BAD_PRIMES:
        raise ValueError("bad reduction")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p % 4 == 1:
        pi = split_prime(p)
        return FrobeniusData(p, 2 * pi.re, pi)
    return FrobeniusData(p, 0, None)


def _supersingular_trace(p: int, n: int) -> int:
    """pi^n + conj(pi)^n for pi = i*sqrt(p), by the integer recurrence
    t_n = -p * t_{n-2} with t_0 = 2, t_1 = 0."""
    if n % 2 == 1:
        return 0
    k = n // 2
    return 2 * (-p) ** k


def order_pn(p: int, n: int) -> int:
    """|E(F_{p^n})| = N(pi^n - 1), exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    fr = frobenius(p)
    if fr.supersingular:
        return p**n + 1 - _supersingular_trace(p, n)
    z = fr.pi**n - ONE
    return z.norm()


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(d: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the d-th cyclotomic polynomial."""
    # x^d - 1 divided exactly by the product of Phi_e for proper divisors e.
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            den = list(_cyclotomic_coeffs(e))
            out = [0] * (len(num) - len(den) + 1)
            rem = list(num)
            for k in range(len(out) - 1, -1, -1):
                c = rem[k + len(den) - 1] // den[-1]
                out[k] = c
                for j, dc in enumerate(den):
                    rem[k + j] -= c * dc
            assert all(v == 0 for v in rem), f"non-exact division for Phi_{d}"
            num = out
    return tuple(num)


def cyclotomic_factor(p: int, d: int) -> int:
    """N(Phi_d(pi_p)) for split p; over d | n these multiply to order_pn(p, n)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    fr = frobenius(p)
    if fr.supersingular:
        raise ValueError("split primes only")
    acc = GaussInt(0, 0)
    for coeff in reversed(_cyclotomic_coeffs(d)):
        acc = acc * fr.pi + GaussInt(coeff, 0)
    return acc.norm()


# ---------------------------------------------------------------------------
# Brute-force point counting

def _legendre_table(p: int) -> np.ndarray:
    """tab[v] = 1 + chi(v) = number of square roots of v in F_p (0, 1 or 2)."""
    y = np.arange(p, dtype=np.int64)
    return np.bincount((y * y) % p, minlength=p).astype(np.int64)


def _nonresidue(p: int) -> int:
    for r in range(2, p):
        if pow(r, (p - 1) // 2, p) == p - 1:
            return r
    raise AssertionError(f"no quadratic non-residue mod {p}")


def _count_fp(p: int) -> int:
    roots = _legendre_table(p)
    x = np.arange(p, dtype=np.int64)
    v = (x * x % p * x - x) % p
    return int(roots[v].sum()) + 1


def _count_fp2(p: int) -> int:
    """|E(F_{p^2})| by summing the quadratic character of x^3 - x over F_{p^2}.

    F_{p^2} = F_p[u]/(u^2 - r) with r a non-residue; chi_{p^2}(z) equals
    chi_p(norm(z)) where norm(a + bu) = a^2 - r b^2. Conjugate points x and
    x^p contribute equally, so only b <= (p-1)/2 is scanned."""
    r = _nonresidue(p)
    roots = _legendre_table(p)  # roots[v] - 1 = chi(v) for v != 0
    chi = roots - 1
    chi[0] = 0

    a = np.arange(p, dtype=np.int64)
    a2 = a * a % p
    a3 = a2 * a % p

    # b = 0 row: x in F_p, chi_{p^2}(v) = chi(v^2) = 1 unless v = 0.
    total = p - 3  # v = x^3 - x vanishes at x in {0, 1, -1}

    for b in range(1, (p - 1) // 2 + 1):
        b2 = b * b % p
        k1 = (3 * r % p) * b2 % p
        c = (a3 + (k1 - 1) * a) % p
        d = b * ((3 * a2 + r * b2 % p - 1) % p) % p
        val = (c * c - r * (d * d % p)) % p
        total += 2 * int(chi[val].sum())
    return p * p + 1 + total


def brute_force_count(p: int, n: int = 1) -> int:
    """Point count of y^2 = x^3 - x over F_{p^n} by direct enumeration."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if p**n > BRUTE_FORCE_BOUND:
        raise ValueError("bound exceeded")
    if p == 2:
        raise ValueError("bad reduction")
    return _count_fp(p) if n == 1 else _count_fp2(p)


# ---------------------------------------------------------------------------
# Group structure via full enumeration + torsion counting

def _gather_matches(order: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Concatenate order[lo[k]:hi[k]] over all k, fully vectorized."""
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.repeat(lo, counts)
    ends = np.cumsum(counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(ends - counts, counts)
    return order[starts + offsets]


def _enumerate_points_fp(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Affine points (x, y) of the curve over F_p as parallel arrays."""
    x = np.arange(p, dtype=np.int64)
    v = (x * x % p * x - x) % p
    y = np.arange(p, dtype=np.int64)
    sq = (y * y) % p
    order = np.argsort(sq, kind="stable").astype(np.int64)
    sq_sorted = sq[order]
    lo = np.searchsorted(sq_sorted, v, side="left")
    hi = np.searchsorted(sq_sorted, v, side="right")
    xs = np.repeat(x, hi - lo)
    ys = _gather_matches(order, lo, hi)
    return xs, ys


class _Fp2:
    """Vectorized arithmetic in F_p[u]/(u^2 - r), elements as (a, b) arrays."""

    def __init__(self, p: int):
        self.p = p
        self.r = _nonresidue(p)

    def mul(self, x, y):
        p, r = self.p, self.r
        a, b = x
        c, d = y
        return ((a * c + r * (b * d % p)) % p, (a * d + b * c) % p)

    def square(self, x):
        return self.mul(x, x)

    def scalar(self, k, x):
        p = self.p
        return ((k % p) * x[0] % p, (k % p) * x[1] % p)

    def add(self, x, y):
        return ((x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p)

    def sub(self, x, y):
        return ((x[0] - y[0]) % self.p, (x[1] - y[1]) % self.p)

    def is_zero(self, x):
        return (x[0] == 0) & (x[1] == 0)


def _enumerate_points_fp2(p: int) -> tuple:
    """Affine points over F_{p^2} as ((xa, xb), (ya, yb)) arrays."""
    F = _Fp2(p)
    r = F.r
    # int32 suffices while every product of two reduced residues plus one
    # more reduced factor stays below 2^31 (true for p <= 3200, the cap on
    # this enumeration); it halves memory traffic on the hot arrays.
    dtype = np.int32 if p <= 3200 else np.int64
    # Tabulate squares in F_{p^2}: (ya + yb*u)^2 = (ya^2 + r*yb^2, 2*ya*yb).
    grid = np.arange(p, dtype=dtype)
    ya = np.repeat(grid, p)
    yb = np.tile(grid, p)
    s_a = (ya * ya + r * (yb * yb % p)) % p
    s_b = 2 * ya * yb % p
    skey = s_a * p + s_b
    del s_a, s_b

    xa, xb = ya, yb
    x2 = F.square((xa, xb))
    x3 = F.mul(x2, (xa, xb))
    del x2
    v = F.sub(x3, (xa, xb))
    del x3
    vkey = v[0] * p + v[1]
    del v

    order = np.argsort(skey, kind="stable").astype(np.int64)
    skey_sorted = skey[order]
    del skey
    lo = np.searchsorted(skey_sorted, vkey, side="left")
    hi = np.searchsorted(skey_sorted, vkey, side="right")
    del skey_sorted, vkey
    counts = hi - lo
    xs_a = np.repeat(xa, counts)
    xs_b = np.repeat(xb, counts)
    take = _gather_matches(order, lo, hi)
    return (xs_a, xs_b), (ya[take], yb[take])


class _FpField:
    def __init__(self, p: int):
        self.p = p

    def mul(self, x, y):
        return ((x[0] * y[0]) % self.p,)

    def square(self, x):
        return ((x[0] * x[0]) % self.p,)

    def scalar(self, k, x):
        return ((k % self.p) * x[0] % self.p,)

    def add(self, x, y):
        return ((x[0] + y[0]) % self.p,)

    def sub(self, x, y):
        return ((x[0] - y[0]) % self.p,)

    def is_zero(self, x):
        return x[0] == 0


_CHUNK = 1 << 21


def _batch_scalar_generic(F, xs, ys, m: int) -> int:
    """Count points with m*P = O. xs/ys are field-element component tuples;
    processed in chunks to bound peak memory."""
    total = 1  # the point at infinity
    n = len(xs[0])
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        X = tuple(c[sl] for c in xs)
        Y = tuple(c[sl] for c in ys)
        one = tuple(
            np.ones_like(X[0]) if i == 0 else np.zeros_like(X[0])
            for i in range(len(X))
        )
        started = False
        Rx = Ry = Rz = None
        for bit in bin(m)[2:]:
            if started:
                Rx, Ry, Rz = _jac_double(F, Rx, Ry, Rz)
            if bit == "1":
                if not started:
                    Rx, Ry, Rz = X, Y, one
                    started = True
                else:
                    Rx, Ry, Rz = _jac_add_affine(F, Rx, Ry, Rz, X, Y)
        total += int(np.count_nonzero(F.is_zero(Rz)))
    return total


def _x_only_double_chain_fp2(p: int, j_max: int) -> list[int]:
    """[#E[2^j](F_{p^2}) for j = 1..j_max] by x-only doubling.

    Runs X' = (X^2 + Z^2)^2, Z' = 4XZ(X^2 - Z^2) (the doubling map of
    y^2 = x^3 - x on x-lines, complete for this curve) over every
    x in F_{p^2}, weighting each lane by its number of affine points
    1 + chi(x^3 - x); chi on F_{p^2} factors through the norm to F_p.
    No point enumeration is needed.
    """
    F = _Fp2(p)
    r = F.r
    dtype = np.int32 if p <= 3200 else np.int64
    chi = np.full(p, -1, dtype=np.int64)
    chi[np.arange(p, dtype=np.int64) ** 2 % p] = 1
    chi[0] = 0
    totals = [1] * j_max  # the point at infinity at every level
    grid = np.arange(p, dtype=dtype)
    for a0 in range(0, p, max(1, _CHUNK // p)):
        rows = np.arange(a0, min(a0 + max(1, _CHUNK // p), p), dtype=dtype)
        xa = np.repeat(rows, p)
        xb = np.tile(grid, len(rows))
        x = (xa, xb)
        f = F.sub(F.mul(F.square(x), x), x)
        norm_f = (f[0] * f[0] - r * (f[1] * f[1] % p)) % p
        weight = 1 + chi[norm_f]
        X, Z = x, (np.ones_like(xa), np.zeros_like(xa))
        for j in range(j_max):
            A = F.square(X)
            B = F.square(Z)
            XZ = F.mul(X, Z)
            X = F.square(F.add(A, B))
            Z = F.scalar(4, F.mul(XZ, F.sub(A, B)))
            totals[j] += int(weight[F.is_zero(Z)].sum())
    return totals


def _x_only_scalar_count_fp2(p: int, m: int) -> int:
    """#E[m](F_{p^2}) for odd m by an x-only Montgomery ladder.

    Differential addition anchored at the affine base x keeps the ladder
    lane-exact for this curve: a spoiled (0:0) lane would need an
    x^2 = -1 intermediate, and those are exactly the order-4 points,
    which cannot occur among multiples of odd-order bases.  Lanes with
    x^3 - x = 0 (the 2-torsion x-line) carry weight zero since their
    points have even order.
    """
    if m < 3 or m % 2 == 0:
        raise ValueError("ladder count expects odd m >= 3")
    F = _Fp2(p)
    r = F.r
    dtype = np.int32 if p <= 3200 else np.int64
    chi = np.full(p, -1, dtype=np.int64)
    chi[np.arange(p, dtype=np.int64) ** 2 % p] = 1
    chi[0] = 0
    bits = bin(m)[3:]
    total = 1  # the point at infinity
    grid = np.arange(p, dtype=dtype)

    def xdbl(X, Z):
        A = F.square(X)
        B = F.square(Z)
        XZ = F.mul(X, Z)
        return F.square(F.add(A, B)), F.scalar(4, F.mul(XZ, F.sub(A, B)))

    def xadd(P, Q, base):
        s = F.add(F.mul(P[0], Q[0]), F.mul(P[1], Q[1]))
        t = F.sub(F.mul(P[0], Q[1]), F.mul(Q[0], P[1]))
        return F.square(s), F.mul(base, F.square(t))

    for a0 in range(0, p, max(1, _CHUNK // p)):
        rows = np.arange(a0, min(a0 + max(1, _CHUNK // p), p), dtype=dtype)
        xa = np.repeat(rows, p)
        xb = np.tile(grid, len(rows))
        x = (xa, xb)
        f = F.sub(F.mul(F.square(x), x), x)
        norm_f = (f[0] * f[0] - r * (f[1] * f[1] % p)) % p
        weight = (1 + chi[norm_f]) * ~F.is_zero(f)
        one = (np.ones_like(xa), np.zeros_like(xa))
        R0 = (x, one)
        R1 = xdbl(*R0)
        for b in bits:
            if b == "1":
                R0, R1 = xadd(R0, R1, x), xdbl(*R1)
            else:
                R0, R1 = xdbl(*R0), xadd(R0, R1, x)
        total += int(weight[F.is_zero(R0[1])].sum())
    return total


def _batch_doubling_chain(F, xs, ys, j_max: int) -> list[int]:
    """[#E[2^j] for j = 1..j_max] in one pass: repeatedly double every
    affine point, counting identity lanes after each doubling."""
    totals = [1] * j_max  # the point at infinity at every level
    n = len(xs[0])
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        X = tuple(c[sl] for c in xs)
        Y = tuple(c[sl] for c in ys)
        one = tuple(
            np.ones_like(X[0]) if i == 0 else np.zeros_like(X[0])
            for i in range(len(X))
        )
        Rx, Ry, Rz = X, Y, one
        for j in range(j_max):
            Rx, Ry, Rz = _jac_double(F, Rx, Ry, Rz)
            totals[j] += int(np.count_nonzero(F.is_zero(Rz)))
    return totals


def _jac_double(F, X, Y, Z):
    """Jacobian doubling for y^2 = x^3 + a*x, a = -1."""
    YY = F.square(Y)
    S = F.scalar(4, F.mul(X, YY))
    ZZ = F.square(Z)
    ZZZZ = F.square(ZZ)
    # M = 3*X^2 + a*Z^4, a = -1
    M = F.sub(F.scalar(3, F.square(X)), ZZZZ)
    X3 = F.sub(F.square(M), F.scalar(2, S))
    Y3 = F.sub(F.mul(M, F.sub(S, X3)), F.scalar(8, F.square(YY)))
    Z3 = F.scalar(2, F.mul(Y, Z))
    return X3, Y3, Z3


def _jac_add_affine(F, X1, Y1, Z1, x2, y2):
    """Mixed Jacobian + affine addition; handles doubling/inverse cases
    elementwise (those lanes are patched by a doubling pass)."""
    Z1Z1 = F.square(Z1)
    U2 = F.mul(x2, Z1Z1)
    S2 = F.mul(y2, F.mul(Z1, Z1Z1))
    H = F.sub(U2, X1)
    Rr = F.sub(S2, Y1)
    h_zero = F.is_zero(H)
    r_zero = F.is_zero(Rr)
    HH = F.square(H)
    HHH = F.mul(H, HH)
    V = F.mul(X1, HH)
    X3 = F.sub(F.sub(F.square(Rr), HHH), F.scalar(2, V))
    Y3 = F.sub(F.mul(Rr, F.sub(V, X3)), F.mul(Y1, HHH))
    Z3 = F.mul(Z1, H)
    # lanes with H=0, r=0: P == Q, result is doubling of (x2, y2, 1)
    dbl_mask = h_zero & r_zero & ~F.is_zero(Z1)
    if np.any(dbl_mask):
        one = tuple(np.ones_like(c) if i == 0 else np.zeros_like(c)
                    for i, c in enumerate(x2))
        DX, DY, DZ = _jac_double(F, x2, y2, one)
        X3 = tuple(np.where(dbl_mask, dc, c) for dc, c in zip(DX, X3))
        Y3 = tuple(np.where(dbl_mask, dc, c) for dc, c in zip(DY, Y3))
        Z3 = tuple(np.where(dbl_mask, dc, c) for dc, c in zip(DZ, Z3))
    # lanes where running point is identity: result is (x2, y2, 1)
    id_mask = F.is_zero(Z1)
    if np.any(id_mask):
        one = tuple(np.ones_like(c) if i == 0 else np.zeros_like(c)
                    for i, c in enumerate(x2))
        X3 = tuple(np.where(id_mask, ac, c) for ac, c in zip(x2, X3))
        Y3 = tuple(np.where(id_mask, ac, c) for ac, c in zip(y2, Y3))
        Z3 = tuple(np.where(id_mask, oc, c) for oc, c in zip(one, Z3))
    return X3, Y3, Z3


def _field_and_points(p: int, n: int):
    """(field, xs, ys) with the full affine point list for E(F_{p^n})."""
    if n == 1:
        xs, ys = _enumerate_points_fp(p)
        return _FpField(p), (xs,), (ys,)
    (xa, xb), (ya, yb) = _enumerate_points_fp2(p)
    return _Fp2(p), (xa, xb), (ya, yb)


def _torsion_count(p: int, n: int, m: int) -> int:
    """#E[m](F_{p^n}) by batch scalar multiplication over all points."""
    F, xs, ys = _field_and_points(p, n)
    return _batch_scalar_generic(F, xs, ys, m)


def group_structure(p: int, n: int = 1) -> tuple[int, int]:
    """Invariant factors (d, e), d | e, d*e = |E(F_{p^n})|, via torsion counts."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    if p**n > BRUTE_FORCE_BOUND or (n == 2 and p > 3200):
        raise ValueError("bound exceeded")
    N = brute_force_count(p, n)
    field_points = None
    d = 1
    for ell, v in factorize(N).items():
        # Full ell-torsion forces ell | p^n - 1 (Weil pairing), so other
        # primes cannot contribute to the first invariant factor.
        if v < 2 or (p**n - 1) % ell:
            continue
        a = 0
        if ell == 2:
            if n == 2:
                counts = _x_only_double_chain_fp2(p, v // 2)
            else:
                F, xs, ys = _field_and_points(p, n)
                counts = _batch_doubling_chain(F, xs, ys, v // 2)
            for j, c in enumerate(counts, start=1):
                if c == 4**j:
                    a = j
                else:
                    break
        elif n == 2:
            for j in range(1, v // 2 + 1):
                if _x_only_scalar_count_fp2(p, ell**j) == ell ** (2 * j):
                    a = j
                else:
                    break
        else:
            if field_points is None:
                field_points = _field_and_points(p, n)
            F, xs, ys = field_points
            for j in range(1, v // 2 + 1):
                if _batch_scalar_generic(F, xs, ys, ell**j) == ell ** (2 * j):
                    a = j
                else:
                    break
        d *= ell**a
    e = N // d
    assert e % d == 0 and d * e == N
    assert (p**n - 1) % d == 0, "d must divide p^n - 1 (Weil pairing)"
    return d, e


def empirical_dE(d: int, x: int) -> int:
    """gcd of |E(F_{p^d})| over split primes p <= x of good reduction."""
    if d < 1:
        raise ValueError("d must be >= 1")
    g = 0
    found = False
    for p in range(5, x + 1):
        if p % 4 == 1 and is_prime(p):
            found = True
            g = math.gcd(g, order_pn(p, d))
    if not found:
        raise ValueError("no qualifying prime")
    return g
