"""Conjugacy counts in 2x2 matrix groups over small moduli.

Counts invertible 2x2 matrices over Z/q (and Z/q^2) whose characteristic
polynomial shares a root with the ell-th cyclotomic polynomial, both by
closed-form class arithmetic and by direct enumeration.  The matching
density fractions feed the divisibility statistics of Frobenius traces of
an elliptic curve over Q, which :func:`chebotarev_census` checks
empirically against the predicted class proportions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, NamedTuple

import numpy as np

from .factorint import factorize, is_prime, sieve_primes

__all__ = [
    "Mat2",
    "ConjClassTable",
    "gl2_order",
    "gl2_order_bruteforce",
    "conjugacy_classes",
    "cq_trace_det_set",
    "cq2_trace_det_set",
    "count_Cq",
    "count_Cq_fullscan",
    "count_Cq2",
    "g_nonCM",
    "c_E_compute",
    "trace_of_frobenius",
    "frobenius_power_trace",
    "extension_order_ratio",
    "chebotarev_census",
]


class Mat2(NamedTuple):
    """2x2 integer matrix in row-major order."""

    a: int
    b: int
    c: int
    d: int

    def trace(self) -> int:
        return self.a + self.d

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def mod(self, n: int) -> "Mat2":
        return Mat2(self.a % n, self.b % n, self.c % n, self.d % n)

    def mul(self, other: "Mat2", n: int | None = None) -> "Mat2":
        m = Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
        return m.mod(n) if n is not None else m

    def inv_mod(self, n: int) -> "Mat2":
        det = self.det() % n
        if math.gcd(det, n) != 1:
            raise ValueError(f"matrix is not invertible modulo {n}")
        inv = pow(det, -1, n)
        return Mat2(
            (self.d * inv) % n,
            (-self.b * inv) % n,
            (-self.c * inv) % n,
            (self.a * inv) % n,
        )


def _prime_power(n: int) -> tuple[int, int]:
    fac = factorize(n)
    if len(fac) != 1:
        raise ValueError(f"modulus must be a prime or a prime square, got {n}")
    return next(iter(fac.items()))


def gl2_order(n: int) -> int:
    """Order of the group of invertible 2x2 matrices over Z/n.

    ``n`` must be a prime q, giving (q+1)*q*(q-1)^2, or the square of a
    prime, giving (q+1)*q^5*(q-1)^2.
    """
    q, k = _prime_power(n)
    if k == 1:
        return (q + 1) * q * (q - 1) ** 2
    if k == 2:
        return (q + 1) * q**5 * (q - 1) ** 2
    raise ValueError(f"modulus must be a prime or a prime square, got {n}")


def _entry_arrays(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    idx = np.arange(n**4, dtype=np.int64)
    d = idx % n
    c = (idx // n) % n
    b = (idx // n**2) % n
    a = idx // n**3
    return a, b, c, d


def gl2_order_bruteforce(n: int) -> int:
    """Count invertible 2x2 matrices over Z/n by enumerating all of them."""
    if not 2 <= n <= 40:
        raise ValueError("exhaustive matrix enumeration is limited to 2 <= n <= 40")
    a, b, c, d = _entry_arrays(n)
    det = (a * d - b * c) % n
    return int(np.count_nonzero(np.gcd(det, n) == 1))


@dataclass(frozen=True)
class ConjClassTable:
    """Conjugacy classes of the invertible 2x2 matrices over Z/n."""

    modulus: int
    sizes: tuple[int, ...]

    @property
    def class_count(self) -> int:
        return len(self.sizes)

    @property
    def group_order(self) -> int:
        return sum(self.sizes)


def _unit_group_generator(n: int) -> int:
    """Smallest generator of (Z/n)^*, which must be cyclic."""
    phi = 1
    for p, k in factorize(n).items():
        phi *= p ** (k - 1) * (p - 1)
    if phi == 1:
        return 1
    prime_parts = list(factorize(phi))
    for g in range(2, n):
        if math.gcd(g, n) != 1:
            continue
        if all(pow(g, phi // p, n) != 1 for p in prime_parts):
            return g
    raise ValueError(f"unit group of Z/{n} is not cyclic")


def conjugacy_classes(n: int) -> ConjClassTable:
    """Conjugacy-class sizes of the invertible 2x2 matrices over Z/n.

    Computed by closing each matrix under conjugation by group generators
    (a full orbit decomposition, no classification formulas).  Limited to
    moduli with at most 500000 candidate matrices.
    """
    q, k = _prime_power(n)
    if k > 2:
        raise ValueError(f"modulus must be a prime or a prime square, got {n}")
    if n**4 > 500_000:
        raise ValueError("orbit enumeration is limited to n**4 <= 500000")

    a, b, c, d = _entry_arrays(n)
    det = (a * d - b * c) % n
    unit = np.gcd(det, n) == 1

    g = _unit_group_generator(n)
    gens = [Mat2(1, 1, 0, 1), Mat2(1, 0, 1, 1), Mat2(g, 0, 0, 1)]
    gens.append(gens[0].mul(gens[1], n))
    gens.append(gens[1].mul(gens[2], n))

    perms = []
    for m in gens:
        mi = m.inv_mod(n)
        # X -> M^{-1} X M, entrywise on the full matrix arrays.
        xa = a * m.a + b * m.c
        xb = a * m.b + b * m.d
        xc = c * m.a + d * m.c
        xd = c * m.b + d * m.d
        ya = (mi.a * xa + mi.b * xc) % n
        yb = (mi.a * xb + mi.b * xd) % n
        yc = (mi.c * xa + mi.d * xc) % n
        yd = (mi.c * xb + mi.d * xd) % n
        perms.append(((ya * n + yb) * n + yc) * n + yd)

    size = n**4
    for perm in list(perms):
        inv = np.empty_like(perm)
        inv[perm] = np.arange(size, dtype=np.int64)
        perms.append(inv)

    labels = np.arange(size, dtype=np.int64)
    while True:
        before = labels.copy()
        for perm in perms:
            np.minimum(labels, labels[perm], out=labels)
        if np.array_equal(labels, before):
            break

    counts = np.bincount(labels[unit])
    sizes = tuple(sorted((int(s) for s in counts if s > 0), reverse=True))
    return ConjClassTable(modulus=n, sizes=sizes)


# ---------------------------------------------------------------------------
# Roots of the ell-th cyclotomic polynomial in F_q and F_{q^2}
# ---------------------------------------------------------------------------


def _legendre(a: int, q: int) -> int:
    a %= q
    if a == 0:
        return 0
    return 1 if pow(a, (q - 1) // 2, q) == 1 else -1


def _sqrt_mod(a: int, q: int) -> int:
    a %= q
    if q > 10_000:
        raise ValueError("modular square root search is limited to q <= 10000")
    for s in range(q):
        if s * s % q == a:
            return s
    raise ValueError(f"{a} is not a square modulo {q}")


def _nonresidue(q: int) -> int:
    for r in range(2, q):
        if _legendre(r, q) == -1:
            return r
    raise ValueError(f"no quadratic non-residue modulo {q}")


def _validate_odd_prime(v: int, name: str) -> None:
    if v < 3 or v % 2 == 0 or not is_prime(v):
        raise ValueError(f"{name} must be an odd prime, got {v}")


def _phi_roots(ell: int, q: int) -> tuple[list[int], list[tuple[int, int]], int]:
    """Roots of the ell-th cyclotomic polynomial in F_{q^2}.

    Returns ``(roots_fq, roots_quad, r)`` where ``roots_fq`` are the roots
    lying in F_q, ``roots_quad`` are pairs (u, v) denoting u + v*sqrt(r) for
    the roots generating the quadratic extension, and ``r`` is the
    non-residue used to build that extension.
    """
    r = _nonresidue(q)
    if ell == q:
        # X^ell - 1 = (X-1)^ell over F_ell: the unique root is 1.
        return [1], [], r
    if (q - 1) % ell == 0:
        g = _unit_group_generator(q)
        z = pow(g, (q - 1) // ell, q)
        return [pow(z, k, q) for k in range(1, ell)], [], r
    if (q + 1) % ell == 0:
        inv2 = pow(2, -1, q)
        roots: list[tuple[int, int]] = []
        for t in range(q):
            disc = (t * t - 4) % q
            if _legendre(disc, q) != -1:
                continue
            s = _sqrt_mod(disc * pow(r, -1, q) % q, q)
            e = (t * inv2 % q, s * inv2 % q)
            # Check multiplicative order exactly ell via explicit powering.
            acc = (1, 0)
            for _ in range(ell):
                acc = (
                    (acc[0] * e[0] + acc[1] * e[1] * r) % q,
                    (acc[0] * e[1] + acc[1] * e[0]) % q,
                )
            if acc == (1, 0):
                roots.append(e)
                roots.append((e[0], (-e[1]) % q))
        return [], roots, r
    return [], [], r


def cq_trace_det_set(ell: int, q: int) -> frozenset[tuple[int, int]]:
    """(trace, det) pairs mod q of invertible matrices whose characteristic
    polynomial has a root of the ell-th cyclotomic polynomial in F_{q^2}."""
    _validate_odd_prime(ell, "ell")
    _validate_odd_prime(q, "q")
    if (q * q - 1) % ell != 0 and ell != q:
        return frozenset()
    roots_fq, roots_quad, r = _phi_roots(ell, q)
    pairs: set[tuple[int, int]] = set()
    for e in roots_fq:
        for t in range(q):
            d = e * (t - e) % q
            if d != 0:
                pairs.add((t, d))
    for u, v in roots_quad:
        # Minimal polynomial of u + v*sqrt(r): trace 2u, norm u^2 - v^2 r.
        pairs.add((2 * u % q, (u * u - v * v * r) % q))
    return frozenset(pairs)


def _fiber_size(t: int, d: int, q: int) -> int:
    """Number of 2x2 matrices over F_q with trace t and determinant d != 0."""
    disc = (t * t - 4 * d) % q
    if disc == 0:
        return q * q
    if _legendre(disc, q) == 1:
        return q * q + q
    return q * q - q


def count_Cq(ell: int, q: int) -> tuple[int, int]:
    """Count matrices over F_q with a cyclotomic eigenvalue, two ways.

    Returns ``(brute, formula)``: ``brute`` sums exact (trace, det) fiber
    sizes over the admissible pairs, ``formula`` is the closed form.  When
    ell divides neither q^2 - 1 nor equals q the set is empty and (0, 0)
    is returned.
    """
    _validate_odd_prime(ell, "ell")
    _validate_odd_prime(q, "q")
    if (q * q - 1) % ell != 0 and ell != q:
        return (0, 0)
    brute = sum(_fiber_size(t, d, q) for t, d in cq_trace_det_set(ell, q))
    if ell == q:
        formula = q * (q * q - 2)
    elif (q - 1) % ell == 0:
        formula = (ell - 1) * q * (2 * q * q - (ell - 2) * q - (ell + 2)) // 2
    else:
        formula = (ell - 1) // 2 * q * (q - 1)
    return (brute, formula)


def count_Cq_fullscan(ell: int, q: int) -> int:
    """Same count as :func:`count_Cq` by enumerating every invertible matrix.

    Evaluates the characteristic polynomial at each cyclotomic root
    directly (in F_q or in F_{q^2} coordinates), so it shares no
    arithmetic with the fiber-size computation.  Limited to q <= 13.
    """
    _validate_odd_prime(ell, "ell")
    _validate_odd_prime(q, "q")
    if q > 13:
        raise ValueError("full matrix enumeration is limited to q <= 13")
    if (q * q - 1) % ell != 0 and ell != q:
        return 0
    a, b, c, d = _entry_arrays(q)
    det = (a * d - b * c) % q
    tr = (a + d) % q
    unit = det != 0
    roots_fq, roots_quad, r = _phi_roots(ell, q)
    member = np.zeros(q**4, dtype=bool)
    for e in roots_fq:
        member |= (e * e - tr * e + det) % q == 0
    for u, v in roots_quad:
        member |= (tr == 2 * u % q) & (det == (u * u - v * v * r) % q)
    return int(np.count_nonzero(member & unit))


def _cq2_member_grid(ell: int, q: int) -> np.ndarray:
    """Boolean (q^2, q^2) grid over (trace, det) mod q^2 of the counted set.

    A pair belongs when the mod-q characteristic polynomial splits with
    both roots cyclotomic in F_{q^2}, or (roots in F_q only) when the
    characteristic equation holds mod q^2 at the unique root-of-unity
    lift of a root.
    """
    q2 = q * q
    roots_fq, roots_quad, r = _phi_roots(ell, q)

    c1 = np.zeros((q, q), dtype=bool)
    if ell == q:
        c1[2 % q, 1] = True
    elif roots_fq:
        for e1 in roots_fq:
            for e2 in roots_fq:
                c1[(e1 + e2) % q, e1 * e2 % q] = True
    else:
        for u, v in roots_quad:
            c1[2 * u % q, (u * u - v * v * r) % q] = True

    tvals = np.arange(q2, dtype=np.int64)
    dvals = np.arange(q2, dtype=np.int64)
    member = c1[np.ix_(tvals % q, dvals % q)].copy()
    if (q - 1) % ell == 0:
        # Only here is the root-of-unity lift unique (simple roots mod q).
        for e in roots_fq:
            lift = pow(e, q, q2)  # unique lift of e with lift^ell = 1 mod q^2
            dline = (lift * tvals - lift * lift) % q2
            member[tvals, dline] = True
    return member


def cq2_trace_det_set(ell: int, q: int) -> frozenset[tuple[int, int]]:
    """(trace, det) pairs mod q^2, with det a unit, of the set counted by
    :func:`count_Cq2`."""
    _validate_odd_prime(ell, "ell")
    _validate_odd_prime(q, "q")
    if (q * q - 1) % ell != 0 and ell != q:
        return frozenset()
    member = _cq2_member_grid(ell, q)
    ts, ds = np.nonzero(member)
    return frozenset(
        (int(t), int(d)) for t, d in zip(ts, ds) if d % q != 0
    )


def count_Cq2(ell: int, q: int) -> tuple[int, float]:
    """Exhaustive count over Z/q^2 of matrices whose reduction-and-lift
    structure forces an extra factor of q in the cyclotomic resultant.

    The counted set is the union of (a) matrices whose characteristic
    polynomial mod q splits with both roots cyclotomic in F_{q^2} and,
    when the roots lie in F_q, (b) matrices satisfying the characteristic
    equation mod q^2 at the unique root-of-unity lift of a root.  Returns
    ``(count, K)`` with ``K = count / q^6`` the scaled size.  Limited to
    q in {3, 5, 7}; returns (0, 0.0) when the cyclotomic precondition
    fails.
    """
    _validate_odd_prime(ell, "ell")
    _validate_odd_prime(q, "q")
    if q > 7:
        raise ValueError("exhaustive enumeration over Z/q^2 is limited to q <= 7")
    if (q * q - 1) % ell != 0 and ell != q:
        return (0, 0.0)
    q2 = q * q
    member = _cq2_member_grid(ell, q)

    tvals = np.arange(q2, dtype=np.int64)
    dvals = np.arange(q2, dtype=np.int64)
    unit_mask = dvals % q != 0
    dunits = dvals[unit_mask]

    # Solution counts of b*c = m (mod q^2) by the q-adic valuation of m.
    f_table = np.full(q2, q2 - q, dtype=np.int64)
    f_table[:: q] = 2 * q * (q - 1)
    f_table[0] = 3 * q2 - 2 * q

    avals = np.arange(q2, dtype=np.int64)
    m = (
        avals[:, None, None] * (tvals[None, :, None] - avals[:, None, None])
        - dunits[None, None, :]
    ) % q2
    fibers = f_table[m].sum(axis=0)  # (trace, unit det) matrix counts
    count = int(fibers[member[:, unit_mask]].sum())
    return (count, count / q**6)


def g_nonCM(ell: int, q: int, i_q: Fraction | int | float = 1) -> Fraction:
    """Density of invertible matrices mod q with a cyclotomic eigenvalue.

    Exact rational value of count/group-order, with the inert weight
    ``i_q`` applied in the case ell | q+1.
    """
    _validate_odd_prime(ell, "ell")
    if q == 2:
        weight = i_q if isinstance(i_q, (int, Fraction)) else Fraction(*float(i_q).as_integer_ratio())
        return Fraction(ell - 1, 2 * (2 * 2 - 1)) * weight if (2 * 2 - 1) % ell == 0 else Fraction(0)
    _validate_odd_prime(q, "q")
    if ell == q:
        return Fraction(ell * ell - 2, (ell + 1) * (ell - 1) ** 2)
    if (q - 1) % ell == 0:
        num = Fraction(ell - 1) * (
            Fraction(q * q) - Fraction(ell - 2, 2) * q - Fraction(ell + 2, 2)
        )
        return num / ((q + 1) * (q - 1) ** 2)
    if (q + 1) % ell == 0:
        weight = i_q if isinstance(i_q, (int, Fraction)) else Fraction(*float(i_q).as_integer_ratio())
        return weight * Fraction(ell - 1, 2 * (q * q - 1))
    return Fraction(0)


def c_E_compute(
    M_E: int,
    ell: int,
    i_config: Mapping[int, Fraction | int | float] | Callable[[int], Fraction | int | float] | None = None,
) -> Fraction:
    """Inclusion-exclusion constant over the primes dividing M_E.

    Sum over divisors d of M_E of mu(d) times the product over primes q | d
    of i(q) * count/order; equivalently the product over distinct primes
    q | M_E of (1 - i(q) * density(q)).
    """
    if M_E < 1:
        raise ValueError(f"M_E must be a positive integer, got {M_E}")
    _validate_odd_prime(ell, "ell")
    if i_config is None:
        i_of = lambda q: Fraction(1)
    elif callable(i_config):
        i_of = i_config
    else:
        i_of = lambda q, _m=i_config: _m.get(q, Fraction(1))

    primes = list(factorize(M_E)) if M_E > 1 else []
    total = Fraction(0)
    for mask in range(1 << len(primes)):
        term = Fraction(1)
        sign = 1
        for j, qp in enumerate(primes):
            if mask >> j & 1:
                sign = -sign
                iq = i_of(qp)
                if not isinstance(iq, (int, Fraction)):
                    iq = Fraction(*float(iq).as_integer_ratio())
                term *= iq * g_nonCM(ell, qp, 1)
        total += sign * term
    return total


# ---------------------------------------------------------------------------
# Frobenius traces of an elliptic curve over Q, and the divisibility census
# ---------------------------------------------------------------------------

_AP_CACHE: dict[tuple[int, int], dict[int, int]] = {}


def trace_of_frobenius(A: int, B: int, p: int) -> int:
    """Trace a_p of y^2 = x^3 + A x + B at an odd prime p of good reduction,
    by the quadratic-character sum over x mod p (O(p) work, cached)."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if (4 * A**3 + 27 * B**2) % p == 0:
        raise ValueError(f"curve is singular modulo {p}")
    cache = _AP_CACHE.setdefault((A, B), {})
    if p in cache:
        return cache[p]
    xs = np.arange(p, dtype=np.int64)
    f = (xs * xs % p * xs + A * xs + B) % p
    qr = np.zeros(p, dtype=bool)
    qr[xs * xs % p] = True
    chi = np.where(f == 0, 0, np.where(qr[f], 1, -1))
    ap = -int(chi.sum())
    if ap * ap > 4 * p:
        raise ArithmeticError(f"trace bound violated at p={p}: a_p={ap}")
    cache[p] = ap
    return ap


def frobenius_power_trace(ap: int, p: int, k: int) -> int:
    """Trace of the k-th power of Frobenius: t_0=2, t_1=a_p,
    t_j = a_p t_{j-1} - p t_{j-2}."""
    if k < 0:
        raise ValueError("power must be non-negative")
    t0, t1 = 2, ap
    if k == 0:
        return t0
    for _ in range(k - 1):
        t0, t1 = t1, ap * t1 - p * t0
    return t1

def extension_order_ratio(ap: int, p: int, ell: int) -> int:
    """Point-count ratio between the degree-ell extension field and the
    base field: (p^ell + 1 - t_ell) / (p + 1 - a_p), an exact integer."""
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    num = p**ell + 1 - frobenius_power_trace(ap, p, ell)
    den = p + 1 - ap
    if num % den:
        raise ArithmeticError(f"order ratio is not integral at p={p}")
    return num // den


def chebotarev_census(
    curve: tuple[int, int] = (1, 1),
    ell: int = 3,
    q: int = 7,
    x: int = 20_000,
    i_q: float | None = None,
) -> dict:
    """Empirical density of primes p <= x with q | order ratio, versus the
    matrix-class prediction.

    For each good odd prime p (p != q), computes a_p, tests divisibility of
    the degree-ell order ratio by q, and independently tests the predicted
    criterion: (a_p, p) mod q lies in the admissible (trace, det) set,
    intersected with the discriminant a_p^2 - 4p being a non-residue mod q
    when ell | q+1.  Reports the pointwise agreement rate of the two
    criteria, the empirical density, and the predicted density
    (class-count fraction, weighted by ``i_q`` in the ell | q+1 case;
    when ``i_q`` is None the observed non-residue fraction is used).
    """
    A, B = curve
    _validate_odd_prime(ell, "ell")
    _validate_odd_prime(q, "q")
    if x < 10:
        raise ValueError(f"census bound x must be at least 10, got {x}")
    if x > 10**6:
        raise ValueError(f"census bound x is limited to 10^6, got {x}")
    disc_core = 4 * A**3 + 27 * B**2
    td = cq_trace_det_set(ell, q)
    inert_case = (q + 1) % ell == 0

    n = 0
    hits = 0
    agree = 0
    member_count = 0
    inert_member = 0
    for p in sieve_primes(x):
        p = int(p)
        if p == 2 or p == q or disc_core % p == 0:
            continue
        ap = trace_of_frobenius(A, B, p)
        divides = extension_order_ratio(ap, p, ell) % q == 0
        member = (ap % q, p % q) in td
        if inert_case:
            predicted_hit = member and _legendre(ap * ap - 4 * p, q) == -1
            if member:
                member_count += 1
                if _legendre(ap * ap - 4 * p, q) == -1:
                    inert_member += 1
        else:
            predicted_hit = member
        n += 1
        hits += divides
        agree += divides == predicted_hit

    brute, formula = count_Cq(ell, q)
    class_fraction = Fraction(formula, gl2_order(q))
    if inert_case:
        if i_q is not None:
            weight = float(i_q)
        elif member_count:
            weight = inert_member / member_count
        else:
            weight = 1.0
        predicted = float(class_fraction) * weight
        inert_fraction = inert_member / member_count if member_count else None
    else:
        predicted = float(class_fraction)
        inert_fraction = None

    return {
        "curve": (A, B),
        "ell": ell,
        "q": q,
        "x": x,
        "primes": n,
        "hits": hits,
        "empirical": hits / n if n else 0.0,
        "predicted": predicted,
        "class_fraction": class_fraction,
        "equivalence_rate": agree / n if n else 1.0,
        "inert_fraction": inert_fraction,
    }
