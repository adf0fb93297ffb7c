"""Enumeration over split primes of point-count ratios and their predicates.

For every prime p = 1 (mod 4) up to a bound, computes the point-count
ratios A1 = |E(F_p)|/8 and A2 = |E(F_{p^2})|/(4 |E(F_p)|) of the curve
y^2 = x^3 - x, factors them, evaluates the almost-prime / coprimality /
group-structure predicates they are expected to satisfy, and caches the
per-prime rows in an append-only CSV so that larger runs extend smaller
ones.  Also provides degree-one prime-ideal counts in residue classes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .curve_orders import group_structure, order_pn
from .factorint import big_omega, factorize, is_prime, sieve_primes
from .gaussian import (
    GaussInt,
    SquareFreeIdeal,
    exact_div,
    gauss_divmod,
    gauss_gcd,
    split_prime,
)
from .sieve_numerics import bound_table

__all__ = [
    "CSV_HEADER",
    "PREDICATE_KEYS",
    "STRUCTURE_BOUND",
    "CacheCorruptionError",
    "OrderRecord",
    "CensusConfig",
    "CensusTable",
    "is_almost_prime",
    "compute_record",
    "load_cache",
    "run_census",
    "verify_coprimality",
    "common_factor_witness",
    "s_epsilon_member",
    "logarithmic_integral",
    "gauss_phi",
    "pi_prime_count",
    "pi_prime_reference",
]

CSV_HEADER = (
    "p,a_p,pi_re,pi_im,A1,A2,omega_A1,Omega_A1,omega_A2,Omega_A2,"
    "gcd_A1_A2,struct_d1,struct_e1,struct_d2,struct_e2"
)

#: Predicate counter keys, one per counted statement.
PREDICATE_KEYS = (
    "T1.2-omega",
    "T1.2-P5",
    "T1.3-pair",
    "T1.3-P10",
    "T1.4-structure",
    "T1.5-cyclic",
    "S-epsilon",
)

#: Group structures are enumerated only up to this prime (quadratic
#: extension costs p^2 points); beyond it rows are flagged unchecked.
STRUCTURE_BOUND = 3000

_UNITS = (GaussInt(1, 0), GaussInt(-1, 0), GaussInt(0, 1), GaussInt(0, -1))


class CacheCorruptionError(RuntimeError):
    """A cache file row failed to parse or re-validate."""


@dataclass(frozen=True)
class OrderRecord:
    """One census row: Frobenius data, cofactors, factor counts, structure."""

    p: int
    a_p: int
    pi_re: int
    pi_im: int
    A1: int
    A2: int
    omega_A1: int
    Omega_A1: int
    omega_A2: int
    Omega_A2: int
    gcd_A1_A2: int
    struct_d1: int | None = None
    struct_e1: int | None = None
    struct_d2: int | None = None
    struct_e2: int | None = None

    @property
    def structure_checked(self) -> bool:
        return self.struct_d1 is not None


@dataclass(frozen=True)
class CensusConfig:
    """Census parameters: bound, ratio degrees, sifting exponents, cache."""

    x: int
    ell_list: tuple[int, ...] = (2, 3)
    z1_exp: Fraction = Fraction(1, 30)
    z2_exp: Fraction = Fraction(1, 31)
    cache_path: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.x < 2:
            raise ValueError(f"census bound x must be at least 2, got {self.x}")
        object.__setattr__(self, "ell_list", tuple(int(l) for l in self.ell_list))
        for ell in self.ell_list:
            if ell < 2 or not is_prime(ell):
                raise ValueError(f"ell_list entries must be primes >= 2, got {ell}")
        z1 = Fraction(self.z1_exp)
        z2 = Fraction(self.z2_exp)
        if not (0 < z2 <= z1 < Fraction(1, 2)):
            raise ValueError(
                f"sifting exponents must satisfy 0 < z2 <= z1 < 1/2, got "
                f"z1={z1}, z2={z2}"
            )
        object.__setattr__(self, "z1_exp", z1)
        object.__setattr__(self, "z2_exp", z2)
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class CensusTable:
    """Counters and witness rows per predicate, plus the raw records."""

    x: int
    counters: dict[str, int]
    witnesses: dict[str, list[OrderRecord]]
    index_distribution: dict[tuple[int, int], int]
    records: list[OrderRecord]

    def check_invariants(self) -> None:
        for key in PREDICATE_KEYS:
            if self.counters[key] != len(self.witnesses[key]):
                raise AssertionError(
                    f"counter {key} = {self.counters[key]} but "
                    f"{len(self.witnesses[key])} witnesses stored"
                )


def is_almost_prime(n: int, k: int, z: float, factors: dict[int, int] | None = None) -> bool:
    """True when n is square-free with at most k prime factors, all > z."""
    if n < 1:
        return False
    if factors is None:
        factors = factorize(n)
    if any(mult > 1 for mult in factors.values()):
        return False
    if len(factors) > k:
        return False
    return all(q > z for q in factors)


def compute_record(p: int) -> OrderRecord:
    """Census row for one split prime: orders, cofactors, factor counts,
    and (below the enumeration bound) the group structures."""
    pi = split_prime(p)
    n1 = order_pn(p, 1)
    n2 = order_pn(p, 2)
    a_p = p + 1 - n1
    if n1 % 8:
        raise ArithmeticError(f"group order {n1} at p={p} is not divisible by 8")
    A1 = n1 // 8
    if n2 % (4 * n1):
        raise ArithmeticError(f"order ratio at p={p} is not integral")
    A2 = n2 // (4 * n1)
    fac1 = factorize(A1)
    fac2 = factorize(A2)
    g = math.gcd(A1, A2)
    if p <= STRUCTURE_BOUND:
        d1, e1 = group_structure(p, 1)
        d2, e2 = group_structure(p, 2)
    else:
        d1 = e1 = d2 = e2 = None
    return OrderRecord(
        p=p,
        a_p=a_p,
        pi_re=pi.re,
        pi_im=pi.im,
        A1=A1,
        A2=A2,
        omega_A1=len(fac1),
        Omega_A1=sum(fac1.values()),
        omega_A2=len(fac2),
        Omega_A2=sum(fac2.values()),
        gcd_A1_A2=g,
        struct_d1=d1,
        struct_e1=e1,
        struct_d2=d2,
        struct_e2=e2,
    )


# ---------------------------------------------------------------------------
# CSV cache
# ---------------------------------------------------------------------------


def default_cache_path() -> Path:
    """Cache file location; the SIEVE_ORDERS_CACHE env var overrides the dir."""
    root = os.environ.get("SIEVE_ORDERS_CACHE")
    base = Path(root) if root else Path.home() / ".cache" / "artifact"
    return base / "orders.csv"


def _record_to_row(rec: OrderRecord) -> str:
    fields = [
        rec.p, rec.a_p, rec.pi_re, rec.pi_im, rec.A1, rec.A2,
        rec.omega_A1, rec.Omega_A1, rec.omega_A2, rec.Omega_A2,
        rec.gcd_A1_A2,
        rec.struct_d1, rec.struct_e1, rec.struct_d2, rec.struct_e2,
    ]
    return ",".join("" if v is None else str(v) for v in fields)


def _row_to_record(line: str, lineno: int, path: Path | str) -> OrderRecord:
    parts = line.split(",")
    if len(parts) != 15:
        raise CacheCorruptionError(
            f"cache corruption in {path} at line {lineno}: {line!r}"
        )
    try:
        ints = [int(v) for v in parts[:11]]
        structs = [None if v == "" else int(v) for v in parts[11:]]
    except ValueError:
        raise CacheCorruptionError(
            f"cache corruption in {path} at line {lineno}: {line!r}"
        ) from None
    if (structs[0] is None) != (structs[1] is None) or (
        (structs[2] is None) != (structs[3] is None)
    ):
        raise CacheCorruptionError(
            f"cache corruption in {path} at line {lineno}: {line!r}"
        )
    return OrderRecord(*ints, *structs)


def load_cache(path: Path | str) -> dict[int, OrderRecord]:
    """Parse a cache CSV into {p: record}; malformed rows raise with the
    offending line."""
    path = Path(path)
    if not path.exists():
        return {}
    records: dict[int, OrderRecord] = {}
    with open(path, "r", encoding="ascii") as fh:
        first = fh.readline().rstrip("\n")
        if first != CSV_HEADER:
            raise CacheCorruptionError(
                f"cache corruption in {path} at line 1: bad header {first!r}"
            )
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line:
                continue
            rec = _row_to_record(line, lineno, path)
            records[rec.p] = rec
    return records


def _append_cache(path: Path, records: list[OrderRecord], had_file: bool) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="ascii", newline="") as fh:
        if not had_file:
            fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(_record_to_row(rec) + "\n")


# ---------------------------------------------------------------------------
# Predicates and the census driver
# ---------------------------------------------------------------------------


def _pair_predicates(rec: OrderRecord, z1: float, z2: float) -> tuple[bool, bool]:
    """(T1.3-pair, T1.3-P10) for one row."""
    fac1 = factorize(rec.A1)
    fac2 = factorize(rec.A2)
    coprime = rec.gcd_A1_A2 == 1
    squarefree = all(m == 1 for m in fac1.values()) and all(
        m == 1 for m in fac2.values()
    )
    p10 = coprime and squarefree and len(fac1) + len(fac2) <= 10
    pair = (
        p10
        and all(q > z1 for q in fac1)
        and all(q > z2 for q in fac2)
    )
    return pair, p10


def _structure_predicates(rec: OrderRecord) -> tuple[bool | None, bool | None]:
    """(T1.4-structure, T1.5-cyclic) for one row; None when unchecked."""
    if not rec.structure_checked:
        return None, None
    n1 = 8 * rec.A1
    n2 = 4 * n1 * rec.A2
    applicable1 = rec.A1 % 2 == 1 and all(
        m == 1 for m in factorize(rec.A1).values()
    )
    prod = rec.A1 * rec.A2
    applicable2 = prod % 2 == 1 and all(m == 1 for m in factorize(prod).values())
    holds = True
    if applicable1:
        holds = holds and (rec.struct_d1, rec.struct_e1) == (2, n1 // 2)
    if applicable2:
        holds = holds and (rec.struct_d2, rec.struct_e2) == (4, n2 // 4)
    structure_ok = (applicable1 or applicable2) and holds
    cyclic_ok = rec.struct_d1 <= 12 and rec.struct_d2 <= 12
    return structure_ok, cyclic_ok


def run_census(cfg: CensusConfig) -> CensusTable:
    """Evaluate every predicate counter over the split primes p <= cfg.x.

    Rows are served from the cache file when present and appended for new
    primes (ascending p, deterministic bytes).  Degree-ell ratios for odd
    ell are recomputed per run since the row format carries only A1/A2.
    """
    path = Path(cfg.cache_path) if cfg.cache_path else default_cache_path()
    cached = load_cache(path)
    had_file = path.exists()

    split_ps = [int(p) for p in sieve_primes(cfg.x) if p % 4 == 1]
    todo = [p for p in split_ps if p not in cached]
    if todo:
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                fresh = list(pool.map(compute_record, todo))
        else:
            fresh = [compute_record(p) for p in todo]
        new_records = sorted(fresh, key=lambda r: r.p)
        _append_cache(path, new_records, had_file)
        cached.update({rec.p: rec for rec in new_records})

    records = [cached[p] for p in split_ps]

    z1 = float(cfg.x) ** float(cfg.z1_exp)
    z2 = float(cfg.x) ** float(cfg.z2_exp)
    odd_ells = [l for l in cfg.ell_list if l >= 3]
    n_ell = {l: bound_table("CM-ell", ell=l) for l in odd_ells}
    p5_bound = bound_table("CM-P5") if 2 in cfg.ell_list else None

    counters = {key: 0 for key in PREDICATE_KEYS}
    witnesses: dict[str, list[OrderRecord]] = {key: [] for key in PREDICATE_KEYS}
    index_distribution: dict[tuple[int, int], int] = {}

    for rec in records:
        p = rec.p
        n1 = 8 * rec.A1

        if odd_ells:
            ok = True
            for ell in odd_ells:
                ratio = order_pn(p, ell) // n1
                if big_omega(ratio) > n_ell[ell]:
                    ok = False
                    break
            if ok:
                counters["T1.2-omega"] += 1
                witnesses["T1.2-omega"].append(rec)

        if p5_bound is not None and is_almost_prime(rec.A2, p5_bound, z2):
            counters["T1.2-P5"] += 1
            witnesses["T1.2-P5"].append(rec)

        pair, p10 = _pair_predicates(rec, z1, z2)
        if pair:
            counters["T1.3-pair"] += 1
            witnesses["T1.3-pair"].append(rec)
        if p10:
            counters["T1.3-P10"] += 1
            witnesses["T1.3-P10"].append(rec)

        structure_ok, cyclic_ok = _structure_predicates(rec)
        if structure_ok:
            counters["T1.4-structure"] += 1
            witnesses["T1.4-structure"].append(rec)
        if cyclic_ok:
            counters["T1.5-cyclic"] += 1
            witnesses["T1.5-cyclic"].append(rec)
        if rec.structure_checked:
            key = (rec.struct_d1, rec.struct_d2)
            index_distribution[key] = index_distribution.get(key, 0) + 1

        if s_epsilon_member(p, z1, z2):
            counters["S-epsilon"] += 1
            witnesses["S-epsilon"].append(rec)

    table = CensusTable(
        x=cfg.x,
        counters=counters,
        witnesses=witnesses,
        index_distribution=index_distribution,
        records=records,
    )
    table.check_invariants()
    return table


# ---------------------------------------------------------------------------
# Standalone checks
# ---------------------------------------------------------------------------


def verify_coprimality(p: int) -> bool:
    """True when (pi-1)/(2(1+i)) and (pi+1)/2 are coprime in Z[i] for the
    distinguished generator pi above the split prime p."""
    if p % 4 != 1 or not is_prime(p):
        raise ValueError(f"p must be a prime = 1 (mod 4), got {p}")
    pi = split_prime(p)
    one = GaussInt(1, 0)
    u = exact_div(pi - one, GaussInt(2, 2))
    v = exact_div(pi + one, GaussInt(2, 0))
    return gauss_gcd(u, v).is_unit()


def common_factor_witness(p: int) -> list[int]:
    """Primes q > 3 dividing gcd(A1, A2) at the split prime p.

    Checks, rather than assumes, that every returned q divides a_p, is
    = 1 (mod 4), and satisfies q <= |a_p| + 2.
    """
    if p % 4 != 1 or not is_prime(p):
        raise ValueError(f"p must be a prime = 1 (mod 4), got {p}")
    n1 = order_pn(p, 1)
    n2 = order_pn(p, 2)
    A1 = n1 // 8
    A2 = n2 // (4 * n1)
    a_p = p + 1 - n1
    out = sorted(q for q in factorize(math.gcd(A1, A2)) if q > 3)
    for q in out:
        if a_p % q:
            raise AssertionError(f"witness {q} at p={p} does not divide a_p={a_p}")
        if q % 4 != 1:
            raise AssertionError(f"witness {q} at p={p} is not 1 mod 4")
        if q > abs(a_p) + 2:
            raise AssertionError(f"witness {q} at p={p} exceeds |a_p| + 2")
    return out


def s_epsilon_member(p: int, z1: float, z2: float) -> bool:
    """Membership in the fully-split sifted set: p = 5 (mod 8), p = 5
    (mod 9), and the odd prime factors > 3 of p-1 (resp. p+1) are distinct
    and exceed z1 (resp. z2)."""
    if p < 3 or p % 2 == 0:
        raise ValueError(f"p must be an odd prime, got {p}")
    if p % 8 != 5 or p % 9 != 5:
        return False
    for m, z in ((p - 1, z1), (p + 1, z2)):
        for q, mult in factorize(m).items():
            if q <= 3:
                continue
            if mult > 1 or q <= z:
                return False
    return True


# ---------------------------------------------------------------------------
# Degree-one prime-ideal counts in residue classes
# ---------------------------------------------------------------------------

_LI_AT_2 = 1.0451637801174927848


def logarithmic_integral(y: float) -> float:
    """li(y), the principal-value integral of 1/log t from 0 to y."""
    if y <= 2:
        raise ValueError("logarithmic integral evaluated only for y > 2")
    nodes, weights = np.polynomial.legendre.leggauss(64)
    lo, hi = math.log(2.0), math.log(float(y))
    panels = np.linspace(lo, hi, 33)
    total = 0.0
    for a, b in zip(panels[:-1], panels[1:]):
        u = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        total += 0.5 * (b - a) * float(np.sum(weights * np.exp(u) / u))
    return _LI_AT_2 + total


def _as_modulus(I: GaussInt | SquareFreeIdeal) -> GaussInt:
    if isinstance(I, SquareFreeIdeal):
        return I.generator()
    return I


def gauss_phi(I: GaussInt | SquareFreeIdeal) -> int:
    """Order of the unit group of Z[i] modulo the ideal generated by I."""
    z = _as_modulus(I)
    n = z.norm()
    if n == 0:
        raise ValueError("zero modulus")
    if n == 1:
        return 1
    phi = 1
    for p, k in factorize(n).items():
        if p == 2:
            phi *= 2 ** (k - 1)
        elif p % 4 == 3:
            if k % 2:
                raise ArithmeticError(f"inconsistent norm factor {p}^{k}")
            m = k // 2
            phi *= (p * p - 1) * p ** (2 * (m - 1))
        else:
            pi = split_prime(p)
            a = 0
            w = z
            while True:
                q, r = gauss_divmod(w, pi)
                if not r.is_zero():
                    break
                w = q
                a += 1
            b = k - a
            for m in (a, b):
                if m:
                    phi *= (p - 1) * p ** (m - 1)
    return phi


def pi_prime_count(I: GaussInt | SquareFreeIdeal, alpha: GaussInt, y: int) -> int:
    """Number of degree-one prime ideals of norm <= y with a generator
    congruent to alpha modulo I."""
    modulus = _as_modulus(I)
    if not gauss_gcd(alpha, modulus).is_unit():
        raise ValueError(f"{alpha} is not invertible modulo {modulus}")

    def ideal_matches(gen: GaussInt) -> bool:
        return any(
            gauss_divmod(gen * u - alpha, modulus)[1].is_zero() for u in _UNITS
        )

    count = 0
    for p in sieve_primes(int(y)):
        p = int(p)
        if p == 2:
            count += ideal_matches(GaussInt(1, 1))
        elif p % 4 == 1:
            pi = split_prime(p)
            count += ideal_matches(pi)
            count += ideal_matches(pi.conjugate())
    return count


def pi_prime_reference(I: GaussInt | SquareFreeIdeal, y: int) -> float:
    """Expected equidistribution value 4 * li(y) / phi(I) for comparison
    with :func:`pi_prime_count`."""
    return 4.0 * logarithmic_integral(y) / gauss_phi(I)
