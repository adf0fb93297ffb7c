"""Linear-sieve bound functions and the numerics built on top of them.

This module provides:

* the one-dimensional sieve bound functions ``F`` (upper) and ``f`` (lower),
  given by closed forms on their base intervals and extended upward by the
  delay-differential equations ``(sF(s))' = f(s-1)`` and ``(sf(s))' = F(s-1)``;
* their two-variable combinations ``F_vec``/``f_vec`` obtained by optimizing
  along the constraint line ``s1/sigma1 + s2/sigma2 = 1``;
* weighted-sieve objective values ``H_combined`` (two-condition form) and
  ``G_weighted`` (single-condition form);
* the certified almost-prime bound table and a parameter optimizer;
* exact multiplicative density functions and their Euler products;
* Moebius inversion for divisibility counts over pair multisets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .factorint import factorize, is_prime, is_squarefree, sieve_primes

EULER_GAMMA = 0.5772156649015328606
#: 2*e^gamma, the value shared by F on (0,1] and by s*F(s) on [1,3].
TWO_E_GAMMA = 2.0 * math.exp(EULER_GAMMA)

_STEP = 1e-4
_TABLE_MAX = 12.0
_F_TABLE_MAX = 11.0  # F bands: (0,3], (3,5], (5,7], (7,9], (9,11]
_f_TABLE_MAX = 12.0  # f bands: [2,4], (4,6], (6,8], (8,10], (10,12]
_DEPTH_LIMIT = 3  # optimizers refuse evaluations beyond this extension depth
_F_OPT_MAX = 9.0  # largest F argument with extension depth <= 3
_f_OPT_MAX = 10.0  # largest f argument with extension depth <= 3
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SieveDomainError(ValueError):
    """An argument lies outside the domain where a sieve quantity is defined."""


class InfeasibleConstraintError(ValueError):
    """The constraint set of an optimization problem is empty."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class CertificationError(ValueError):
    """A bound was requested whose sieve value is not positive."""


# ---------------------------------------------------------------------------
# F / f tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _tables() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tabulate F and f on a uniform grid over [0, 12].

    Closed forms seed the base intervals; each higher band is obtained by
    integrating the delay-differential recursion with the cumulative
    trapezoid rule, anchored at the junction value of the previous band.
    """
    n = int(round(_TABLE_MAX / _STEP)) + 1
    grid = np.linspace(0.0, _TABLE_MAX, n)
    F_tab = np.empty(n)
    f_tab = np.zeros(n)

    below_one = grid <= 1.0
    F_tab[below_one] = TWO_E_GAMMA
    base_F = ~below_one & (grid <= 3.0)
    F_tab[base_F] = TWO_E_GAMMA / grid[base_F]
    base_f = (grid > 2.0) & (grid <= 4.0)
    f_tab[base_f] = TWO_E_GAMMA * np.log(grid[base_f] - 1.0) / grid[base_f]

    def idx(s: float) -> int:
        return int(round(s / _STEP))

    # Alternate bands: F on (3,5] needs f on (2,4], f on (4,6] needs F on
    # (3,5], and so on.
    for lo, hi, which in (
        (3.0, 5.0, "F"),
        (4.0, 6.0, "f"),
        (5.0, 7.0, "F"),
        (6.0, 8.0, "f"),
        (7.0, 9.0, "F"),
        (8.0, 10.0, "f"),
        (9.0, 11.0, "F"),
        (10.0, 12.0, "f"),
    ):
        ilo, ihi = idx(lo), min(idx(hi), n - 1)
        src = f_tab if which == "F" else F_tab
        dst = F_tab if which == "F" else f_tab
        seg = src[ilo - idx(1.0) : ihi - idx(1.0) + 1]
        cum = np.concatenate(
            [[0.0], np.cumsum((seg[1:] + seg[:-1]) * (0.5 * _STEP))]
        )
        dst[ilo : ihi + 1] = (lo * dst[ilo] + cum) / grid[ilo : ihi + 1]

    return grid, F_tab, f_tab


def _F_many(s: np.ndarray) -> np.ndarray:
    """Vectorized F lookup with the constant continuation below s = 1."""
    grid, F_tab, _ = _tables()
    return np.interp(np.clip(s, 0.0, _F_TABLE_MAX), grid, F_tab)


def _f_many(s: np.ndarray) -> np.ndarray:
    """Vectorized f lookup (0 below s = 2)."""
    grid, _, f_tab = _tables()
    return np.interp(np.clip(s, 0.0, _f_TABLE_MAX), grid, f_tab)


def recursion_depth(s: float, which: str) -> int:
    """Number of delay-differential extension steps needed to reach ``s``.

    Depth 0 covers the closed-form base interval; each further band of
    length 2 adds one step.
    """
    if which == "F":
        return max(0, math.ceil((s - 3.0) / 2.0 - 1e-12))
    if which == "f":
        return max(0, math.ceil((s - 4.0) / 2.0 - 1e-12))
    raise ValueError("which must be 'F' or 'f'")


def F_upper(s: float) -> float:
    """Upper-bound sieve function F(s).

    Equals 2e^gamma on (0,1], 2e^gamma/s on [1,3], and the
    delay-differential extension above 3 (tabulated up to s = 11).
    """
    s = float(s)
    if not s > 0.0 or s > _F_TABLE_MAX + 1e-12:
        raise SieveDomainError(
            f"outside sieve domain: F is defined on (0, {_F_TABLE_MAX}], got s={s}"
        )
    return float(_F_many(np.asarray(s)))


def f_lower(s: float) -> float:
    """Lower-bound sieve function f(s).

    Equals 2e^gamma*log(s-1)/s on [2,4] and the delay-differential
    extension above 4 (tabulated up to s = 12).
    """
    s = float(s)
    if s < 2.0 - 1e-12 or s > _f_TABLE_MAX + 1e-12:
        raise SieveDomainError(
            f"outside sieve domain: f is defined on [2, {_f_TABLE_MAX}], got s={s}"
        )
    return float(_f_many(np.asarray(s)))


@dataclass(frozen=True)
class BoundFns:
    """Handle to the memoized F/f evaluators with extension-depth metadata."""

    step: float = _STEP
    max_depth: int = _DEPTH_LIMIT

    def F(self, s: float) -> float:
        return F_upper(s)

    def f(self, s: float) -> float:
        return f_lower(s)

    @staticmethod
    def depth(s: float, which: str) -> int:
        return recursion_depth(s, which)


# ---------------------------------------------------------------------------
# Vector combinations along the constraint line
# ---------------------------------------------------------------------------


def _line_optimize(
    objective: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    maximize: bool,
    coarse_step: float = 1e-3,
    golden_iters: int = 40,
) -> float:
    """Optimize a scalar objective on [lo, hi]: coarse grid, then golden refine."""
    if hi <= lo + 1e-15:
        return float(objective(np.asarray([lo]))[0])
    pts = np.arange(lo, hi, coarse_step)
    if pts[-1] < hi:
        pts = np.append(pts, hi)
    vals = objective(pts)
    k = int(np.argmax(vals) if maximize else np.argmin(vals))
    x1 = pts[max(0, k - 1)]
    x2 = pts[min(len(pts) - 1, k + 1)]

    def scalar(x: float) -> float:
        return float(objective(np.asarray([x]))[0])

    c = x2 - _GOLDEN * (x2 - x1)
    d = x1 + _GOLDEN * (x2 - x1)
    fc, fd = scalar(c), scalar(d)
    for _ in range(golden_iters):
        take_left = fc > fd if maximize else fc < fd
        if take_left:
            x2, d, fd = d, c, fc
            c = x2 - _GOLDEN * (x2 - x1)
            fc = scalar(c)
        else:
            x1, c, fc = c, d, fd
            d = x1 + _GOLDEN * (x2 - x1)
            fd = scalar(d)
    return scalar(0.5 * (x1 + x2))


def F_vec(
    sigma1: float,
    sigma2: float,
    coarse_step: float = 1e-3,
    golden_iters: int = 40,
) -> float:
    """inf of F(s1)F(s2) over s1/sigma1 + s2/sigma2 = 1 with s1, s2 >= 1."""
    sigma1, sigma2 = float(sigma1), float(sigma2)
    if sigma1 < 1.0 or sigma2 < 1.0:
        raise SieveDomainError(
            "outside sieve domain: F_vec requires sigma1, sigma2 >= 1"
        )
    if 1.0 / sigma1 + 1.0 / sigma2 > 1.0 + 1e-12:
        raise InfeasibleConstraintError(
            f"infeasible constraint: no (s1, s2) with s_i >= 1 on the line for "
            f"sigma=({sigma1}, {sigma2})"
        )
    hi = sigma1 * (1.0 - 1.0 / sigma2)
    b_hi = sigma2 * (1.0 - 1.0 / sigma1)
    if max(hi, b_hi) > _F_OPT_MAX + 1e-9:
        raise SieveDomainError(
            f"outside sieve domain: optimization would need F beyond s={_F_OPT_MAX} "
            f"(extension depth > {_DEPTH_LIMIT})"
        )

    def objective(a: np.ndarray) -> np.ndarray:
        b = sigma2 * (1.0 - a / sigma1)
        return _F_many(a) * _F_many(b)

    return _line_optimize(objective, 1.0, hi, maximize=False,
                          coarse_step=coarse_step, golden_iters=golden_iters)


def f_vec(
    sigma1: float,
    sigma2: float,
    coarse_step: float = 1e-3,
    golden_iters: int = 40,
) -> float:
    """sup of f(s1)F(s2) + f(s2)F(s1) - F(s1)F(s2) on the constraint line.

    The supremum runs over s1/sigma1 + s2/sigma2 = 1 with s1, s2 >= 2.
    """
    sigma1, sigma2 = float(sigma1), float(sigma2)
    if sigma1 < 2.0 or sigma2 < 2.0:
        raise SieveDomainError(
            "outside sieve domain: f_vec requires sigma1, sigma2 >= 2"
        )
    if 2.0 / sigma1 + 2.0 / sigma2 > 1.0 + 1e-12:
        raise InfeasibleConstraintError(
            f"infeasible constraint: no (s1, s2) with s_i >= 2 on the line for "
            f"sigma=({sigma1}, {sigma2})"
        )
    hi = sigma1 * (1.0 - 2.0 / sigma2)
    b_hi = sigma2 * (1.0 - 2.0 / sigma1)
    if max(hi, b_hi) > _F_OPT_MAX + 1e-9:
        raise SieveDomainError(
            f"outside sieve domain: optimization would need F beyond s={_F_OPT_MAX} "
            f"(extension depth > {_DEPTH_LIMIT})"
        )

    def objective(a: np.ndarray) -> np.ndarray:
        b = sigma2 * (1.0 - a / sigma1)
        Fa, Fb = _F_many(a), _F_many(b)
        return _f_many(a) * Fb + _f_many(b) * Fa - Fa * Fb

    return _line_optimize(objective, 2.0, hi, maximize=True,
                          coarse_step=coarse_step, golden_iters=golden_iters)


def _closed_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Uniform grid on [lo, hi] that never oversteps either endpoint."""
    if hi <= lo:
        return np.asarray([lo])
    pts = np.arange(lo, hi, step)
    return np.append(pts, hi)


def F_vec_oracle(sigma1: float, sigma2: float, step: float = 1e-4) -> float:
    """Dense-grid reference value for F_vec (no refinement)."""
    a = _closed_grid(1.0, sigma1 * (1.0 - 1.0 / sigma2), step)
    b = sigma2 * (1.0 - a / sigma1)
    return float(np.min(_F_many(a) * _F_many(b)))


def f_vec_oracle(sigma1: float, sigma2: float, step: float = 1e-4) -> float:
    """Dense-grid reference value for f_vec (no refinement)."""
    a = _closed_grid(2.0, sigma1 * (1.0 - 2.0 / sigma2), step)
    b = sigma2 * (1.0 - a / sigma1)
    Fa, Fb = _F_many(a), _F_many(b)
    return float(np.max(_f_many(a) * Fb + _f_many(b) * Fa - Fa * Fb))


def _F_vec_extended(
    sigma1: float, sigma2: float, coarse_step: float = 1e-3, golden_iters: int = 40
) -> float:
    """F_vec continued to infeasible arguments by the trivial bound F(1)^2.

    As the constraint line degenerates (1/sigma1 + 1/sigma2 -> 1) the
    feasible segment shrinks to s1 = s2 = 1, where the product equals
    F(1)^2 = (2e^gamma)^2; beyond that the same constant is used, which
    keeps the continuation continuous and monotone.
    """
    if min(sigma1, sigma2) < 1.0 or 1.0 / sigma1 + 1.0 / sigma2 > 1.0 + 1e-12:
        return TWO_E_GAMMA * TWO_E_GAMMA
    hi = sigma1 * (1.0 - 1.0 / sigma2)
    b_hi = sigma2 * (1.0 - 1.0 / sigma1)
    if max(hi, b_hi) > _F_OPT_MAX + 1e-9:
        raise SieveDomainError(
            f"outside sieve domain: optimization would need F beyond s={_F_OPT_MAX}"
        )

    def objective(a: np.ndarray) -> np.ndarray:
        b = sigma2 * (1.0 - a / sigma1)
        return _F_many(a) * _F_many(b)

    return _line_optimize(objective, 1.0, hi, maximize=False,
                          coarse_step=coarse_step, golden_iters=golden_iters)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _adaptive_simpson(
    fn: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-6,
    max_depth: int = 40,
    breakpoints: Iterable[float] = (),
) -> float:
    """Adaptive Simpson quadrature with pre-splitting at known kinks."""
    pts = sorted({a, b, *(t for t in breakpoints if a < t < b)})
    pieces = list(zip(pts[:-1], pts[1:]))
    piece_tol = tol / len(pieces)
    total = 0.0
    for lo, hi in pieces:
        fa, fm, fb = fn(lo), fn(0.5 * (lo + hi)), fn(hi)
        whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
        total += _simpson_recurse(fn, lo, hi, fa, fm, fb, whole, piece_tol, max_depth)
    return total


def _simpson_recurse(fn, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = fn(lm), fn(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth <= 0:
        raise QuadratureError("quadrature non-convergence")
    return _simpson_recurse(
        fn, a, m, fa, flm, fm, left, tol / 2.0, depth - 1
    ) + _simpson_recurse(fn, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _gauss_legendre(
    fn: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
) -> float:
    """Fixed-order Gauss-Legendre quadrature, piecewise between kinks.

    Used on smooth pieces during grid searches where adaptive error control
    would be wasteful; final reported values always go through
    :func:`_adaptive_simpson`.
    """
    pts = sorted({a, b, *(t for t in breakpoints if a < t < b)})
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        xs = mid + half * _GL_NODES
        total += half * float(
            np.dot(_GL_WEIGHTS, np.asarray([fn(x) for x in xs]))
        )
    return total


# ---------------------------------------------------------------------------
# Weighted sieve objectives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SieveParams:
    """Weighted-sieve parameters (all exponents of the census size x)."""

    lam: float
    delta1: float
    delta2: float
    theta1: float
    theta2: float
    alpha: float = 1 / 4.01

    def __post_init__(self):
        for field in ("lam", "delta1", "delta2", "theta1", "theta2", "alpha"):
            object.__setattr__(self, field, float(getattr(self, field)))
        for theta, delta in ((self.theta1, self.delta1), (self.theta2, self.delta2)):
            if not (0.0 < theta < delta < 1.0):
                raise SieveDomainError(
                    f"outside sieve domain: need 0 < theta < delta < 1, got "
                    f"theta={theta}, delta={delta}"
                )
        if self.lam < 0.0:
            raise SieveDomainError("outside sieve domain: lambda must be >= 0")
        if not (0.0 < self.alpha < 0.5):
            raise SieveDomainError("outside sieve domain: need 0 < alpha < 1/2")


def _weight_kinks(alpha: float, thetas: Sequence[float], extra: Sequence[float] = ()) -> list[float]:
    """Kink locations of t -> F-type((alpha-t)/theta): junctions and feasibility edges."""
    kinks = list(extra)
    for theta in thetas:
        for k in range(1, int(_TABLE_MAX) + 1):
            kinks.append(alpha - k * theta)
    return kinks


def H_combined(params: SieveParams, *, fast: bool = False) -> float:
    """Two-condition weighted sieve value.

    Computes ``f_vec(alpha/theta1, alpha/theta2) -
    lambda * sum_i I_i`` where ``I_i = integral over t in [theta_i, delta_i]
    of (1 - t/delta_i) * F_vec((alpha-t)/theta1, (alpha-t)/theta2) dt/t``.
    The integrand uses the continuous continuation of ``F_vec`` by the
    trivial bound F(1)^2 wherever the constraint line is infeasible.
    """
    a = params.alpha
    main = f_vec(a / params.theta1, a / params.theta2)
    if params.lam == 0.0:
        return main
    step, iters = (1e-2, 16) if fast else (1e-3, 40)
    kinks = _weight_kinks(
        a,
        (params.theta1, params.theta2),
        extra=[a - (params.theta1 + params.theta2)],
    )

    def integrand(t: float) -> float:
        value = _F_vec_extended(
            (a - t) / params.theta1,
            (a - t) / params.theta2,
            coarse_step=step,
            golden_iters=iters,
        )
        return value / t

    total = 0.0
    for theta, delta in (
        (params.theta1, params.delta1),
        (params.theta2, params.delta2),
    ):
        weighted = lambda t: (1.0 - t / delta) * integrand(t)
        if fast:
            total += _gauss_legendre(weighted, theta, delta, kinks)
        else:
            total += _adaptive_simpson(weighted, theta, delta, tol=1e-6, breakpoints=kinks)
    return main - params.lam * total


def G_weighted(theta: float, delta: float, lam: float, alpha: float,
               *, fast: bool = False) -> float:
    """Single-condition weighted sieve value.

    Computes ``f(alpha/theta) - lambda * integral over t in [theta, delta]
    of F((alpha-t)/theta) * (1 - t/delta) dt/t``.
    """
    theta, delta, lam, alpha = map(float, (theta, delta, lam, alpha))
    if not (0.0 < theta < delta):
        raise SieveDomainError(
            f"domain violation: need 0 < theta < delta, got theta={theta}, delta={delta}"
        )
    if alpha - delta <= 0.0:
        raise SieveDomainError(
            f"domain violation: need delta < alpha so the F argument stays "
            f"positive, got delta={delta}, alpha={alpha}"
        )
    if lam < 0.0:
        raise SieveDomainError("domain violation: lambda must be >= 0")
    main = f_lower(alpha / theta)
    if lam == 0.0:
        return main
    kinks = _weight_kinks(alpha, (theta,))

    def weighted(t: float) -> float:
        return float(_F_many(np.asarray((alpha - t) / theta))) * (1.0 - t / delta) / t

    if fast:
        integral = _gauss_legendre(weighted, theta, delta, kinks)
    else:
        integral = _adaptive_simpson(weighted, theta, delta, tol=1e-6, breakpoints=kinks)
    return main - lam * integral


# ---------------------------------------------------------------------------
# Bound table and parameter optimization
# ---------------------------------------------------------------------------

#: Published parameter choices certifying each almost-prime bound.
PUBLISHED_PARAMS: dict[str, dict] = {
    "CM-pair": {
        "lam": Fraction(10, 24),
        "delta1": Fraction(10, 42),
        "delta2": Fraction(10, 43),
        "theta1": Fraction(1, 30),
        "theta2": Fraction(1, 31),
        "alpha": Fraction(100, 401),
    },
    "CM-ell": {
        "theta": Fraction(1, 15),
        "delta": Fraction(10, 41),
        "lam": Fraction(10, 13),
        "alpha": Fraction(100, 401),
    },
    "CM-P5": {
        "theta": Fraction(1, 15),
        "delta": Fraction(10, 41),
        "lam": Fraction(10, 13),
        "alpha": Fraction(100, 401),
    },
    "nonCM-omega": {
        "theta": Fraction(1, 20),
        "delta": Fraction(10, 51),
        "lam": Fraction(10, 12),
        "alpha": Fraction(1, 5),
    },
    "nonCM-Omega": {
        "theta": Fraction(1, 20),
        "delta": Fraction(10, 81),
        "lam": Fraction(2, 1),
        "alpha": Fraction(1, 5),
    },
}

_CASES = tuple(PUBLISHED_PARAMS)


def _normalize_case(case: str) -> str:
    key = case.strip().replace("_", "-")
    # Exact match first: "nonCM-omega" and "nonCM-Omega" differ only in the
    # capitalization of omega, so a fully case-insensitive lookup is ambiguous.
    if key in _CASES:
        return key
    lowered = key.lower()
    matches = [name for name in _CASES if name.lower() == lowered]
    if len(matches) == 1:
        return matches[0]
    if len(matches) > 1:
        # The prefix is case-insensitive but the final token distinguishes
        # the two omega flavours, so match it exactly: "noncm-omega" means
        # the little-omega case and "noncm-Omega" the big-Omega one.
        tail = key.rsplit("-", 1)[-1]
        exact_tail = [name for name in matches if name.rsplit("-", 1)[-1] == tail]
        if len(exact_tail) == 1:
            return exact_tail[0]
        raise ValueError(
            f"ambiguous case {case!r}: matches {', '.join(matches)} "
            "(capitalization of the final token distinguishes them)"
        )
    raise ValueError(f"unknown case {case!r}; choose from {', '.join(_CASES)}")


def _check_ell(case: str, ell) -> int | None:
    if case in ("CM-ell", "nonCM-omega", "nonCM-Omega"):
        if ell is None or ell < 3 or not is_prime(ell):
            raise ValueError(f"ell must be an odd prime >= 3 for case {case}, got {ell}")
        return int(ell)
    if ell not in (None, 2):
        raise ValueError(f"case {case} does not take an ell parameter, got {ell}")
    return None


def _case_value(case: str) -> float:
    """Sieve value at the published parameters for ``case``."""
    p = PUBLISHED_PARAMS[case]
    if case == "CM-pair":
        return H_combined(
            SieveParams(
                lam=float(p["lam"]),
                delta1=float(p["delta1"]),
                delta2=float(p["delta2"]),
                theta1=float(p["theta1"]),
                theta2=float(p["theta2"]),
                alpha=float(p["alpha"]),
            )
        )
    return G_weighted(float(p["theta"]), float(p["delta"]), float(p["lam"]), float(p["alpha"]))


def _case_bound_formula(case: str, ell: int | None) -> int:
    """Exact-arithmetic floor of the published bound expression."""
    if case == "CM-ell":
        return math.floor(Fraction(41, 10) * (ell - 1) + Fraction(12, 10))
    if case == "CM-pair":
        p = PUBLISHED_PARAMS[case]
        return math.floor(1 / p["lam"] + 1 / p["delta1"] + 1 / p["delta2"])
    if case == "CM-P5":
        p = PUBLISHED_PARAMS[case]
        return math.floor(1 / p["lam"] + 1 / p["delta"])
    if case == "nonCM-omega":
        return math.floor(Fraction(51, 10) * (ell - 1) + Fraction(12, 10))
    if case == "nonCM-Omega":
        return math.floor(Fraction(81, 10) * (ell - 1) + Fraction(5, 10))
    raise ValueError(case)


def bound_table(case: str, ell: int | None = None) -> int:
    """Certified almost-prime bound for the given case.

    The bound is released only after the corresponding sieve value
    (H for the pair case, G otherwise) is checked to be positive at the
    published parameters; otherwise :class:`CertificationError` is raised.
    """
    case = _normalize_case(case)
    ell = _check_ell(case, ell)
    value = _case_value(case)
    if not value > 0.0:
        raise CertificationError(
            f"parameters do not certify bound: sieve value {value:.6g} <= 0 for {case}"
        )
    return _case_bound_formula(case, ell)


def case_report(case: str, ell: int | None = None) -> dict:
    """JSON-ready evaluation report: {case, params, value, tolerance, bound}."""
    case_name = _normalize_case(case)
    ell_checked = _check_ell(case_name, ell)
    params = {k: str(v) for k, v in PUBLISHED_PARAMS[case_name].items()}
    value = _case_value(case_name)
    certified = value > 0.0
    report = {
        "case": case_name,
        "ell": ell_checked,
        "params": params,
        "value": value,
        "tolerance": 5e-4 if case_name.startswith("CM") else 5e-3,
        "certified": certified,
        "bound": _case_bound_formula(case_name, ell_checked) if certified else None,
    }
    return report


def _certified_bound_single(
    case: str, k: int, theta: float, delta: float, alpha: float, fast: bool
) -> tuple[float, int] | None:
    """Largest-lambda certificate at (theta, delta): returns (lam, bound)."""
    try:
        main = f_lower(alpha / theta)
    except SieveDomainError:
        return None
    if main <= 0.0:
        return None
    kinks = _weight_kinks(alpha, (theta,))

    def weighted(t: float) -> float:
        return float(_F_many(np.asarray((alpha - t) / theta))) * (1.0 - t / delta) / t

    integral = (
        _gauss_legendre(weighted, theta, delta, kinks)
        if fast
        else _adaptive_simpson(weighted, theta, delta, tol=1e-6, breakpoints=kinks)
    )
    if integral <= 0.0:
        return None
    lam = (1.0 - 1e-6) * main / integral
    bound = math.floor(k / delta + 1.0 / lam)
    return lam, bound


def optimize_params(
    case: str, ell: int | None = None, alpha: float | None = None
) -> tuple[SieveParams, int]:
    """Search (theta, delta, lambda) minimizing the certified bound.

    For each grid point the optimal lambda is the largest one keeping the
    sieve value positive (the value is linear decreasing in lambda), and the
    reported bound is the floor expression at that lambda.  The published
    parameter point is always included in the grid.
    """
    case = _normalize_case(case)
    ell = _check_ell(case, ell)
    published = PUBLISHED_PARAMS[case]
    if alpha is None:
        alpha = float(published["alpha"])
    alpha = float(alpha)

    if case == "CM-pair":
        return _optimize_pair(alpha)

    k = (ell - 1) if ell is not None else 1
    delta_cap = {"CM-ell": 0.25, "CM-P5": 0.25, "nonCM-omega": 0.2, "nonCM-Omega": 0.125}[case]
    delta_cap = min(delta_cap, alpha) - 1e-9

    thetas = [alpha / s for s in np.linspace(2.2, 9.8, 14)]
    thetas.append(float(published["theta"]))
    best: tuple[int, float, float, float, float] | None = None
    for theta in thetas:
        deltas = list(np.linspace(theta * 1.5, delta_cap, 24))
        if float(published["delta"]) <= delta_cap:
            deltas.append(float(published["delta"]))
        for delta in deltas:
            if delta <= theta:
                continue
            cert = _certified_bound_single(case, k, theta, delta, alpha, fast=True)
            if cert is None:
                continue
            lam, bound = cert
            if best is None or bound < best[0]:
                best = (bound, lam, theta, delta, alpha)
    if best is None:
        raise InfeasibleConstraintError(f"empty feasible set for case {case}")
    bound, lam, theta, delta, alpha = best
    # Re-certify the winning point with the adaptive-quadrature evaluator.
    value = G_weighted(theta, delta, lam, alpha)
    if not value > 0.0:
        lam *= 0.999
        value = G_weighted(theta, delta, lam, alpha)
        bound = math.floor(k / delta + 1.0 / lam)
    if not value > 0.0:
        raise InfeasibleConstraintError(f"empty feasible set for case {case}")
    params = SieveParams(
        lam=lam, delta1=delta, delta2=delta, theta1=theta, theta2=theta, alpha=alpha
    )
    return params, bound


def _optimize_pair(alpha: float) -> tuple[SieveParams, int]:
    """Grid search for the two-condition case (symmetric theta and delta)."""
    published = PUBLISHED_PARAMS["CM-pair"]
    candidates: list[tuple[float, float, float, float]] = []
    for s in np.linspace(5.6, 9.8, 8):
        theta = alpha / s
        for delta in np.linspace(theta * 2.0, min(0.25, alpha) - 1e-9, 16):
            candidates.append((theta, theta, delta, delta))
    candidates.append(
        (
            float(published["theta1"]),
            float(published["theta2"]),
            float(published["delta1"]),
            float(published["delta2"]),
        )
    )
    best = None
    for theta1, theta2, delta1, delta2 in candidates:
        try:
            probe = SieveParams(
                lam=0.0, delta1=delta1, delta2=delta2,
                theta1=theta1, theta2=theta2, alpha=alpha,
            )
            main = H_combined(probe, fast=True)
        except (SieveDomainError, InfeasibleConstraintError):
            continue
        if main <= 0.0:
            continue
        lam_probe = SieveParams(
            lam=1.0, delta1=delta1, delta2=delta2,
            theta1=theta1, theta2=theta2, alpha=alpha,
        )
        integral_sum = main - H_combined(lam_probe, fast=True)
        if integral_sum <= 0.0:
            continue
        lam = (1.0 - 1e-6) * main / integral_sum
        bound = math.floor(1.0 / lam + 1.0 / delta1 + 1.0 / delta2)
        if best is None or bound < best[0]:
            best = (bound, lam, theta1, theta2, delta1, delta2)
    if best is None:
        raise InfeasibleConstraintError("empty feasible set for case CM-pair")
    bound, lam, theta1, theta2, delta1, delta2 = best
    params = SieveParams(
        lam=lam, delta1=delta1, delta2=delta2,
        theta1=theta1, theta2=theta2, alpha=alpha,
    )
    value = H_combined(params)
    if not value > 0.0:
        lam *= 0.999
        params = SieveParams(
            lam=lam, delta1=delta1, delta2=delta2,
            theta1=theta1, theta2=theta2, alpha=alpha,
        )
        value = H_combined(params)
        bound = math.floor(1.0 / lam + 1.0 / delta1 + 1.0 / delta2)
    if not value > 0.0:
        raise InfeasibleConstraintError("empty feasible set for case CM-pair")
    return params, bound


# ---------------------------------------------------------------------------
# Density functions
# ---------------------------------------------------------------------------


def _h_at_prime(p: int, in_first: bool, in_second: bool) -> Fraction:
    """Value of the two-variable density at (p^e1, p^e2), e_i in {0,1}."""
    if in_first and in_second:
        if p == 2 or p % 4 == 3:
            return Fraction(0)
        return Fraction(2, (p - 1) ** 2)
    if in_first or in_second:
        if p == 2:
            return Fraction(1, 2) if in_first else Fraction(0)
        if p % 4 == 1:
            return Fraction(2, p - 1) - Fraction(1, (p - 1) ** 2)
        return Fraction(1, p * p - 1)
    return Fraction(1)


def density_h(d1: int, d2: int) -> Fraction:
    """Two-variable multiplicative density on square-free pairs."""
    if d1 < 1 or d2 < 1:
        raise ValueError("d1, d2 must be positive")
    if not (is_squarefree(d1) and is_squarefree(d2)):
        return Fraction(0)
    value = Fraction(1)
    for p in set(factorize(d1)) | set(factorize(d2)):
        value *= _h_at_prime(p, d1 % p == 0, d2 % p == 0)
    return value


def density_g(ell: int, d: int) -> Fraction:
    """One-variable multiplicative density for divisibility of the degree-ell
    order ratio, supported on square-free d."""
    if not is_prime(ell):
        raise ValueError(f"ell must be prime, got {ell}")
    if d < 1:
        raise ValueError("d must be positive")
    if not is_squarefree(d):
        return Fraction(0)
    phi = ell - 1
    value = Fraction(1)
    for p in factorize(d):
        if p == 2 and ell != 2:
            return Fraction(0)
        if p == ell:
            if ell % 4 == 1:
                value *= Fraction(2, ell - 1) - Fraction(1, (ell - 1) ** 2)
            elif ell % 4 == 3:
                value *= Fraction(1, ell * ell - 1)
            else:  # ell == 2
                value *= Fraction(1, 2)
        elif p % 4 == 1 and p % ell == 1:
            value *= Fraction(2 * phi, p - 1) - Fraction(phi * phi, (p - 1) ** 2)
        elif p % 4 == 3 and (p * p - 1) % ell == 0:
            value *= Fraction(phi, p * p - 1)
        else:
            return Fraction(0)
    return value


def density_hstar(d: int) -> Fraction:
    """Multiplicative density with h*(p) = h(p,1) + h(1,p) - h(p,p)."""
    if d < 1:
        raise ValueError("d must be positive")
    if not is_squarefree(d):
        return Fraction(0)
    value = Fraction(1)
    for p in factorize(d):
        value *= (
            _h_at_prime(p, True, False)
            + _h_at_prime(p, False, True)
            - _h_at_prime(p, True, True)
        )
    return value


@dataclass(frozen=True)
class DensityFn:
    """Tagged multiplicative density: kind in {'pair', 'single', 'star'}."""

    kind: str
    ell: int | None = None

    def __post_init__(self):
        if self.kind not in ("pair", "single", "star"):
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "single" and self.ell is None:
            raise ValueError("kind 'single' requires ell")

    def __call__(self, *args: int) -> Fraction:
        if self.kind == "pair":
            (d1, d2) = args
            return density_h(d1, d2)
        if self.kind == "single":
            (d,) = args
            return density_g(self.ell, d)
        (d,) = args
        return density_hstar(d)


def linear_sieve_fit_L(
    density_at_prime: Callable[[int], Fraction], w: float, z: float
) -> float:
    """Smallest L with prod_{w<=p<z}(1-h(p))^-1 <= (log z/log w)(1 + L/log w)."""
    if not 2.0 <= w < z:
        raise ValueError("need 2 <= w < z")
    product = 1.0
    for p in sieve_primes(int(z) - 1):
        if p < w:
            continue
        factor = 1.0 - float(density_at_prime(int(p)))
        if factor <= 0.0:
            raise ValueError(f"density at p={p} is >= 1")
        product /= factor
    ratio = product / (math.log(z) / math.log(w))
    return (ratio - 1.0) * math.log(w)


# ---------------------------------------------------------------------------
# Euler products
# ---------------------------------------------------------------------------


def euler_product_report(
    which: str,
    cutoff: float,
    ell: int | None = None,
    i_q: Callable[[int], float] | float | None = None,
) -> dict:
    """Partial Euler product up to ``cutoff`` with a convergence indicator.

    ``which`` selects the product:

    * ``C_pair`` - the constant relating the two-variable density product
      to its one-dimensional normalization: factor 1/2 at p=2,
      1 - 2/(p^2-1) at p = 3 mod 4, 1 - (3p-1)/(p-1)^3 at p = 1 mod 4.
    * ``C_ell`` - the absolutely convergent part of the degree-``ell``
      density constant: (1 - g(ell)) times the product of
      1 - i(q)*(ell-1)/(q^2-1) over primes q = 3 mod 4 with q^2 = 1 mod ell.
      The arithmetic-progression Mertens normalization is not included.
      ``i_q`` optionally weights the factors with ell | q+1 (default 1).
    * ``V_ratio`` - prod_{p<cutoff, p = 1 mod 4} (1-1/p)^2 times log(cutoff);
      the returned value stabilizes as the cutoff grows.

    Exact rational factors are accumulated in floating point.  The report
    includes the magnitude of the last factor's deviation from 1.
    """
    if cutoff < 3:
        raise ValueError("cutoff must be >= 3")
    cutoff = int(cutoff)
    key = which.strip().lower().replace("-", "_")
    aliases = {"c_pair": "C_pair", "c_ell": "C_ell", "v_ratio": "V_ratio"}
    which = aliases.get(key, which)
    value = 1.0
    last_factor = Fraction(1)
    count = 0
    if which == "C_pair":
        for p in sieve_primes(cutoff):
            p = int(p)
            if p == 2:
                factor = Fraction(1, 2)
            elif p % 4 == 3:
                factor = 1 - Fraction(2, p * p - 1)
            else:
                factor = 1 - Fraction(3 * p - 1, (p - 1) ** 3)
            value *= float(factor)
            last_factor = factor
            count += 1
    elif which == "C_ell":
        if ell is None or not is_prime(ell) or ell < 3:
            raise ValueError("C_ell requires an odd prime ell")
        if i_q is None:
            i_fn = lambda q: 1.0
        elif callable(i_q):
            i_fn = i_q
        else:
            i_fn = lambda q, _v=float(i_q): _v
        g_ell = (
            Fraction(2, ell - 1) - Fraction(1, (ell - 1) ** 2)
            if ell % 4 == 1
            else Fraction(1, ell * ell - 1)
        )
        value = float(1 - g_ell)
        last_factor = 1 - g_ell
        count = 1
        for q in sieve_primes(cutoff):
            q = int(q)
            if q % 4 != 3 or (q * q - 1) % ell != 0:
                continue
            weight = i_fn(q) if (q + 1) % ell == 0 else 1.0
            factor = 1.0 - weight * (ell - 1) / (q * q - 1.0)
            value *= factor
            last_factor = Fraction(factor).limit_denominator(10**12)
            count += 1
    elif which == "V_ratio":
        for p in sieve_primes(cutoff - 1):
            p = int(p)
            if p % 4 != 1:
                continue
            factor = (1 - Fraction(1, p)) ** 2
            value *= float(factor)
            last_factor = factor
            count += 1
        value *= math.log(cutoff)
    else:
        raise ValueError(f"unknown product {which!r}; choose C_pair, C_ell, V_ratio")
    return {
        "which": which,
        "cutoff": cutoff,
        "ell": ell,
        "factors": count,
        "value": value,
        "last_factor_offset": abs(1.0 - float(last_factor)),
    }


def euler_product(
    which: str,
    cutoff: float,
    ell: int | None = None,
    i_q: Callable[[int], float] | float | None = None,
) -> float:
    """Value of :func:`euler_product_report` (see there for the factor tables)."""
    return euler_product_report(which, cutoff, ell=ell, i_q=i_q)["value"]


# ---------------------------------------------------------------------------
# Moebius inversion over pair multisets
# ---------------------------------------------------------------------------


def _squarefree_divisors_with_mu(d: int) -> list[tuple[int, int]]:
    divisors = [(1, 1)]
    for p in factorize(d):
        divisors += [(e * p, -mu) for e, mu in divisors]
    return divisors


def direct_pair_count(pairs: Iterable[tuple[int, int]], d1: int, d2: int) -> int:
    """#{(c1, c2) in pairs : d1 | c1 and d2 | c2} by direct scanning."""
    return sum(1 for c1, c2 in pairs if c1 % d1 == 0 and c2 % d2 == 0)


def mobius_pair_inversion(pairs: Sequence[tuple[int, int]], d1: int, d2: int) -> int:
    """Divisibility count recovered from coprimality counts.

    For square-free d1, d2:
    ``sum over k1|d1, k2|d2 of mu(k1) mu(k2) * #{(c1,c2): (c1,k1)=(c2,k2)=1}``
    equals the direct count of pairs with d1 | c1 and d2 | c2.
    """
    if d1 < 1 or d2 < 1 or not (is_squarefree(d1) and is_squarefree(d2)):
        raise ValueError("d1 and d2 must be positive square-free integers")
    pairs = list(pairs)
    total = 0
    for k1, mu1 in _squarefree_divisors_with_mu(d1):
        for k2, mu2 in _squarefree_divisors_with_mu(d2):
            coprime = sum(
                1
                for c1, c2 in pairs
                if math.gcd(c1, k1) == 1 and math.gcd(c2, k2) == 1
            )
            total += mu1 * mu2 * coprime
    return total
