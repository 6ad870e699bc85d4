"""Self-contained special-function kernel.

Provides exactly what the rest of the package needs: physicists' Hermite
polynomials (values, integer coefficients, zeros), the Gamma function on the
positive axis, Bessel functions of the first kind by power series, and the
first positive Bessel zero. Everything is pure and stateless.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

__all__ = [
    "hermite_eval",
    "hermite_eval_scaled",
    "hermite_coefficients",
    "hermite_zeros",
    "gamma_fn",
    "bessel_j",
    "bessel_first_zero",
    "bessel_zero_bracket",
]

# Rescale the two-term recurrence state once |H_m| exceeds this, so that the
# sign stays exact for orders far beyond float64 range.
_RESCALE_LIMIT = 2.0**512
_RESCALE_STEP = -512

_MAX_HERMITE_ORDER = 10**5


def _recurrence_state(order: int, x: float) -> tuple[float, int]:
    """Run the Hermite recurrence, returning (mantissa, base-2 exponent)."""
    if order == 0:
        return 1.0, 0
    h_prev = 1.0  # H_0
    h_cur = 2.0 * x  # H_1
    exp2 = 0
    for m in range(1, order):
        h_next = 2.0 * x * h_cur - 2.0 * m * h_prev
        h_prev, h_cur = h_cur, h_next
        a = abs(h_cur)
        b = abs(h_prev)
        if a > _RESCALE_LIMIT or b > _RESCALE_LIMIT:
            h_prev = math.ldexp(h_prev, _RESCALE_STEP)
            h_cur = math.ldexp(h_cur, _RESCALE_STEP)
            exp2 -= _RESCALE_STEP
    return h_cur, exp2


def hermite_eval(order: int, x: float) -> float:
    """Evaluate the physicists' Hermite polynomial H_order at x.

    Forward recurrence H_{m+1} = 2x H_m - 2m H_{m-1} with internal base-2
    rescaling, so the sign is exact for any order up to 1e5 even when the
    magnitude overflows float64 (the returned float is then +-inf).
    """
    if order < 0 or order > _MAX_HERMITE_ORDER:
        raise ValueError(f"order must be in [0, {_MAX_HERMITE_ORDER}], got {order}")
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    mantissa, exp2 = _recurrence_state(order, x)
    try:
        return math.ldexp(mantissa, exp2)
    except OverflowError:
        return math.inf if mantissa > 0 else -math.inf


def hermite_eval_scaled(order: int, x: float) -> tuple[float, int]:
    """Like hermite_eval but returns (mantissa, exp2) with value = mantissa * 2**exp2."""
    if order < 0 or order > _MAX_HERMITE_ORDER:
        raise ValueError(f"order must be in [0, {_MAX_HERMITE_ORDER}], got {order}")
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return _recurrence_state(order, x)


@lru_cache(maxsize=64)
def hermite_coefficients(order: int) -> tuple[int, ...]:
    """Exact integer coefficients of H_order, lowest degree first.

    Supported for order <= 30; used as the cross-check oracle for the
    recurrence evaluation.
    """
    if order < 0 or order > 30:
        raise ValueError(f"coefficient expansion supported for order <= 30, got {order}")
    if order == 0:
        return (1,)
    prev = (1,)
    cur = (0, 2)
    for m in range(1, order):
        shifted = (0,) + cur  # 2x * H_m, the 2 applied below
        nxt = [2 * c for c in shifted]
        for i, c in enumerate(prev):
            nxt[i] -= 2 * m * c
        prev, cur = cur, tuple(nxt)
    return cur


def _hermite_sign(order: int, x: float) -> int:
    mantissa, _ = _recurrence_state(order, x)
    if mantissa > 0.0:
        return 1
    if mantissa < 0.0:
        return -1
    return 0


def hermite_zeros(order: int) -> list[float]:
    """All real zeros of H_order, strictly increasing, symmetric about 0.

    Seeds from the eigenvalues of the Jacobi matrix of the orthonormalized
    recurrence, then certifies each zero by bisection on the sign of the
    scaled recurrence down to an interval of width 1e-13.
    """
    if order < 0 or order > 200:
        raise ValueError(f"order must be in [0, 200], got {order}")
    if order == 0:
        return []
    if order == 1:
        return [0.0]

    off = np.sqrt(np.arange(1, order) / 2.0)
    jac = np.diag(off, 1) + np.diag(off, -1)
    seeds = np.sort(np.linalg.eigvalsh(jac))

    # Brackets: midpoints between consecutive seeds, plus an outer bound that
    # safely contains every zero of H_order.
    outer = math.sqrt(2.0 * order + 1.0)
    edges = [-outer]
    edges.extend(float(0.5 * (seeds[i] + seeds[i + 1])) for i in range(order - 1))
    edges.append(outer)

    zeros = []
    for i in range(order):
        lo, hi = edges[i], edges[i + 1]
        s_lo = _hermite_sign(order, lo)
        s_hi = _hermite_sign(order, hi)
        if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
            raise ArithmeticError(f"zero bracket failed for order {order} at index {i}")
        while hi - lo > 1e-13:
            mid = 0.5 * (lo + hi)
            s_mid = _hermite_sign(order, mid)
            if s_mid == 0:
                lo = hi = mid
                break
            if s_mid == s_lo:
                lo = mid
            else:
                hi = mid
        zeros.append(0.5 * (lo + hi))

    # Enforce exact symmetry about the origin.
    sym = [0.5 * (zeros[i] - zeros[order - 1 - i]) for i in range(order)]
    if order % 2 == 1:
        sym[order // 2] = 0.0
    return sym


# Lanczos approximation, g = 7, 9 coefficients (double-precision standard set).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos_series(x: float) -> float:
    acc = _LANCZOS_COEF[0]
    for i in range(1, 9):
        acc += _LANCZOS_COEF[i] / (x + i)
    return acc


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0 (domain capped at 200).

    Lanczos rational approximation; evaluated in log space above x = 20 to
    avoid intermediate overflow. Values above x ~ 171.62 exceed float64 range
    and come back as +inf.
    """
    if not (x > 0.0):
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    if x > 200.0:
        raise ValueError(f"gamma_fn domain capped at 200, got {x}")
    if x < 0.5:
        # Reflection keeps the series argument >= 0.5.
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    series = _lanczos_series(z)
    if x < 20.0:
        return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * series
    log_gamma = (
        0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(series)
    )
    try:
        return math.exp(log_gamma)
    except OverflowError:
        return math.inf


def _bessel_series_float(nu: float, x: float) -> float:
    half = 0.5 * x
    term = half**nu / gamma_fn(nu + 1.0)
    total = term
    hsq = half * half
    m = 0
    while True:
        m += 1
        term = -term * hsq / (m * (m + nu))
        total += term
        if abs(term) < 1e-18 * abs(total) and m > 4:
            return total
        if m > 10 * x + 400:
            raise ArithmeticError(f"Bessel series failed to converge for nu={nu}, x={x}")


def _bessel_series_mp(nu: float, x: float) -> float:
    # The alternating series cancels catastrophically for x >> nu; carry
    # enough working digits to absorb the largest term.
    dps = 25 + int(0.45 * x)
    with mpmath.workdps(dps):
        half = mpmath.mpf(x) / 2
        nu_mp = mpmath.mpf(nu)
        term = half**nu_mp / mpmath.gamma(nu_mp + 1)
        total = term
        hsq = half * half
        m = 0
        while True:
            m += 1
            term = -term * hsq / (m * (m + nu_mp))
            total += term
            if abs(term) < mpmath.mpf("1e-30") * (abs(total) + mpmath.mpf("1e-30")) and m > 4:
                return float(total)
            if m > 10 * x + 400:
                raise ArithmeticError(f"Bessel series failed to converge for nu={nu}, x={x}")


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind J_nu(x) by power series.

    Valid for 0 <= nu <= 50 and 0 <= x <= 100; absolute accuracy 1e-12. The
    series runs in float64 while cancellation is mild and switches to a
    high-precision accumulator for x beyond max(12, nu).
    """
    if not (0.0 <= nu <= 50.0):
        raise ValueError(f"nu must be in [0, 50], got {nu}")
    if not (0.0 <= x <= 100.0):
        raise ValueError(f"x must be in [0, 100], got {x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if x <= 12.0 or x <= nu:
        return _bessel_series_float(nu, x)
    return _bessel_series_mp(nu, x)


def bessel_zero_bracket(nu: float) -> tuple[float, float]:
    """Open interval guaranteed to contain the first zero j_nu.

    For nu > 0 this is sqrt(nu(nu+2)) < j_nu < sqrt(nu+1)(sqrt(nu+2)+1);
    for nu = 0 the interval [2, 3] works.
    """
    if nu < 0.0:
        raise ValueError(f"nu must be nonnegative, got {nu}")
    if nu == 0.0:
        return 2.0, 3.0
    lo = math.sqrt(nu * (nu + 2.0))
    hi = math.sqrt(nu + 1.0) * (math.sqrt(nu + 2.0) + 1.0)
    return lo, hi


@lru_cache(maxsize=256)
def bessel_first_zero(nu: float) -> float:
    """First positive zero j_nu of J_nu, to absolute accuracy 1e-10.

    Bisection on the power-series evaluation, seeded from the bracket of
    bessel_zero_bracket (J_nu is positive below j_nu and negative between the
    first and second zero, and the bracket stays inside that range).
    """
    if not (0.0 <= nu <= 50.0):
        raise ValueError(f"nu must be in [0, 50], got {nu}")
    lo, hi = bessel_zero_bracket(nu)
    f_lo = bessel_j(nu, lo)
    f_hi = bessel_j(nu, hi)
    if not (f_lo > 0.0 > f_hi):
        raise ArithmeticError(f"first-zero bracket failed for nu={nu}")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j(nu, mid)
        if f_mid > 0.0:
            lo = mid
        elif f_mid < 0.0:
            hi = mid
        else:
            return mid
    return 0.5 * (lo + hi)


def gamma_half_integer(twice_x: int) -> float:
    """Exact-ladder Gamma(twice_x / 2) for positive integer twice_x.

    Used as the test oracle for gamma_fn: climbs Gamma(x+1) = x Gamma(x) in
    exact rational arithmetic from Gamma(1/2) = sqrt(pi) or Gamma(1) = 1.
    """
    if twice_x <= 0:
        raise ValueError("twice_x must be positive")
    if twice_x % 2 == 0:
        return float(math.factorial(twice_x // 2 - 1))
    ladder = Fraction(1)
    k = Fraction(1, 2)
    while k < Fraction(twice_x, 2):
        ladder *= k
        k += 1
    return float(ladder) * math.sqrt(math.pi)
