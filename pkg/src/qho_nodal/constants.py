"""Closed-form constants: the nodal-ratio bound gamma(n), unit-ball volumes,
Faber-Krahn and Milnor-type bounds, and the gamma/U comparison report.

gamma(n) = 2^{n-2} n^2 Gamma(n/2)^2 / j_{n/2-1}^n bounds limsup mu(f_k)/k in
dimension n; U(n) = n!/n^n is the exact limsup for rationally independent
coefficients. Everything here is assembled from the special-function kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy.integrate import quad

from .nodal import u_constant
from .oscillator import OscillatorConfig
from .special import bessel_first_zero, gamma_fn

__all__ = [
    "PleijelReport",
    "UnboundedBoundError",
    "gamma_pleijel",
    "unit_ball_volume",
    "faber_krahn_lower",
    "nodal_volume_lower",
    "annulus_volume",
    "pleijel_integral",
    "pleijel_integral_quadrature",
    "milnor_bound",
    "milnor_ball_bound",
    "milnor_sphere_bound",
    "asymptotic_ratio_lower",
    "gamma_u_report",
]


class UnboundedBoundError(ValueError):
    """The Faber-Krahn volume bound degenerates (denominator vanishes)."""


@dataclass(frozen=True)
class PleijelReport:
    """gamma(n) vs U(n) for one dimension, with the pieces they are built from."""

    n: int
    gamma: float
    u: Fraction
    ratio: float
    bessel_zero: float
    asymptotic_lower: float


@lru_cache(maxsize=64)
def gamma_pleijel(n: int) -> float:
    """The dimensional constant 2^{n-2} n^2 Gamma(n/2)^2 / j_{n/2-1}^n."""
    if not 2 <= n <= 50:
        raise ValueError(f"n must be in [2, 50], got {n}")
    j = bessel_first_zero(n / 2.0 - 1.0)
    return 2 ** (n - 2) * n**2 * gamma_fn(n / 2.0) ** 2 / j**n


def unit_ball_volume(n: int) -> float:
    """Volume pi^{n/2} / Gamma(n/2 + 1) of the unit ball in R^n."""
    if not 1 <= n <= 50:
        raise ValueError(f"n must be in [1, 50], got {n}")
    return math.pi ** (n / 2.0) / gamma_fn(n / 2.0 + 1.0)


def faber_krahn_lower(n: int, volume: float) -> float:
    """Lower bound (1/|Omega|)^{2/n} sigma_n^{2/n} j_{n/2-1}^2 for the first
    Dirichlet eigenvalue of a domain of the given volume."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if volume <= 0.0:
        raise ValueError(f"volume must be positive, got {volume}")
    j = bessel_first_zero(n / 2.0 - 1.0)
    return (1.0 / volume) ** (2.0 / n) * unit_ball_volume(n) ** (2.0 / n) * j * j


def nodal_volume_lower(config: OscillatorConfig, lam: float, i: int, M: int) -> float:
    """Minimum volume sigma_n j^n / (lambda - (i/M)^{2/n} lambda)^{n/2} of a
    nodal domain whose potential range stays below the (i/M)-shell cutoff.

    i = 0 is the no-inner-cutoff case (whole ellipsoid); i = M makes the
    denominator vanish and raises UnboundedBoundError.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not 0 <= i <= M:
        raise ValueError(f"i must be in [0, M], got i={i}, M={M}")
    if i == M:
        raise UnboundedBoundError(
            "volume lower bound is unbounded for the outermost shell (i = M)"
        )
    n = config.n
    j = bessel_first_zero(n / 2.0 - 1.0)
    denom = lam - (i / M) ** (2.0 / n) * lam
    return unit_ball_volume(n) * j**n / denom ** (n / 2.0)


def annulus_volume(config: OscillatorConfig, lam: float, M: int) -> float:
    """Volume sigma_n lambda^{n/2} / (M prod a_i) of each ellipsoidal shell.

    The shell radii are chosen as (i/M)^{1/n} sqrt(lambda), which makes all M
    shell volumes equal by construction.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    n = config.n
    return unit_ball_volume(n) * lam ** (n / 2.0) / (M * config.a_prod)


def pleijel_integral(n: int) -> float:
    """Closed form n^2 Gamma(n/2)^2 / (4 n!) of the shell-sum limit integral
    int_0^1 (1 - x^{2/n})^{n/2} dx."""
    if not 2 <= n <= 50:
        raise ValueError(f"n must be in [2, 50], got {n}")
    return n**2 * gamma_fn(n / 2.0) ** 2 / (4.0 * math.factorial(n))


def pleijel_integral_quadrature(n: int) -> float:
    """Adaptive quadrature of int_0^1 (1 - x^{2/n})^{n/2} dx.

    Independent cross-check for pleijel_integral.
    """
    if not 2 <= n <= 50:
        raise ValueError(f"n must be in [2, 50], got {n}")
    value, _ = quad(
        lambda x: (1.0 - x ** (2.0 / n)) ** (n / 2.0), 0.0, 1.0, epsabs=1e-12, epsrel=1e-12
    )
    return value


def milnor_bound(n: int, d: int) -> int:
    """G(n, d) = (2 + d)(1 + d)^{n-1}: components of a polynomial sublevel set
    {f >= 0} of degree d in the unit n-ball."""
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be >= 1, got n={n}, d={d}")
    return (2 + d) * (1 + d) ** (n - 1)


def milnor_ball_bound(n: int, d: int) -> int:
    """2 G(n, d): nodal domains of a degree-d polynomial in the unit n-ball."""
    return 2 * milnor_bound(n, d)


def milnor_sphere_bound(n: int, d: int) -> int:
    """2^{2n-1} d^{n-1}: nodal domains of the restriction of a degree-d
    polynomial to the unit sphere S^{n-1} (or any ellipsoid level set of V)."""
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be >= 1, got n={n}, d={d}")
    return 2 ** (2 * n - 1) * d ** (n - 1)


def asymptotic_ratio_lower(n: int) -> float:
    """Large-n comparison curve 2^{n-5/2} sqrt(pi n) e^{-2 sqrt(n)}.

    gamma(n)/U(n) exceeds this up to a 1 + o(1) factor as n grows.
    """
    return 2.0 ** (n - 2.5) * math.sqrt(math.pi * n) * math.exp(-2.0 * math.sqrt(n))


def gamma_u_report(n: int) -> PleijelReport:
    """Assemble gamma(n), U(n), their ratio and the asymptotic comparison."""
    if not 2 <= n <= 50:
        raise ValueError(f"n must be in [2, 50], got {n}")
    gamma = gamma_pleijel(n)
    # Same rational as u_constant, without its small-n domain cap.
    u = Fraction(math.factorial(n), n**n)
    return PleijelReport(
        n=n,
        gamma=gamma,
        u=u,
        ratio=gamma / float(u),
        bessel_zero=bessel_first_zero(n / 2.0 - 1.0),
        asymptotic_lower=asymptotic_ratio_lower(n),
    )
