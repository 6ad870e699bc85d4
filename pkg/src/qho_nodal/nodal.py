"""Exact nodal-domain counts and the spectral ratio experiment.

For rationally independent coefficients every eigenvalue is simple, each
eigenfunction is a product of one-variable polynomials times a Gaussian, and
its nodal-domain count is exactly prod_i (k_i + 1). This module computes those
counts, the lattice maximum mu_max over a spectral window, and the finite
surrogate of the limsup mu(f_k)/k whose limit is n!/n^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .oscillator import (
    DEFAULT_ENUMERATION_BUDGET,
    OscillatorConfig,
    counting_function,
    enumerate_spectrum,
    lambda_cut_for_count,
)

__all__ = [
    "RatioSeries",
    "exact_nodal_count",
    "continuous_sup",
    "mu_max",
    "ratio_experiment",
    "u_constant",
]

# Relative gap under which two eigenvalues are treated as degenerate.
DEGENERACY_RTOL = 1e-9


def exact_nodal_count(index) -> int:
    """Nodal-domain count prod_i (k_i + 1) of a product eigenfunction.

    Exact integer arithmetic; never wraps (Python integers widen).
    """
    count = 1
    for k in index:
        k = int(k)
        if k < 0:
            raise ValueError(f"multi-index entries must be nonnegative, got {index}")
        count *= k + 1
    return count


def continuous_sup(config: OscillatorConfig, lam: float) -> float:
    """sup of prod_i k_i over real k_i >= 0 with sum_i a_i k_i <= lambda.

    Equals lambda^n / (n^n prod a_i): the supremum splits the budget evenly
    across coordinates (log-concavity).
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    n = config.n
    return lam**n / (n**n * config.a_prod)


def mu_max(
    config: OscillatorConfig,
    lam: float,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> int:
    """Exact maximum of prod_i (k_i + 1) over eigenvalue(k) <= lambda.

    Depth-first search over the simplex; subtrees are pruned with the
    continuous supremum bound on the remaining coordinates.
    """
    if lam < config.a_sum:
        raise ValueError(f"lambda {lam} is below the ground-state eigenvalue {config.a_sum}")
    total = counting_function(config, lam)
    if total > budget:
        from .oscillator import CapacityError

        raise CapacityError(f"mu_max over {total} lattice points exceeds budget {budget}", total)

    a = config.a
    n = config.n
    tail_prod = [1.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail_prod[i] = tail_prod[i + 1] * a[i]
    tail_sum = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail_sum[i] = tail_sum[i + 1] + a[i]

    best = 0

    def tail_bound(axis: int, residual: float) -> float:
        # Continuous sup of prod (k_j + 1) over sum_{j>=axis} a_j (2k_j+1) <= residual,
        # via m_j = k_j + 1: sup prod m_j with sum 2 a_j m_j <= residual + tail_sum.
        m = n - axis
        budget_m = residual + tail_sum[axis]
        if budget_m <= 0.0:
            return 0.0
        return (budget_m / (2.0 * m)) ** m / tail_prod[axis] * (1.0 + 1e-12)

    def rec(axis: int, partial: float, prod: int):
        nonlocal best
        if axis == n - 1:
            ai = a[axis]
            m = int(math.floor((lam - partial - ai) / (2.0 * ai)))
            while m >= 0 and partial + ai * (2 * m + 1) > lam:
                m -= 1
            while partial + ai * (2 * (m + 1) + 1) <= lam:
                m += 1
            if m >= 0:
                cand = prod * (m + 1)
                if cand > best:
                    best = cand
            return
        if prod * tail_bound(axis, lam - partial) <= best:
            return
        k = 0
        while True:
            p = partial + a[axis] * (2 * k + 1)
            probe = p
            for j in range(axis + 1, n):
                probe += a[j]
            if probe > lam:
                return
            rec(axis + 1, p, prod * (k + 1))
            k += 1

    rec(0, 0.0, 1)
    return best


@dataclass
class RatioSeries:
    """Nodal-count ratios mu(f_k)/k over the first k_max eigenfunctions.

    Parallel arrays over k = 1..k_max plus windowed tail maxima
    max_{k in [K/2, K]} ratio for K on a geometric ladder. degenerate is set
    when two consecutive eigenvalues agree to relative 1e-9 (the counts then
    depend on the lexicographic tie order).
    """

    ks: np.ndarray
    eigenvalues: np.ndarray
    nodal_counts: np.ndarray
    ratios: np.ndarray
    tail_maxima: list[tuple[int, float]] = field(default_factory=list)
    degenerate: bool = False


def ratio_experiment(
    config: OscillatorConfig,
    k_max: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> RatioSeries:
    """Ratios mu(f_k)/k for the first k_max eigenfunctions in spectral order.

    Callers assert rational independence of the coefficients; the experiment
    cannot verify it and instead flags numerically degenerate spectra.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be positive, got {k_max}")
    lam = lambda_cut_for_count(config, k_max)
    entries = enumerate_spectrum(config, lam, budget=budget)[:k_max]

    ks = np.arange(1, k_max + 1)
    eigs = np.array([e.eigenvalue for e in entries])
    counts = np.array([e.nodal_count for e in entries], dtype=np.int64)
    ratios = counts / ks

    gaps = np.diff(eigs)
    scale = np.maximum(np.abs(eigs[:-1]), np.abs(eigs[1:]))
    degenerate = bool(np.any(gaps <= DEGENERACY_RTOL * scale)) if k_max > 1 else False

    tail = []
    K = k_max
    while K >= 2:
        lo = K // 2
        window = ratios[lo - 1 : K]
        tail.append((K, float(window.max())))
        K //= 2
    if k_max == 1:
        tail.append((1, float(ratios[0])))

    return RatioSeries(
        ks=ks,
        eigenvalues=eigs,
        nodal_counts=counts,
        ratios=ratios,
        tail_maxima=tail,
        degenerate=degenerate,
    )


def u_constant(n: int) -> Fraction:
    """Exact rational n! / n^n, the limsup of mu(f_k)/k for simple spectra."""
    if not 1 <= n <= 30:
        raise ValueError(f"n must be in [1, 30], got {n}")
    return Fraction(math.factorial(n), n**n)
