"""Oscillator configuration, eigenfunctions and spectrum enumeration.

The operator is -Laplacian + V with V(x) = sum_i a_i^2 x_i^2. Its
eigenfunctions are indexed by multi-indices k in Z^n_{>=0}, with eigenvalue
sum_i a_i (2 k_i + 1); enumerating the spectrum up to lambda is lattice-point
enumeration in a simplex. All float comparisons against a spectral cutoff use
one canonical left-to-right summation order so that enumeration, counting and
degree bounds agree bit-for-bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .special import hermite_eval

__all__ = [
    "OscillatorConfig",
    "SpectrumEntry",
    "CapacityError",
    "eigenvalue",
    "eigenfunction_eval",
    "polynomial_part_eval",
    "enumerate_spectrum",
    "counting_function",
    "weyl_estimate",
    "max_degree",
    "degree_bound_continuous",
    "degree_bound_halfdim",
    "lambda_k_bound",
    "kth_eigenvalue",
    "lambda_cut_for_count",
]

MultiIndex = tuple[int, ...]

DEFAULT_ENUMERATION_BUDGET = 10**8


class CapacityError(RuntimeError):
    """Raised when an enumeration would exceed its entry budget."""

    def __init__(self, message: str, partial_count: int):
        super().__init__(message)
        self.partial_count = partial_count


@dataclass(frozen=True)
class OscillatorConfig:
    """Frequency coefficients a_1..a_n of the potential V(x) = sum a_i^2 x_i^2."""

    a: tuple[float, ...]
    n: int = 0
    a_min: float = 0.0
    a_sum: float = 0.0
    a_prod: float = 1.0

    def __init__(self, coefficients):
        a = tuple(float(c) for c in coefficients)
        if not 1 <= len(a) <= 10:
            raise ValueError(f"dimension must be in [1, 10], got {len(a)}")
        if any(not math.isfinite(c) or c <= 0.0 for c in a):
            raise ValueError(f"all coefficients must be positive and finite, got {a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "n", len(a))
        object.__setattr__(self, "a_min", min(a))
        object.__setattr__(self, "a_sum", math.fsum(a))
        object.__setattr__(self, "a_prod", reduce(lambda p, c: p * c, a, 1.0))


@dataclass(frozen=True)
class SpectrumEntry:
    """One basis eigenfunction: index, eigenvalue, degree and exact nodal count."""

    index: MultiIndex
    eigenvalue: float
    degree: int
    nodal_count: int


def _check_index(config: OscillatorConfig, index) -> MultiIndex:
    index = tuple(int(k) for k in index)
    if len(index) != config.n:
        raise ValueError(f"index has length {len(index)}, config dimension is {config.n}")
    if any(k < 0 for k in index):
        raise ValueError(f"multi-index entries must be nonnegative, got {index}")
    return index


def eigenvalue(config: OscillatorConfig, index) -> float:
    """Eigenvalue sum_i a_i (2 k_i + 1), accumulated in index order."""
    index = _check_index(config, index)
    total = 0.0
    for ai, ki in zip(config.a, index):
        total += ai * (2 * ki + 1)
    return total


def polynomial_part_eval(config: OscillatorConfig, index, x) -> float:
    """Polynomial factor prod_i H_{k_i}(sqrt(a_i) x_i) of the eigenfunction.

    Shares every sign change with the full eigenfunction (the Gaussian factor
    is strictly positive).
    """
    index = _check_index(config, index)
    if len(x) != config.n:
        raise ValueError(f"point has dimension {len(x)}, expected {config.n}")
    value = 1.0
    for ai, ki, xi in zip(config.a, index, x):
        value *= hermite_eval(ki, math.sqrt(ai) * xi)
    return value


def eigenfunction_eval(config: OscillatorConfig, index, x) -> float:
    """Eigenfunction value prod_i exp(-a_i x_i^2 / 2) H_{k_i}(sqrt(a_i) x_i)."""
    index = _check_index(config, index)
    if len(x) != config.n:
        raise ValueError(f"point has dimension {len(x)}, expected {config.n}")
    if any(abs(xi) > 50.0 for xi in x):
        raise ValueError("evaluation points are restricted to |x_i| <= 50")
    gauss_exp = 0.0
    for ai, xi in zip(config.a, x):
        gauss_exp += ai * xi * xi
    return math.exp(-0.5 * gauss_exp) * polynomial_part_eval(config, index, x)


def _last_axis_k_max(partial: float, ai: float, lam: float) -> int:
    """Largest k with partial + a_i (2k+1) <= lam under float semantics, or -1."""
    m = int(math.floor((lam - partial - ai) / (2.0 * ai)))
    if m < -1:
        m = -1
    while m >= 0 and partial + ai * (2 * m + 1) > lam:
        m -= 1
    while partial + ai * (2 * (m + 1) + 1) <= lam:
        m += 1
    return m


def counting_function(config: OscillatorConfig, lam: float) -> int:
    """N(lambda): number of multi-indices with eigenvalue <= lambda.

    Counts lattice points directly (no materialization); the innermost axis
    is closed-form with a rounding correction so the result matches
    enumerate_spectrum exactly.
    """
    a = config.a

    def rec(axis: int, partial: float) -> int:
        if axis == config.n - 1:
            return _last_axis_k_max(partial, a[axis], lam) + 1
        total = 0
        k = 0
        while True:
            sub = rec(axis + 1, partial + a[axis] * (2 * k + 1))
            if sub == 0:
                return total
            total += sub
            k += 1

    return rec(0, 0.0)


def _enumerate_prefixes(config: OscillatorConfig, lam: float):
    """Yield (prefix_index, partial_sum) over all feasible first n-1 axes."""
    a = config.a
    n = config.n

    def rec(axis: int, prefix: tuple[int, ...], partial: float):
        if axis == n - 1:
            yield prefix, partial
            return
        k = 0
        while True:
            p = partial + a[axis] * (2 * k + 1)
            # Feasible iff the all-zero extension fits.
            probe = p
            for j in range(axis + 1, n):
                probe += a[j]
            if probe > lam:
                return
            yield from rec(axis + 1, prefix + (k,), p)
            k += 1

    yield from rec(0, (), 0.0)


def _entries_for_prefix(config, prefix, partial, lam):
    ai = config.a[-1]
    m = _last_axis_k_max(partial, ai, lam)
    if m < 0:
        return []
    ks = np.arange(m + 1)
    eigs = partial + ai * (2 * ks + 1)
    base_degree = sum(prefix)
    base_count = 1
    for k in prefix:
        base_count *= k + 1
    return [
        SpectrumEntry(prefix + (int(k),), float(e), base_degree + int(k), base_count * (int(k) + 1))
        for k, e in zip(ks, eigs)
    ]


def enumerate_spectrum(
    config: OscillatorConfig,
    lambda_max: float,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    workers: int = 1,
) -> list[SpectrumEntry]:
    """All eigenfunctions with eigenvalue <= lambda_max.

    Sorted by (eigenvalue, lexicographic index); this total order is the
    package-wide definition of "the k-th eigenfunction" (k is 1-based).
    The outermost axis may be partitioned across workers; the sorted output
    is identical for every worker count.
    """
    total = counting_function(config, lambda_max)
    if total > budget:
        raise CapacityError(
            f"enumeration of {total} entries exceeds budget {budget}", partial_count=total
        )
    prefixes = list(_enumerate_prefixes(config, lambda_max))
    if workers > 1 and len(prefixes) > 1:
        chunks = np.array_split(np.arange(len(prefixes)), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            def run(chunk):
                out = []
                for i in chunk:
                    pfx, partial = prefixes[i]
                    out.extend(_entries_for_prefix(config, pfx, partial, lambda_max))
                return out

            parts = list(pool.map(run, chunks))
        entries = [e for part in parts for e in part]
    else:
        entries = []
        for pfx, partial in prefixes:
            entries.extend(_entries_for_prefix(config, pfx, partial, lambda_max))
    entries.sort(key=lambda e: (e.eigenvalue, e.index))
    return entries


def weyl_estimate(config: OscillatorConfig, lam: float) -> float:
    """Leading Weyl term lambda^n / (2^n n! prod a_i) for N(lambda)."""
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    n = config.n
    return lam**n / (2**n * math.factorial(n) * config.a_prod)


def max_degree(config: OscillatorConfig, lam: float) -> int:
    """Exact maximum of sum_i k_i over the simplex eigenvalue(k) <= lambda.

    Every unit of any k_j costs at least 2 a_min, so the optimum concentrates
    on a cheapest axis; the float boundary is settled with the canonical
    eigenvalue summation.
    """
    if lam < config.a_sum:
        raise ValueError(f"lambda {lam} is below the ground-state eigenvalue {config.a_sum}")
    axis = config.a.index(config.a_min)

    def unit_eig(m: int) -> float:
        idx = [0] * config.n
        idx[axis] = m
        return eigenvalue(config, idx)

    m = int(math.floor((lam - config.a_sum) / (2.0 * config.a_min)))
    if m < 0:
        m = 0
    while m > 0 and unit_eig(m) > lam:
        m -= 1
    while unit_eig(m + 1) <= lam:
        m += 1
    return m


def degree_bound_continuous(config: OscillatorConfig, lam: float) -> float:
    """Continuous degree bound (lambda - sum a_i) / (2 min a_i)."""
    return (lam - config.a_sum) / (2.0 * config.a_min)


def degree_bound_halfdim(config: OscillatorConfig, lam: float) -> float:
    """Degree bound variant (lambda - n/2) / (2 min a_i).

    Uses n/2 in place of the ground-state shift sum a_i; the two coincide
    exactly when sum a_i = n/2. Exposed for comparison only.
    """
    return (lam - config.n / 2.0) / (2.0 * config.a_min)


def lambda_k_bound(config: OscillatorConfig, k: int) -> float:
    """Leading-order bound k^{1/n} (2^n n! prod a_i)^{1/n} for the k-th eigenvalue."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    n = config.n
    return k ** (1.0 / n) * (2**n * math.factorial(n) * config.a_prod) ** (1.0 / n)


def lambda_cut_for_count(config: OscillatorConfig, k: int) -> float:
    """A lambda with N(lambda) >= k, close to the k-th eigenvalue from above."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    lam = lambda_k_bound(config, k) + config.a_sum
    while counting_function(config, lam) < k:
        lam *= 1.25
    return lam


def kth_eigenvalue(config: OscillatorConfig, k: int, *, budget: int = DEFAULT_ENUMERATION_BUDGET) -> float:
    """Eigenvalue of the k-th eigenfunction (1-based, package total order)."""
    lam = lambda_cut_for_count(config, k)
    entries = enumerate_spectrum(config, lam, budget=budget)
    return entries[k - 1].eigenvalue
