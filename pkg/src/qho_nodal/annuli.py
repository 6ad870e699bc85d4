"""Generalized-annulus partition and the two-way nodal-domain count.

The classically allowed ellipsoid {V <= lambda} is split into M shells of
equal volume (boundary values v_i = (i/M)^{2/n} lambda). Every nodal domain
either stays inside one shell (class A_i, bounded through Faber-Krahn by the
shell volume over the minimum domain volume) or crosses a shell boundary
(class B_j, bounded through the restriction-to-ellipsoid polynomial bound).
Summing both bounds and letting M grow slower than k^{1/n} yields the
dimensional constant gamma(n) as the asymptotic bound on mu(f_k)/k.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

from .constants import gamma_pleijel, unit_ball_volume
from .grid import Combination, NodalCountResult
from .nodal import exact_nodal_count
from .oscillator import (
    DEFAULT_ENUMERATION_BUDGET,
    OscillatorConfig,
    enumerate_spectrum,
    lambda_cut_for_count,
    max_degree,
)
from .special import bessel_first_zero

__all__ = [
    "AnnulusPartition",
    "ComponentClass",
    "Classification",
    "ClassificationError",
    "CertificateError",
    "PleijelCertificate",
    "choose_M",
    "build_partition",
    "classify",
    "card_Ai_bound",
    "interior_bound_sum",
    "crossers_bound",
    "riemann_shell_sum",
    "pleijel_certificate",
]


class ClassificationError(RuntimeError):
    """A component could not be placed in any shell or boundary class."""


class CertificateError(RuntimeError):
    """A certified count exceeded its assembled upper bound."""


@dataclass(frozen=True)
class AnnulusPartition:
    """Shell boundaries v_0 = 0 < v_1 < ... < v_M = lambda of the potential.

    v_i = (i/M)^{2/n} lambda; the ellipsoid shells {v_{i-1} <= V < v_i} all
    have volume sigma_n lambda^{n/2} / (M prod a_j).
    """

    config: OscillatorConfig
    lam: float
    M: int
    inner_values: tuple[float, ...]

    def shell_volume(self, i: int) -> float:
        """Volume of the i-th shell (i = 1..M), from the boundary values."""
        if not 1 <= i <= self.M:
            raise ValueError(f"shell index must be in [1, M], got {i}")
        n = self.config.n
        sigma = unit_ball_volume(n)
        lo, hi = self.inner_values[i - 1], self.inner_values[i]
        return sigma * (hi ** (n / 2.0) - lo ** (n / 2.0)) / self.config.a_prod


@dataclass(frozen=True)
class ComponentClass:
    """Classification of one nodal component: interior of shell `shell`, or a
    crosser of the boundaries listed in `crossed`."""

    kind: str  # "interior" | "crosser"
    shell: int | None = None
    crossed: tuple[int, ...] = ()


@dataclass
class Classification:
    """Per-component classes plus the interior/crosser totals."""

    components: list[ComponentClass]
    interior_count: int
    crosser_count: int
    resolution: int


def choose_M(k: int, n: int) -> int:
    """Number of shells for the k-th eigenfunction: ceil(k^{1/(2n)}).

    Grows without bound but slower than k^{1/n}, balancing the interior and
    crosser terms. Settled in integer arithmetic (no float boundary slop).
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    m = max(1, int(math.ceil(k ** (1.0 / (2 * n)))))
    while m > 1 and (m - 1) ** (2 * n) >= k:
        m -= 1
    while m ** (2 * n) < k:
        m += 1
    return m


def build_partition(config: OscillatorConfig, lam: float, M: int) -> AnnulusPartition:
    """Shell boundaries v_i = (i/M)^{2/n} lambda for i = 0..M."""
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    n = config.n
    values = tuple((i / M) ** (2.0 / n) * lam for i in range(M + 1))
    return AnnulusPartition(config=config, lam=lam, M=M, inner_values=values)


def classify(
    partition: AnnulusPartition, result: NodalCountResult, comb: Combination
) -> Classification:
    """Place every grid-detected component in a shell or a crosser class.

    A component whose sampled potential range [min V, max V] fits inside one
    half-open shell [v_{i-1}, v_i) is interior(i); otherwise it crosses every
    boundary v_j inside that range. Ranges come from cell centers, so a
    component grazing a boundary within one cell can be misclassified as
    interior; the stored resolution makes that auditable.
    """
    if result.labels is None or result.v_min is None or result.v_max is None:
        raise ValueError("result carries no label grid (grid method required)")
    if comb.config is not partition.config and comb.config.a != partition.config.a:
        raise ValueError("partition and combination configs differ")
    values = list(partition.inner_values)
    M = partition.M
    components: list[ComponentClass] = []
    interior = 0
    crossers = 0
    for c in range(result.count):
        lo = float(result.v_min[c])
        hi = float(result.v_max[c])
        pos = bisect.bisect_right(values, lo)  # v_{pos-1} <= lo < v_pos
        if pos > M:
            raise ClassificationError(
                f"component {c + 1} lies entirely beyond the outermost boundary "
                f"(min V = {lo} > lambda = {partition.lam})"
            )
        if hi < values[pos]:
            components.append(ComponentClass(kind="interior", shell=pos))
            interior += 1
        else:
            crossed = tuple(j for j in range(1, M + 1) if lo <= values[j] <= hi)
            components.append(ComponentClass(kind="crosser", crossed=crossed))
            crossers += 1
    result.crossing_flags = [list(c.crossed) for c in components]
    return Classification(
        components=components,
        interior_count=interior,
        crosser_count=crossers,
        resolution=result.resolution,
    )


def card_Ai_bound(config: OscillatorConfig, lam: float, M: int, i: int) -> float:
    """Upper bound lambda^n (1 - (i/M)^{2/n})^{n/2} / (j^n M prod a) on the
    number of nodal domains interior to shell i.

    Vanishes at i = M: the outermost shell carries no Faber-Krahn bound (its
    volume lower bound diverges) and is excluded from interior sums.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not 1 <= i <= M:
        raise ValueError(f"i must be in [1, M], got i={i}, M={M}")
    n = config.n
    if i == M:
        return 0.0
    j = bessel_first_zero(n / 2.0 - 1.0)
    return lam**n * (1.0 - (i / M) ** (2.0 / n)) ** (n / 2.0) / (j**n * M * config.a_prod)


def interior_bound_sum(config: OscillatorConfig, lam: float, M: int) -> float:
    """Sum of card_Ai_bound over all shells i = 1..M."""
    return sum(card_Ai_bound(config, lam, M, i) for i in range(1, M + 1))


def crossers_bound(
    config: OscillatorConfig,
    k: int,
    M: int,
    *,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> int:
    """Bound M 2^{2n-1} deg(f_k)^{n-1} on the number of boundary crossers.

    Each level set {V = v_j} is an ellipsoid; the restriction of a degree-d
    polynomial to it has at most 2^{2n-1} d^{n-1} nodal domains, and there are
    M boundaries. Uses the exact integer degree maximum at the k-th
    eigenvalue.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    lam_k = _kth_eigenvalue_cached(config, k, budget)
    d = max_degree(config, lam_k)
    n = config.n
    return M * 2 ** (2 * n - 1) * d ** (n - 1)


def riemann_shell_sum(n: int, M: int) -> float:
    """Right-endpoint Riemann sum (1/M) sum_{i=1}^M (1 - (i/M)^{2/n})^{n/2}.

    Converges to the closed-form integral of pleijel_integral as M grows.
    """
    if n < 2 or M < 1:
        raise ValueError(f"need n >= 2 and M >= 1, got n={n}, M={M}")
    return sum((1.0 - (i / M) ** (2.0 / n)) ** (n / 2.0) for i in range(1, M + 1)) / M


@dataclass(frozen=True)
class PleijelCertificate:
    """Assembled two-way bound for the k-th eigenfunction."""

    n: int
    k: int
    lambda_k: float
    m: int
    mu: int
    mu_over_k: float
    gamma: float
    interior_bound_sum: float
    crossers_bound: int
    total_bound: float
    total_over_k: float
    mu_within_bound: bool


def _kth_eigenvalue_cached(config: OscillatorConfig, k: int, budget: int) -> float:
    lam = lambda_cut_for_count(config, k)
    entries = enumerate_spectrum(config, lam, budget=budget)
    return entries[k - 1].eigenvalue


def pleijel_certificate(
    config: OscillatorConfig,
    k: int,
    counts=None,
    *,
    m_override: int | None = None,
    classification: Classification | None = None,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> PleijelCertificate:
    """Assemble the two-way bound report for the k-th eigenfunction.

    counts may supply nodal counts for the first k eigenfunctions (grid or
    exact); when omitted the exact product counts are used. When a
    classification of the k-th grid result is supplied, mu <= total_bound is
    enforced (CertificateError on violation); otherwise it is only reported.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    lam_cut = lambda_cut_for_count(config, k)
    entries = enumerate_spectrum(config, lam_cut, budget=budget)[:k]
    lam_k = entries[-1].eigenvalue
    if counts is None:
        mu = exact_nodal_count(entries[-1].index)
    else:
        if len(counts) < k:
            raise ValueError(f"need counts for the first {k} eigenfunctions, got {len(counts)}")
        mu = int(counts[k - 1])
    n = config.n
    m = m_override if m_override is not None else choose_M(k, n)
    if m < 1:
        raise ValueError(f"M must be >= 1, got {m}")
    interior = interior_bound_sum(config, lam_k, m)
    crossers = m * 2 ** (2 * n - 1) * max_degree(config, lam_k) ** (n - 1)
    total = interior + crossers
    within = mu <= total
    if classification is not None and not within:
        raise CertificateError(
            f"classified count mu={mu} exceeds the assembled bound {total} at k={k}"
        )
    return PleijelCertificate(
        n=n,
        k=k,
        lambda_k=lam_k,
        m=m,
        mu=mu,
        mu_over_k=mu / k,
        gamma=gamma_pleijel(n) if n >= 2 else float("nan"),
        interior_bound_sum=interior,
        crossers_bound=crossers,
        total_bound=total,
        total_over_k=total / k,
        mu_within_bound=within,
    )
