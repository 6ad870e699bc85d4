"""Grid-based nodal-domain counting for linear combinations of eigenfunctions.

Degenerate eigenspaces force us beyond product states: a combination's nodal
set is no longer a grid of hyperplanes. This module samples the sign of the
combination's polynomial part on a rectilinear grid of cell centers, labels
same-sign face-adjacent cells (union-find), and counts components, refining
the grid until the count stabilizes.

Counting the polynomial part instead of the full eigenfunction leaves the
nodal set unchanged (the Gaussian factor is positive) and avoids underflow far
from the origin. The box is finite: unbounded nodal domains are counted by
their restriction to the box. With the default margin the box contains the
classically allowed ellipsoid, so every nodal domain is visible, but distinct
unbounded domains could in principle merge outside the box; results carry
box metadata so this convention is auditable.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from ._kernels import (
    SIGN_THRESHOLD,
    component_stats,
    evaluate_field,
    hermite_table,
    label_components,
)
from .oscillator import MultiIndex, OscillatorConfig, eigenvalue

__all__ = [
    "Combination",
    "GridSpec",
    "NodalCountResult",
    "FieldLabeling",
    "CellBudgetError",
    "DegenerateFieldError",
    "combination_eval",
    "combination_poly_eval",
    "default_box",
    "count_nodal_domains",
    "stabilized_count",
    "label_sign_field",
    "write_label_grid",
    "read_label_grid",
    "cell_budget",
]

DEFAULT_CELL_BUDGET = 10**9

# Initial cells per axis when none is requested.
DEFAULT_RESOLUTION = {1: 1024, 2: 256, 3: 64}

GRID_MAGIC = b"QHOG"
GRID_FORMAT_VERSION = 1


class CellBudgetError(RuntimeError):
    """A grid would exceed the total cell budget (env QHO_CELL_BUDGET)."""


class DegenerateFieldError(RuntimeError):
    """Every sampled value was zero: the combination vanishes on the grid."""


def cell_budget() -> int:
    """Total cell budget, overridable through QHO_CELL_BUDGET."""
    raw = os.environ.get("QHO_CELL_BUDGET")
    if raw:
        return int(float(raw))
    return DEFAULT_CELL_BUDGET


@dataclass(frozen=True)
class Combination:
    """Finite linear combination sum_t coef_t * f_{index_t} over one config."""

    config: OscillatorConfig
    terms: tuple[tuple[float, MultiIndex], ...]

    def __init__(self, config: OscillatorConfig, terms):
        norm = []
        for coef, index in terms:
            coef = float(coef)
            if coef == 0.0 or not math.isfinite(coef):
                raise ValueError(f"coefficients must be nonzero and finite, got {coef}")
            index = tuple(int(k) for k in index)
            if len(index) != config.n:
                raise ValueError(
                    f"index {index} has length {len(index)}, config dimension is {config.n}"
                )
            if any(k < 0 for k in index):
                raise ValueError(f"multi-index entries must be nonnegative, got {index}")
            norm.append((coef, index))
        if not norm:
            raise ValueError("a combination needs at least one term")
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "terms", tuple(norm))

    @property
    def degree(self) -> int:
        return max(sum(index) for _, index in self.terms)

    @property
    def lambda_max(self) -> float:
        return max(eigenvalue(self.config, index) for _, index in self.terms)


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box [-R_i, R_i] sampled with `resolution` cells per axis."""

    halfwidths: tuple[float, ...]
    resolution: int

    def __post_init__(self):
        if any(r <= 0.0 or not math.isfinite(r) for r in self.halfwidths):
            raise ValueError(f"halfwidths must be positive and finite, got {self.halfwidths}")
        if self.resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {self.resolution}")

    def cells(self) -> int:
        return self.resolution ** len(self.halfwidths)


@dataclass
class FieldLabeling:
    """Labeled sign components of one sampled field."""

    labels: np.ndarray
    count: int
    v_min: np.ndarray
    v_max: np.ndarray
    witness_flat: np.ndarray


@dataclass
class NodalCountResult:
    """Nodal-domain count with grid metadata and per-component witnesses.

    witnesses[c] is a point inside component c+1 (its minimum-V cell center);
    v_min/v_max are the per-component ranges of the potential over cell
    centers, used by the annulus classification. crossing_flags is filled in
    by the annuli module.
    """

    count: int
    method: str
    resolution: int
    refinement_history: list[tuple[int, int]]
    witnesses: list[tuple[float, ...]]
    converged: bool | None = None
    labels: np.ndarray | None = None
    grid: GridSpec | None = None
    lambda_max: float | None = None
    v_min: np.ndarray | None = None
    v_max: np.ndarray | None = None
    cell_v_variation: float | None = None
    crossing_flags: list[list[int]] | None = None


def combination_poly_eval(comb: Combination, x) -> float:
    """Polynomial part sum_t coef_t prod_i H_{k_i}(sqrt(a_i) x_i) at a point.

    Carries the sign of the full combination everywhere.
    """
    from .special import hermite_eval

    if len(x) != comb.config.n:
        raise ValueError(f"point has dimension {len(x)}, expected {comb.config.n}")
    sqrt_a = [math.sqrt(ai) for ai in comb.config.a]
    total = 0.0
    for coef, index in comb.terms:
        prod = 1.0
        for ki, si, xi in zip(index, sqrt_a, x):
            prod *= hermite_eval(ki, si * xi)
        total += coef * prod
    return total


def combination_eval(comb: Combination, x) -> float:
    """Full combination value (Gaussian factor included)."""
    if len(x) != comb.config.n:
        raise ValueError(f"point has dimension {len(x)}, expected {comb.config.n}")
    gauss_exp = 0.0
    for ai, xi in zip(comb.config.a, x):
        gauss_exp += ai * xi * xi
    return math.exp(-0.5 * gauss_exp) * combination_poly_eval(comb, x)


def default_box(comb: Combination, margin: float = 1.25, resolution: int | None = None) -> GridSpec:
    """Box containing the classically allowed ellipsoid {V <= lambda_max}.

    R_i = margin * sqrt(lambda_max) / a_i; margin = 1 is the tight bounding
    box. Every nodal domain meets the ellipsoid, so it is visible in the box.
    """
    if margin < 1.0:
        raise ValueError(f"margin must be >= 1, got {margin}")
    lam = comb.lambda_max
    halfwidths = tuple(margin * math.sqrt(lam) / ai for ai in comb.config.a)
    if resolution is None:
        resolution = DEFAULT_RESOLUTION.get(comb.config.n, 32)
    return GridSpec(halfwidths=halfwidths, resolution=resolution)


def _axis_centers(halfwidth: float, resolution: int) -> np.ndarray:
    step = 2.0 * halfwidth / resolution
    return (np.arange(resolution) + 0.5) * step - halfwidth


def label_sign_field(field: np.ndarray, weight: np.ndarray) -> FieldLabeling:
    """Label the sign components of a sampled field.

    weight (same shape) is reduced per component; the witness of a component
    is its minimum-weight cell. Cells with |field| below 1e-300 stay
    unlabeled.
    """
    if field.shape != weight.shape:
        raise ValueError("field and weight must share a shape")
    sign = (field > SIGN_THRESHOLD).astype(np.int8) - (field < -SIGN_THRESHOLD).astype(np.int8)
    if not sign.any():
        raise DegenerateFieldError("sampled field is identically zero")
    labels, count = label_components(sign)
    v_min, v_max, arg_min = component_stats(labels, weight, count)
    return FieldLabeling(
        labels=labels,
        count=count,
        v_min=v_min[1:],
        v_max=v_max[1:],
        witness_flat=arg_min[1:],
    )


def _level_labeling(comb: Combination, spec: GridSpec, resolution: int):
    config = comb.config
    centers = [_axis_centers(r, resolution) for r in spec.halfwidths]
    tables = []
    for ax in range(config.n):
        scaled = math.sqrt(config.a[ax]) * centers[ax]
        max_order = max(index[ax] for _, index in comb.terms)
        tables.append(hermite_table(max_order, scaled))
    coefs = np.array([c for c, _ in comb.terms])
    indices = np.array([idx for _, idx in comb.terms], dtype=np.int64).reshape(
        len(comb.terms), config.n
    )
    field = evaluate_field(tables, coefs, indices)

    v = np.zeros(field.shape)
    for ax in range(config.n):
        shape = [1] * config.n
        shape[ax] = resolution
        v = v + (config.a[ax] ** 2) * (centers[ax] ** 2).reshape(shape)

    labeling = label_sign_field(field, v)
    return labeling, centers


def _witness_coords(flat: int, centers: list[np.ndarray]) -> tuple[float, ...]:
    shape = tuple(c.size for c in centers)
    coords = np.unravel_index(flat, shape)
    return tuple(float(centers[ax][coords[ax]]) for ax in range(len(centers)))


def _v_variation(config: OscillatorConfig, spec: GridSpec, resolution: int) -> float:
    total = 0.0
    for ai, r in zip(config.a, spec.halfwidths):
        h = 2.0 * r / resolution
        total += ai * ai * (2.0 * r * h + h * h)
    return total


def count_nodal_domains(comb: Combination, spec: GridSpec, refinements: int = 1) -> NodalCountResult:
    """Count nodal domains of a combination by sign sampling on a grid.

    Runs `refinements` levels starting at spec.resolution, doubling the
    resolution per level; the count is taken from the finest level and the
    full history is recorded. Deterministic for fixed inputs; independent of
    the kernel backend.
    """
    if refinements < 1:
        raise ValueError(f"refinements must be >= 1, got {refinements}")
    budget = cell_budget()
    final_res = spec.resolution * 2 ** (refinements - 1)
    if final_res ** comb.config.n > budget:
        raise CellBudgetError(
            f"{final_res} cells per axis in {comb.config.n}D exceeds the "
            f"budget of {budget} cells"
        )
    history: list[tuple[int, int]] = []
    labeling = None
    centers = None
    resolution = spec.resolution
    for level in range(refinements):
        resolution = spec.resolution * 2**level
        labeling, centers = _level_labeling(comb, spec, resolution)
        history.append((resolution, labeling.count))
    converged = history[-1][1] == history[-2][1] if len(history) >= 2 else None
    return NodalCountResult(
        count=labeling.count,
        method="grid",
        resolution=resolution,
        refinement_history=history,
        witnesses=[_witness_coords(int(f), centers) for f in labeling.witness_flat],
        converged=converged,
        labels=labeling.labels,
        grid=GridSpec(spec.halfwidths, resolution),
        lambda_max=comb.lambda_max,
        v_min=labeling.v_min,
        v_max=labeling.v_max,
        cell_v_variation=_v_variation(comb.config, spec, resolution),
    )


def stabilized_count(
    comb: Combination,
    initial_resolution: int | None = None,
    max_refinements: int = 5,
    margin: float = 1.25,
    spec: GridSpec | None = None,
) -> NodalCountResult:
    """Refine until two consecutive levels agree on the count.

    Stops early on agreement; otherwise runs max_refinements levels and
    returns the last result flagged converged=False. Non-convergence is a
    flagged result, not an error.
    """
    if max_refinements < 2:
        raise ValueError(f"max_refinements must be >= 2, got {max_refinements}")
    if spec is None:
        spec = default_box(comb, margin=margin, resolution=initial_resolution)
    budget = cell_budget()
    history: list[tuple[int, int]] = []
    result = None
    prev_count = None
    for level in range(max_refinements):
        resolution = spec.resolution * 2**level
        if resolution ** comb.config.n > budget:
            break
        labeling, centers = _level_labeling(comb, spec, resolution)
        history.append((resolution, labeling.count))
        if prev_count is not None and labeling.count == prev_count:
            result = (labeling, centers, resolution, True)
            break
        prev_count = labeling.count
        result = (labeling, centers, resolution, False)
    if result is None:
        raise CellBudgetError(
            f"initial resolution {spec.resolution} in {comb.config.n}D exceeds "
            f"the budget of {budget} cells"
        )
    labeling, centers, resolution, converged = result
    return NodalCountResult(
        count=labeling.count,
        method="grid",
        resolution=resolution,
        refinement_history=history,
        witnesses=[_witness_coords(int(f), centers) for f in labeling.witness_flat],
        converged=converged,
        labels=labeling.labels,
        grid=GridSpec(spec.halfwidths, resolution),
        lambda_max=comb.lambda_max,
        v_min=labeling.v_min,
        v_max=labeling.v_max,
        cell_v_variation=_v_variation(comb.config, spec, resolution),
    )


def write_label_grid(path, result: NodalCountResult) -> None:
    """Dump the label grid: magic "QHOG", version, n, per-axis resolution,
    box bounds as f64 pairs, then row-major int32 labels (little-endian)."""
    if result.labels is None or result.grid is None:
        raise ValueError("result carries no label grid")
    n = len(result.grid.halfwidths)
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC)
        fh.write(struct.pack("<I", GRID_FORMAT_VERSION))
        fh.write(struct.pack("<I", n))
        fh.write(struct.pack(f"<{n}I", *([result.grid.resolution] * n)))
        for r in result.grid.halfwidths:
            fh.write(struct.pack("<dd", -r, r))
        fh.write(np.ascontiguousarray(result.labels, dtype="<i4").tobytes())


def read_label_grid(path):
    """Read a label-grid dump; returns (bounds, labels)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != GRID_MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != GRID_FORMAT_VERSION:
            raise ValueError(f"unsupported version {version}")
        (n,) = struct.unpack("<I", fh.read(4))
        resolutions = struct.unpack(f"<{n}I", fh.read(4 * n))
        bounds = [struct.unpack("<dd", fh.read(16)) for _ in range(n)]
        labels = np.frombuffer(fh.read(), dtype="<i4").reshape(resolutions)
    return bounds, labels
