"""Hot grid kernels: sampled-field evaluation, union-find component labeling
and per-component reductions.

Each kernel has a numba ``@njit`` implementation and a numpy/scipy fallback
(selected by ``QHO_NO_NUMBA`` or a missing numba, see ``_accel``). The two
paths are written to produce bit-identical outputs: float operations follow
one fixed association order, labels are canonicalized to first occurrence in
row-major order, and ties in reductions resolve to the lowest flat index.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ._accel import njit, use_numba

__all__ = [
    "hermite_table",
    "evaluate_field",
    "label_components",
    "component_stats",
]

SIGN_THRESHOLD = 1e-300


def hermite_table(max_order: int, points: np.ndarray) -> np.ndarray:
    """Rows H_0..H_max_order evaluated at the given points, by recurrence."""
    table = np.empty((max_order + 1, points.size))
    table[0] = 1.0
    if max_order >= 1:
        table[1] = 2.0 * points
    for m in range(1, max_order):
        table[m + 1] = 2.0 * points * table[m] - (2.0 * m) * table[m - 1]
    return table


# ---------------------------------------------------------------------------
# Field evaluation: out[cell] = sum_t coef[t] * prod_ax table_ax[idx[t, ax], cell_ax]


@njit(cache=True)
def _field_1d(t0, coefs, i0, out):
    for i in range(out.shape[0]):
        acc = 0.0
        for t in range(coefs.size):
            acc += coefs[t] * t0[i0[t], i]
        out[i] = acc


@njit(cache=True)
def _field_2d(t0, t1, coefs, i0, i1, out):
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            acc = 0.0
            for t in range(coefs.size):
                acc += coefs[t] * (t0[i0[t], i] * t1[i1[t], j])
            out[i, j] = acc


@njit(cache=True)
def _field_3d(t0, t1, t2, coefs, i0, i1, i2, out):
    for i in range(out.shape[0]):
        for j in range(out.shape[1]):
            for l in range(out.shape[2]):
                acc = 0.0
                for t in range(coefs.size):
                    acc += coefs[t] * ((t0[i0[t], i] * t1[i1[t], j]) * t2[i2[t], l])
                out[i, j, l] = acc


def _field_numpy(tables, coefs, indices, out):
    for t in range(coefs.size):
        term = tables[0][indices[t, 0]]
        for ax in range(1, len(tables)):
            term = term[..., None] * tables[ax][indices[t, ax]]
        out += coefs[t] * term


def evaluate_field(tables: list[np.ndarray], coefs: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Sum of separable terms over the tensor grid spanned by the tables.

    tables[ax] has shape (max_order_ax + 1, resolution); indices has shape
    (n_terms, n_axes). Output shape is the per-axis resolutions.
    """
    shape = tuple(t.shape[1] for t in tables)
    out = np.zeros(shape)
    n = len(tables)
    if use_numba() and n <= 3:
        i = np.ascontiguousarray(indices.astype(np.int64))
        if n == 1:
            _field_1d(tables[0], coefs, i[:, 0], out)
        elif n == 2:
            _field_2d(tables[0], tables[1], coefs, i[:, 0], i[:, 1], out)
        else:
            _field_3d(tables[0], tables[1], tables[2], coefs, i[:, 0], i[:, 1], i[:, 2], out)
    else:
        _field_numpy(tables, coefs, indices, out)
    return out


# ---------------------------------------------------------------------------
# Union-find labeling of same-sign, face-adjacent cells.


@njit(cache=True)
def _uf_find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True)
def _uf_union(parent, a, b):
    ra = _uf_find(parent, a)
    rb = _uf_find(parent, b)
    if ra != rb:
        parent[rb] = ra


@njit(cache=True)
def _label_1d(sign, labels):
    (w,) = sign.shape
    parent = np.arange(w)
    for i in range(w - 1):
        if sign[i] != 0 and sign[i + 1] == sign[i]:
            _uf_union(parent, i, i + 1)
    mapping = np.zeros(w, dtype=np.int32)
    nxt = 0
    for i in range(w):
        if sign[i] == 0:
            labels[i] = 0
            continue
        r = _uf_find(parent, i)
        if mapping[r] == 0:
            nxt += 1
            mapping[r] = nxt
        labels[i] = mapping[r]
    return nxt


@njit(cache=True)
def _label_2d(sign, labels):
    h, w = sign.shape
    parent = np.arange(h * w)
    for i in range(h):
        for j in range(w):
            s = sign[i, j]
            if s == 0:
                continue
            f = i * w + j
            if j + 1 < w and sign[i, j + 1] == s:
                _uf_union(parent, f, f + 1)
            if i + 1 < h and sign[i + 1, j] == s:
                _uf_union(parent, f, f + w)
    mapping = np.zeros(h * w, dtype=np.int32)
    nxt = 0
    for i in range(h):
        for j in range(w):
            if sign[i, j] == 0:
                labels[i, j] = 0
                continue
            r = _uf_find(parent, i * w + j)
            if mapping[r] == 0:
                nxt += 1
                mapping[r] = nxt
            labels[i, j] = mapping[r]
    return nxt


@njit(cache=True)
def _label_3d(sign, labels):
    d0, d1, d2 = sign.shape
    parent = np.arange(d0 * d1 * d2)
    for i in range(d0):
        for j in range(d1):
            for l in range(d2):
                s = sign[i, j, l]
                if s == 0:
                    continue
                f = (i * d1 + j) * d2 + l
                if l + 1 < d2 and sign[i, j, l + 1] == s:
                    _uf_union(parent, f, f + 1)
                if j + 1 < d1 and sign[i, j + 1, l] == s:
                    _uf_union(parent, f, f + d2)
                if i + 1 < d0 and sign[i + 1, j, l] == s:
                    _uf_union(parent, f, f + d1 * d2)
    mapping = np.zeros(d0 * d1 * d2, dtype=np.int32)
    nxt = 0
    for i in range(d0):
        for j in range(d1):
            for l in range(d2):
                if sign[i, j, l] == 0:
                    labels[i, j, l] = 0
                    continue
                r = _uf_find(parent, (i * d1 + j) * d2 + l)
                if mapping[r] == 0:
                    nxt += 1
                    mapping[r] = nxt
                labels[i, j, l] = mapping[r]
    return nxt


def _label_scipy(sign: np.ndarray) -> tuple[np.ndarray, int]:
    structure = ndimage.generate_binary_structure(sign.ndim, 1)
    pos, pos_n = ndimage.label(sign > 0, structure=structure)
    neg, neg_n = ndimage.label(sign < 0, structure=structure)
    raw = pos.astype(np.int64) + np.where(neg > 0, neg.astype(np.int64) + pos_n, 0)
    flat = raw.ravel()
    uniq, first = np.unique(flat, return_index=True)
    keep = uniq != 0
    uniq, first = uniq[keep], first[keep]
    order = np.argsort(first, kind="stable")
    remap = np.zeros(pos_n + neg_n + 1, dtype=np.int32)
    remap[uniq[order]] = np.arange(1, uniq.size + 1, dtype=np.int32)
    return remap[flat].reshape(sign.shape), int(uniq.size)


def label_components(sign: np.ndarray) -> tuple[np.ndarray, int]:
    """Label same-sign face-adjacent components of a sign grid.

    sign is an int8 array of -1/0/+1; zero cells stay unlabeled (label 0).
    Labels are int32, numbered by first occurrence in row-major order, so the
    output does not depend on the backend.
    """
    if use_numba() and sign.ndim <= 3:
        labels = np.empty(sign.shape, dtype=np.int32)
        if sign.ndim == 1:
            count = _label_1d(sign, labels)
        elif sign.ndim == 2:
            count = _label_2d(sign, labels)
        else:
            count = _label_3d(sign, labels)
        return labels, int(count)
    return _label_scipy(sign)


# ---------------------------------------------------------------------------
# Per-component reductions over a weight grid (the potential V).


@njit(cache=True)
def _stats_numba(labels_flat, weight_flat, count):
    v_min = np.full(count + 1, np.inf)
    v_max = np.full(count + 1, -np.inf)
    arg_min = np.full(count + 1, -1, dtype=np.int64)
    for f in range(labels_flat.size):
        lab = labels_flat[f]
        if lab == 0:
            continue
        v = weight_flat[f]
        if v < v_min[lab]:
            v_min[lab] = v
            arg_min[lab] = f
        if v > v_max[lab]:
            v_max[lab] = v
    return v_min, v_max, arg_min


def _stats_numpy(labels_flat, weight_flat, count):
    v_min = np.full(count + 1, np.inf)
    v_max = np.full(count + 1, -np.inf)
    arg_min = np.full(count + 1, -1, dtype=np.int64)
    mask = labels_flat != 0
    labs = labels_flat[mask]
    vals = weight_flat[mask]
    idx = np.nonzero(mask)[0]
    order = np.lexsort((idx, vals, labs))
    labs_s, vals_s, idx_s = labs[order], vals[order], idx[order]
    starts = np.searchsorted(labs_s, np.arange(1, count + 1), side="left")
    ends = np.searchsorted(labs_s, np.arange(1, count + 1), side="right")
    present = starts < ends
    v_min[1:][present] = vals_s[starts[present]]
    arg_min[1:][present] = idx_s[starts[present]]
    order_max = np.argsort(labs, kind="stable")
    labs_m, vals_m = labs[order_max], vals[order_max]
    starts_m = np.searchsorted(labs_m, np.arange(1, count + 1), side="left")
    ends_m = np.searchsorted(labs_m, np.arange(1, count + 1), side="right")
    for lab in range(1, count + 1):
        if starts_m[lab - 1] < ends_m[lab - 1]:
            v_max[lab] = vals_m[starts_m[lab - 1] : ends_m[lab - 1]].max()
    return v_min, v_max, arg_min


def component_stats(labels: np.ndarray, weight: np.ndarray, count: int):
    """Per-label (min, max, argmin) of the weight grid.

    Returns arrays indexed 1..count; argmin ties resolve to the lowest
    row-major flat index on both backends.
    """
    labels_flat = np.ascontiguousarray(labels).ravel()
    weight_flat = np.ascontiguousarray(weight).ravel()
    if use_numba():
        return _stats_numba(labels_flat, weight_flat, count)
    return _stats_numpy(labels_flat, weight_flat, count)
