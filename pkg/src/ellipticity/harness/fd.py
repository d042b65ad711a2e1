"""Finite-difference application of constant-coefficient operators on GridFields."""
from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

from ..algebra import multi_indices
from ..constructions.vandermonde import fd_weights
from ..operators import Operator
from .grid import GridError, GridField

CENTRAL = "central"
ONE_SIDED = "one_sided_at_boundary"


def half_width(order: int) -> int:
    """Central stencils use offsets -p..p, second order for every derivative order."""
    return (order + 1) // 2


@lru_cache(maxsize=None)
def _weights(offsets: tuple[int, ...], order: int) -> np.ndarray:
    return np.array([float(w) for w in fd_weights(offsets, order)])


def diff_axis(arr: np.ndarray, axis: int, order: int, h: float, one_sided_lo: bool = False) -> np.ndarray:
    """order-th derivative along `axis`; NaN where the stencil leaves the array.

    With one_sided_lo the first p positions use the stencil shifted into the
    array (same width, consistency order >= 1)."""
    if order == 0:
        return arr
    p = half_width(order)
    n = arr.shape[axis]
    if n < 2 * p + 1:
        raise GridError(f"need at least {2 * p + 1} points along axis {axis} for a derivative of order {order}")
    a = np.moveaxis(arr, axis, 0)
    out = np.full(a.shape, np.nan, dtype=np.result_type(a.dtype, float))
    w = _weights(tuple(range(-p, p + 1)), order)
    acc = np.zeros((n - 2 * p,) + a.shape[1:], dtype=out.dtype)
    for i, wi in enumerate(w):
        if wi:
            acc = acc + wi * a[i:n - 2 * p + i]
    out[p:n - p] = acc
    if one_sided_lo:
        for i in range(p):
            ws = _weights(tuple(range(-i, 2 * p + 1 - i)), order)
            out[i] = sum(wj * a[j] for j, wj in enumerate(ws) if wj)
    out = out / h ** order
    return np.moveaxis(out, 0, axis)


def _region(u: GridField, pads: list[int], one_sided_axis: int | None) -> tuple[slice, ...]:
    sl = []
    for j, (c, p) in enumerate(zip(u.counts, pads)):
        lo = 0 if j == one_sided_axis else p
        sl.append(slice(lo, c - p))
    return tuple(sl)


def _crop(u: GridField, region: tuple[slice, ...], values: np.ndarray, boundary_axis, meta: dict,
          cropped: bool = False) -> GridField:
    box = tuple((lo + s.start * u.h, lo + (s.stop - 1) * u.h) for (lo, _), s in zip(u.box, region))
    md = dict(u.metadata)
    md.update(meta)
    md["stencil_region"] = [[s.start, s.stop] for s in region]
    return GridField(box, u.h, values if cropped else values[region], boundary_axis, md)


def _one_sided_axis(u: GridField, scheme: str) -> int | None:
    if scheme == CENTRAL:
        return None
    if scheme != ONE_SIDED:
        raise ValueError(f"unknown scheme {scheme!r}")
    if u.boundary_axis is None:
        raise GridError("one-sided scheme needs a field with a boundary axis")
    return u.boundary_axis


def _partial(u: GridField, alpha, side: int | None) -> np.ndarray:
    d = u.values
    for j, a in enumerate(alpha):
        d = diff_axis(d, j, a, u.h, one_sided_lo=(j == side))
    return d


def partial_fd(u: GridField, alphas, scheme: str = CENTRAL) -> tuple[list[np.ndarray], tuple[slice, ...]]:
    """Raw derivative arrays for each multi-index, cropped to the common valid region."""
    side = _one_sided_axis(u, scheme)
    pads = [max(half_width(a[j]) for a in alphas) for j in range(u.dim)]
    region = _region(u, pads, side)
    return [_partial(u, a, side)[region] for a in alphas], region


def apply_operator_fd(op: Operator, u: GridField, scheme: str = CENTRAL) -> GridField:
    """A u on the lattice; values outside the stencil region are cropped away."""
    if u.dim != op.n:
        raise GridError(f"field lives in R^{u.dim}, operator in R^{op.n}")
    alphas, mats = op.coefficient_arrays()
    return apply_terms_fd(list(zip(map(tuple, alphas), mats)), op.dim_v, u, scheme)


def apply_terms_fd(terms, dim_v: int, u: GridField, scheme: str = CENTRAL) -> GridField:
    """Same as apply_operator_fd for float terms [(alpha, matrix)], e.g. a rotated operator."""
    if u.dim_v != dim_v:
        raise GridError(f"field has {u.dim_v} components, operator expects {dim_v}")
    k = max(sum(a) for a, _ in terms)
    for j, c in enumerate(u.counts):
        if c < k + 1:
            raise GridError(f"need at least {k + 1} points along axis {j}")
    side = _one_sided_axis(u, scheme)
    pads = [max(half_width(int(a[j])) for a, _ in terms) for j in range(u.dim)]
    region = _region(u, pads, side)
    out = None
    for a, m in terms:
        d = _partial(u, [int(x) for x in a], side)
        term = np.einsum("wv,...v->...w", np.asarray(m), d)
        out = term if out is None else out + term
    face_order = 1 if side is not None else None
    return _crop(u, region, out, side, {"scheme": scheme, "face_consistency_order": face_order})


def derivative_norm_fd(u: GridField, order: int, scheme: str = CENTRAL) -> GridField:
    """Pointwise Frobenius norm of the full derivative tensor D^order u."""
    if order == 0:
        return u.with_values(np.linalg.norm(u.values, axis=-1)[..., None])
    alphas = list(multi_indices(u.dim, order))
    ds, region = partial_fd(u, alphas, scheme)
    acc = 0.0
    for a, d in zip(alphas, ds):
        mult = factorial(order) / np.prod([factorial(x) for x in a])
        acc = acc + mult * np.sum(np.abs(d) ** 2, axis=-1)
    side = _one_sided_axis(u, scheme)
    meta = {"scheme": scheme, "face_consistency_order": 1 if side is not None else None}
    return _crop(u, region, np.sqrt(acc)[..., None], side, meta, cropped=True)
