"""Composite Gauss-Legendre rules on panels graded toward near-singular points."""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np


@lru_cache(maxsize=None)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def graded_breaks(lo: float, hi: float, h: float, foci: Sequence[tuple[float, float]] = ()) -> np.ndarray:
    """Uniform breakpoints of spacing ~h, refined geometrically around each
    (center, scale) focus down to panels of width `scale`."""
    n = max(1, int(round((hi - lo) / h)))
    pts = list(np.linspace(lo, hi, n + 1))
    for c, s in foci:
        if s <= 0:
            continue
        if lo <= c <= hi:
            pts.append(c)
        d = s
        while d < 2 * h:
            for p in (c - d, c + d):
                if lo < p < hi:
                    pts.append(p)
            d *= 2.0
    pts = np.unique(np.asarray(pts))
    keep = np.concatenate([[True], np.diff(pts) > 1e-14 * max(1.0, hi - lo)])
    return pts[keep]


def panel_rule(breaks: np.ndarray, order: int = 8) -> tuple[np.ndarray, np.ndarray]:
    x, w = _leggauss(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def tensor_integrate(f, rules: Sequence[tuple[np.ndarray, np.ndarray]], chunk: int = 400_000) -> float:
    """Integral of f over a product of 1D rules; f maps (N, d) points to (N,) values.

    The first axis is processed in slabs to bound memory."""
    first_nodes, first_w = rules[0]
    rest = rules[1:]
    if rest:
        grids = np.meshgrid(*[r[0] for r in rest], indexing="ij")
        wgrid = np.ones_like(grids[0])
        for g, r in enumerate(rest):
            shape = [1] * len(rest)
            shape[g] = -1
            wgrid = wgrid * r[1].reshape(shape)
        rest_pts = np.stack([g.ravel() for g in grids], axis=1)
        rest_w = wgrid.ravel()
    else:
        rest_pts = np.zeros((1, 0))
        rest_w = np.ones(1)
    per = max(1, chunk // len(rest_w))
    partial = []
    for s in range(0, len(first_nodes), per):
        xs = first_nodes[s:s + per]
        pts = np.concatenate([np.repeat(xs, len(rest_w))[:, None], np.tile(rest_pts, (len(xs), 1))], axis=1)
        vals = np.asarray(f(pts)).reshape(len(xs), len(rest_w))
        partial.append(float(first_w[s:s + per] @ (vals @ rest_w)))
    return float(np.sum(partial))
