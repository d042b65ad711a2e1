"""Branch and bound for certified lower bounds on the smallest singular value.

The bound on a box with center c and half-widths r is

    sigma_min(M(c)) - sum_m ||C_m||_2 (prod (|c_j|+r_j)^{e_mj} - prod |c_j|^{e_mj})

which is valid by Weyl's inequality because the second term bounds
||M(x) - M(c)||_2 over the box.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..algebra import CompiledPolyMatrix, PolyMatrix

# relative slack absorbing floating error of the SVD and of the bound itself
_FP_SLACK = 1e-12


def sigma_min_batch(mats: np.ndarray) -> np.ndarray:
    """Smallest singular value relevant for injectivity (the cols-th one)."""
    p, r, c = mats.shape
    if r < c:
        return np.zeros(p)
    sv = np.linalg.svd(mats, compute_uv=False)
    return sv[:, c - 1]


@dataclass
class BoxBatch:
    lo: np.ndarray
    hi: np.ndarray
    lb: np.ndarray
    center_value: np.ndarray
    depth: np.ndarray

    def __len__(self):
        return len(self.lb)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def take(self, idx) -> BoxBatch:
        return BoxBatch(self.lo[idx], self.hi[idx], self.lb[idx], self.center_value[idx], self.depth[idx])

    @staticmethod
    def concat(parts: list[BoxBatch]) -> BoxBatch:
        return BoxBatch(*(np.concatenate([getattr(p, f) for p in parts]) for f in ("lo", "hi", "lb", "center_value", "depth")))


def evaluate_boxes(cpm: CompiledPolyMatrix, lo: np.ndarray, hi: np.ndarray, depth=None) -> BoxBatch:
    c = 0.5 * (lo + hi)
    r = 0.5 * (hi - lo)
    sig = sigma_min_batch(cpm.evaluate(c))
    pert = cpm.perturbation_bound(c, r)
    scale = cpm._abs_monomials(np.abs(c) + r) @ cpm.norms
    lb = sig - pert - _FP_SLACK * (scale + 1.0)
    if depth is None:
        depth = np.zeros(len(lo), dtype=np.int64)
    return BoxBatch(lo, hi, lb, sig, depth)


def sigma_min_lower_bound(pm, box_lo, box_hi, depth: int = 0) -> float:
    """Certified L >= 0 with sigma_min(pm(x)) >= L on the box.

    With depth > 0 the box is bisected uniformly `depth` times along every
    axis and the minimum over the pieces is returned."""
    cpm = pm.compile() if isinstance(pm, PolyMatrix) else pm
    lo = np.asarray(box_lo, dtype=float)
    hi = np.asarray(box_hi, dtype=float)
    if lo.shape != hi.shape or np.any(hi < lo):
        raise ValueError("box must be nonempty")
    pieces = 2 ** depth
    grids = [np.linspace(a, b, pieces + 1) for a, b in zip(lo, hi)]
    idx = np.stack(np.meshgrid(*[np.arange(pieces)] * len(lo), indexing="ij"), axis=-1).reshape(-1, len(lo))
    los = np.stack([grids[j][idx[:, j]] for j in range(len(lo))], axis=1)
    his = np.stack([grids[j][idx[:, j] + 1] for j in range(len(lo))], axis=1)
    batch = evaluate_boxes(cpm, los, his)
    return float(max(0.0, batch.lb.min()))


@dataclass
class SearchResult:
    status: str  # "certified", "witness", "budget"
    lower_bound: float
    best_value: float
    best_point: np.ndarray
    boxes_explored: int
    max_depth: int
    witness: object = None
    attempts: list = field(default_factory=list)


def _select(batch: BoxBatch, count: int) -> np.ndarray:
    """Indices of the `count` boxes with the smallest bounds, ties by center."""
    m = len(batch)
    if m <= count:
        cand = np.arange(m)
    else:
        kth = np.partition(batch.lb, count - 1)[count - 1]
        cand = np.nonzero(batch.lb <= kth)[0]
    centers = batch.centers[cand]
    keys = [centers[:, j] for j in range(centers.shape[1] - 1, -1, -1)] + [batch.lb[cand]]
    order = np.lexsort(keys)
    return cand[order[:count]]


def _argmin_value(batch: BoxBatch) -> int:
    c = batch.centers
    return int(np.lexsort([c[:, j] for j in range(c.shape[1] - 1, -1, -1)] + [batch.center_value])[0])


def _split(batch: BoxBatch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    width = batch.hi - batch.lo
    axis = np.argmax(width, axis=1)  # first widest axis on ties
    rows = np.arange(len(batch))
    mid = 0.5 * (batch.lo[rows, axis] + batch.hi[rows, axis])
    lo1, hi1 = batch.lo.copy(), batch.hi.copy()
    hi1[rows, axis] = mid
    lo2, hi2 = batch.lo.copy(), batch.hi.copy()
    lo2[rows, axis] = mid
    depth = np.concatenate([batch.depth + 1, batch.depth + 1])
    return np.concatenate([lo1, lo2]), np.concatenate([hi1, hi2]), depth


def branch_and_bound(
    cpm: CompiledPolyMatrix,
    lo: np.ndarray,
    hi: np.ndarray,
    *,
    budget: int,
    rel_gap: float,
    scale_fn: Callable[[np.ndarray], float] | None = None,
    witness_hook: Callable[[np.ndarray], object] | None = None,
    trigger: float = 1e-3,
    wave: int = 256,
) -> SearchResult:
    """Certify min sigma_min > 0 over the union of boxes, or find a witness.

    A box is settled once its bound is positive and within `rel_gap` of the
    best center value seen. `witness_hook(point)` is tried whenever the best
    normalized center value drops below `trigger` and has decreased tenfold
    since the previous attempt."""
    active = evaluate_boxes(cpm, np.asarray(lo, float), np.asarray(hi, float))
    explored = len(active)
    settled_min = np.inf
    best_i = _argmin_value(active)
    best_value = float(active.center_value[best_i])
    best_point = active.centers[best_i].copy()
    max_depth = 0
    last_attempt = np.inf
    attempts = []
    while True:
        threshold = (1.0 - rel_gap) * best_value
        done = (active.lb > 0) & (active.lb >= threshold)
        if done.any():
            settled_min = min(settled_min, float(active.lb[done].min()))
            active = active.take(~done)
        if witness_hook is not None:
            scale = scale_fn(best_point) if scale_fn else 1.0
            normalized = best_value / scale if scale > 0 else best_value
            if normalized < trigger and normalized < 0.1 * last_attempt:
                last_attempt = normalized
                w = witness_hook(best_point)
                attempts.append(float(normalized))
                if w is not None:
                    return SearchResult("witness", 0.0, best_value, best_point, explored, max_depth, w, attempts)
        if len(active) == 0:
            return SearchResult("certified", settled_min, best_value, best_point, explored, max_depth, None, attempts)
        if explored >= budget:
            return SearchResult("budget", 0.0, best_value, best_point, explored, max_depth, None, attempts)
        idx = _select(active, min(wave, max(1, (budget - explored) // 2)))
        chosen = active.take(idx)
        keep = np.ones(len(active), dtype=bool)
        keep[idx] = False
        splittable = np.any(chosen.hi > chosen.lo, axis=1)
        if not splittable.any():
            return SearchResult("budget", 0.0, best_value, best_point, explored, max_depth, None, attempts)
        frozen = chosen.take(~splittable)
        chosen = chosen.take(splittable)
        clo, chi, cdepth = _split(chosen)
        children = evaluate_boxes(cpm, clo, chi, cdepth)
        explored += len(children)
        max_depth = max(max_depth, int(cdepth.max()))
        j = _argmin_value(children)
        if children.center_value[j] < best_value:
            best_value = float(children.center_value[j])
            best_point = children.centers[j].copy()
        active = BoxBatch.concat([active.take(keep), frozen, children])
