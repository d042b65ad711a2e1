"""Riemann-sum L^p norms of GridFields."""
from __future__ import annotations

import math

import numpy as np

from .grid import GridField


def pointwise_norm(u: GridField) -> np.ndarray:
    return np.linalg.norm(u.values, axis=-1)


def lp_norm(u: GridField, p: float = 1.0, region: str = "full") -> float:
    """(sum |u(x)|^p h^d)^(1/p) over the lattice, or over the face row (d = n-1)."""
    if region == "face":
        u = u.face()
    elif region != "full":
        raise ValueError(f"unknown region {region!r}")
    if not (p == math.inf or p >= 1):
        raise ValueError("p must be >= 1 or inf")
    mag = pointwise_norm(u).ravel()
    if mag.size == 0:
        return 0.0
    if p == math.inf:
        return float(mag.max())
    vol = u.h ** u.dim
    # fsum keeps the total independent of summation order
    return math.fsum((mag ** p).tolist()) ** (1.0 / p) * vol ** (1.0 / p)
