"""Cone-supported representation kernels.

For a unit vector theta, integrating by parts k times along the ray gives
u(x) = (-1)^k / (k-1)! int_0^inf t^(k-1) d_t^k u(x + t theta) dt. Averaging over
theta against phi(theta_n) turns this into a convolution with

    K_k(y)[e_t1, ..., e_tk] = (-1)^k / (k-1)! * phi(y_n/|y|) |y|^(k-n) prod_i y_ti/|y|,

which vanishes unless y_n > |y|/2 and is (k - n)-homogeneous."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad


def raw_phi(t):
    """exp(1 - 1/(2t - 1)) on (1/2, 1], zero on [-1, 1/2]; smooth and flat at t = 1/2."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = t > 0.5
    out[m] = np.exp(1.0 - 1.0 / (2.0 * t[m] - 1.0))
    return out


def sphere_area(dim: int) -> float:
    return 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)


def sphere_integral(f: Callable, n: int) -> float:
    """int_{S^(n-1)} f(theta_n) dtheta for f supported in [1/2, 1]."""
    if n < 2:
        raise ValueError("need n >= 2")
    beta = (n - 3) / 2
    # (1 - t^2)^beta = (1 - t)^beta (1 + t)^beta; the first factor is the quad weight
    val, _ = quad(lambda t: float(f(np.array([t]))[0]) * (1 + t) ** beta, 0.5, 1.0,
                  weight="alg", wvar=(0.0, beta), epsabs=1e-14, epsrel=1e-13, limit=200)
    return sphere_area(n - 1) * val


@dataclass(frozen=True)
class KernelProfile:
    n: int
    c: float
    raw: Callable = raw_phi
    name: str = "exp(1-1/(2t-1))"

    def phi(self, t):
        return self.c * self.raw(t)

    def normalization_error(self) -> float:
        return abs(sphere_integral(self.phi, self.n) - 1.0)

    def to_json(self) -> dict:
        return {"n": self.n, "phi": self.name, "c": self.c, "support": [0.5, 1.0]}


def default_profile(n: int) -> KernelProfile:
    c = 1.0 / sphere_integral(raw_phi, n)
    prof = KernelProfile(n, c)
    if prof.normalization_error() > 1e-8:
        raise ArithmeticError("profile normalization failed")
    return prof


def sobolev_kernel(n: int, k: int, profile: KernelProfile, y, target: Sequence[int]) -> np.ndarray:
    """K_k(y) against e_target[0] x ... x e_target[k-1]; y of shape (n,) or (N, n)."""
    if len(target) != k:
        raise ValueError(f"target needs {k} axis indices")
    if any(not 0 <= t < n for t in target):
        raise ValueError("target index out of range")
    if profile.n != n:
        raise ValueError("profile was normalized for another dimension")
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y = np.atleast_2d(y)
    r = np.linalg.norm(y, axis=1)
    if np.any(r == 0):
        raise ValueError("kernel is singular at y = 0")
    cosn = y[:, n - 1] / r
    ang = np.ones_like(r)
    for t in target:
        ang = ang * y[:, t] / r
    val = (-1) ** k / math.factorial(k - 1) * profile.phi(cosn) * r ** (k - n) * ang
    val = np.where(cosn > 0.5, val, 0.0)
    return val[0] if single else val


def holder_cone_kernel(n: int, alpha: float) -> Callable:
    """|y|^(1-n) (y_n/|y|)_+^alpha: (1-n)-homogeneous, zero on the lower halfspace,
    alpha-Hoelder on the sphere; K(y', 1) = |(y', 1)|^(1-n-alpha)."""

    def k(y):
        y = np.atleast_2d(np.asarray(y, float))
        r = np.linalg.norm(y, axis=1)
        c = np.clip(y[:, -1] / r, 0.0, None)
        return r ** (1 - n) * c ** alpha

    return k


def homogeneous_kernel(n: int) -> Callable:
    """|y|^(1-n): homogeneous but nonzero on the lower halfspace."""

    def k(y):
        y = np.atleast_2d(np.asarray(y, float))
        return np.linalg.norm(y, axis=1) ** (1 - n)

    return k
