"""Exact Vandermonde solves and the recipe for superposed extensions."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np

from ..algebra import fraction_to_str, to_fraction


class VandermondeError(ValueError):
    pass


def vandermonde_inverse(nodes: Sequence) -> list[list[Fraction]]:
    """mu with sum_i mu[i][j] * nodes[i]**l = delta(j, l), 0 <= j, l < k.

    Solved by Gauss-Jordan elimination over the rationals."""
    x = [to_fraction(t) for t in nodes]
    k = len(x)
    if k == 0:
        raise VandermondeError("need at least one node")
    if len(set(x)) != k:
        raise VandermondeError("nodes must be pairwise distinct (Vandermonde system is singular)")
    # unknown column j of mu solves V^T mu_j = e_j with V^T[l][i] = x_i^l
    a = [[x[i] ** l for i in range(k)] + [Fraction(int(l == j)) for j in range(k)] for l in range(k)]
    for col in range(k):
        piv = next(r for r in range(col, k) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(k):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    mu = [[a[i][k + j] for j in range(k)] for i in range(k)]
    if vandermonde_residual(x, mu) != 0:
        raise VandermondeError("exact back-substitution failed")
    return mu


def vandermonde_residual(nodes: Sequence, mu: Sequence[Sequence]) -> Fraction:
    """max_{j,l} |sum_i mu_ij x_i^l - delta_jl|, computed exactly."""
    x = [to_fraction(t) for t in nodes]
    k = len(x)
    worst = Fraction(0)
    for j in range(k):
        for l in range(k):
            s = sum((to_fraction(mu[i][j]) * x[i] ** l for i in range(k)), Fraction(0)) - int(j == l)
            worst = max(worst, abs(s))
    return worst


def vandermonde_coefficients(lambdas: Sequence) -> list[list[Fraction]]:
    lam = [to_fraction(t) for t in lambdas]
    if any(t <= 0 for t in lam):
        raise VandermondeError("lambdas must be positive")
    return vandermonde_inverse(lam)


def fd_weights(offsets: Sequence[int], order: int) -> list[Fraction]:
    """Weights w with sum_i w_i f(x + s_i h) = h^order f^(order)(x) + O(h^{len - order})."""
    if order >= len(offsets):
        raise VandermondeError("stencil too short for the derivative order")
    mu = vandermonde_inverse(offsets)
    return [factorial(order) * mu[i][order] for i in range(len(offsets))]


@dataclass(frozen=True)
class ThetaProfile:
    """theta(t) = (1 - t^2)^power on [-1, 1], zero outside, scaled to support `radius`."""

    power: int
    radius: float = 1.0

    def __call__(self, t):
        s = np.asarray(t, dtype=float) / self.radius
        return np.where(np.abs(s) < 1.0, np.clip(1.0 - s * s, 0.0, None) ** self.power, 0.0)

    def to_json(self) -> dict:
        return {"form": "(1-t^2)^p", "power": self.power, "support_radius": self.radius}


def default_theta(k: int) -> ThetaProfile:
    return ThetaProfile(k + 2)


@dataclass(frozen=True)
class ExtensionRecipe:
    k: int
    lambdas: tuple[Fraction, ...]
    mu: tuple[tuple[Fraction, ...], ...]
    epsilon: float
    theta: ThetaProfile

    @classmethod
    def build(cls, k: int, lambdas: Sequence | None = None, epsilon: float = 2.0,
              theta: ThetaProfile | None = None) -> ExtensionRecipe:
        if k < 1:
            raise VandermondeError("k must be at least 1")
        lam = tuple(to_fraction(t) for t in (lambdas if lambdas is not None else range(1, k + 1)))
        if len(lam) != k:
            raise VandermondeError(f"need {k} lambdas, got {len(lam)}")
        if not epsilon > 0:
            raise VandermondeError("epsilon must be positive")
        mu = vandermonde_coefficients(lam)
        return cls(k, lam, tuple(tuple(r) for r in mu), float(epsilon), theta or default_theta(k))

    def residual(self) -> Fraction:
        return vandermonde_residual(self.lambdas, self.mu)

    def to_json_obj(self) -> dict:
        return {
            "k": self.k,
            "lambdas": [fraction_to_str(t) for t in self.lambdas],
            "mu": [[fraction_to_str(t) for t in row] for row in self.mu],
            "epsilon": self.epsilon,
            "theta_profile": self.theta.to_json(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> ExtensionRecipe:
        obj = json.loads(text)
        th = obj.get("theta_profile", {})
        theta = ThetaProfile(int(th.get("power", obj["k"] + 2)), float(th.get("support_radius", 1.0)))
        rec = cls.build(int(obj["k"]), [Fraction(s) for s in obj["lambdas"]], float(obj["epsilon"]), theta)
        if "mu" in obj and [[Fraction(s) for s in r] for r in obj["mu"]] != [list(r) for r in rec.mu]:
            raise VandermondeError("stored mu does not solve the Vandermonde system")
        return rec
