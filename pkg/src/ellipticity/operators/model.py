"""Operators with exact rational coefficient matrices and rational directions."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from ..algebra import GaussianRational, MultiPoly, PolyMatrix, fraction_to_str, to_fraction

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")

MultiIndex = tuple[int, ...]
Matrix = tuple[tuple[Fraction, ...], ...]


class OperatorError(ValueError):
    pass


def _matrix(m: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(to_fraction(x) for x in row) for row in m)


@dataclass(frozen=True)
class Operator:
    """A u = sum_{|a|=k} A_a d^a u with A_a exact dim_w x dim_v matrices."""

    n: int
    k: int
    dim_v: int
    dim_w: int
    terms: tuple[tuple[MultiIndex, Matrix], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        for attr in ("n", "k", "dim_v", "dim_w"):
            v = getattr(self, attr)
            if not isinstance(v, int) or v < 1:
                raise OperatorError(f"{attr} must be a positive integer, got {v!r}")
        clean: dict[MultiIndex, Matrix] = {}
        for alpha, mat in self.terms:
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or any(a < 0 for a in alpha):
                raise OperatorError(f"multi-index {alpha} is not in N^{self.n}")
            if sum(alpha) != self.k:
                raise OperatorError(f"|alpha| = {sum(alpha)} for {alpha}, expected order {self.k}")
            mat = _matrix(mat)
            if len(mat) != self.dim_w or any(len(r) != self.dim_v for r in mat):
                raise OperatorError(f"matrix for {alpha} is not {self.dim_w}x{self.dim_v}")
            if alpha in clean:
                mat = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(clean[alpha], mat))
            clean[alpha] = mat
        nonzero = {a: m for a, m in clean.items() if any(x for row in m for x in row)}
        if not nonzero:
            raise OperatorError("operator has no nonzero coefficient matrix")
        object.__setattr__(self, "terms", tuple(sorted(nonzero.items())))

    @classmethod
    def from_dict(cls, n, k, dim_v, dim_w, terms: Mapping, name=None) -> Operator:
        return cls(n, k, dim_v, dim_w, tuple(terms.items()), name)

    @property
    def term_dict(self) -> dict[MultiIndex, Matrix]:
        return dict(self.terms)

    def coefficient(self, alpha: Sequence[int]) -> Matrix:
        zero = tuple(tuple(Fraction(0) for _ in range(self.dim_v)) for _ in range(self.dim_w))
        return self.term_dict.get(tuple(alpha), zero)

    def with_name(self, name: str | None) -> Operator:
        return Operator(self.n, self.k, self.dim_v, self.dim_w, self.terms, name)

    def scaled(self, c) -> Operator:
        c = to_fraction(c)
        return Operator(
            self.n, self.k, self.dim_v, self.dim_w,
            tuple((a, tuple(tuple(c * x for x in row) for row in m)) for a, m in self.terms),
            self.name,
        )

    def coefficient_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(alphas (T, n) int, matrices (T, dim_w, dim_v) float)."""
        alphas = np.array([a for a, _ in self.terms], dtype=np.int64)
        mats = np.array([[[float(x) for x in row] for row in m] for _, m in self.terms], dtype=float)
        return alphas, mats

    def coefficient_norm(self) -> float:
        """Frobenius norm of the stacked coefficient matrices."""
        _, mats = self.coefficient_arrays()
        return float(np.sqrt(np.sum(mats ** 2)))

    # exact symbol evaluation straight from the terms
    def symbol_at(self, xi: Sequence) -> list[list]:
        pt = [GaussianRational.coerce(x) if not isinstance(x, GaussianRational) else x for x in xi]
        if len(pt) != self.n:
            raise OperatorError("frequency has wrong dimension")
        out = [[GaussianRational(0)] * self.dim_v for _ in range(self.dim_w)]
        for alpha, m in self.terms:
            mono = GaussianRational(1)
            for x, a in zip(pt, alpha):
                if a:
                    mono = mono * x ** a
            if mono.is_zero():
                continue
            for r in range(self.dim_w):
                for c in range(self.dim_v):
                    if m[r][c]:
                        out[r][c] = out[r][c] + mono * m[r][c]
        return out

    def symbol_numeric(self, zeta: Sequence[complex]) -> np.ndarray:
        alphas, mats = self.coefficient_arrays()
        z = np.asarray(zeta, dtype=complex)
        mono = np.prod(z[None, :] ** alphas, axis=1)
        return np.einsum("t,tij->ij", mono, mats.astype(complex))

    def to_json_obj(self) -> dict:
        obj = {
            "n": self.n,
            "k": self.k,
            "dim_v": self.dim_v,
            "dim_w": self.dim_w,
            "terms": [
                {"alpha": list(a), "matrix": [[fraction_to_str(x) for x in row] for row in m]}
                for a, m in self.terms
            ],
        }
        if self.name is not None:
            obj["name"] = self.name
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, separators=(",", ":"))

    def describe(self) -> str:
        return f"{self.name or 'operator'}(n={self.n}, k={self.k}, dim_v={self.dim_v}, dim_w={self.dim_w})"


@dataclass(frozen=True)
class Direction:
    """Nonzero rational vector; `unit` is the float normalization."""

    components: tuple[Fraction, ...]

    def __post_init__(self):
        comps = tuple(to_fraction(c) for c in self.components)
        if not comps:
            raise OperatorError("empty direction")
        if not any(comps):
            raise OperatorError("direction must be nonzero")
        object.__setattr__(self, "components", comps)

    @classmethod
    def parse(cls, text: str) -> Direction:
        comps = []
        for p in text.split(","):
            p = p.strip()
            if not _RATIONAL.fullmatch(p):
                raise OperatorError(f"direction component {p!r} is not an exact rational")
            comps.append(Fraction(p))
        return cls(tuple(comps))

    @classmethod
    def axis(cls, n: int, j: int, sign: int = 1) -> Direction:
        return cls(tuple(Fraction(sign if i == j else 0) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def unit(self) -> np.ndarray:
        v = np.array([float(c) for c in self.components])
        return v / np.linalg.norm(v)

    def norm_squared(self) -> Fraction:
        return sum((c * c for c in self.components), Fraction(0))

    def is_unit(self) -> bool:
        return self.norm_squared() == 1

    def __str__(self):
        return ",".join(fraction_to_str(c) for c in self.components)

    def to_json(self) -> list[str]:
        return [fraction_to_str(c) for c in self.components]

    def __neg__(self):
        return Direction(tuple(-c for c in self.components))


def symbol_matrix(op: Operator, nu: Direction | None = None) -> PolyMatrix:
    """Symbol A(xi), or A(xi + i nu) when nu is given, in n real variables."""
    n = op.n
    if nu is not None and nu.n != n:
        raise OperatorError("direction dimension does not match the operator")
    if nu is None:
        factors = [MultiPoly.variable(n, j) for j in range(n)]
    else:
        factors = [MultiPoly.variable(n, j) + GaussianRational(0, nu.components[j]) for j in range(n)]
    cache: dict[tuple[int, int], MultiPoly] = {}

    def power(j, a):
        key = (j, a)
        if key not in cache:
            cache[key] = factors[j] ** a
        return cache[key]

    entries = [[MultiPoly.zero(n) for _ in range(op.dim_v)] for _ in range(op.dim_w)]
    for alpha, m in op.terms:
        mono = MultiPoly.constant(n, 1)
        for j, a in enumerate(alpha):
            if a:
                mono = mono * power(j, a)
        for r in range(op.dim_w):
            for c in range(op.dim_v):
                if m[r][c]:
                    entries[r][c] = entries[r][c] + mono.scale(m[r][c])
    return PolyMatrix(entries, n)


def unit_norm_error(d: Direction) -> float:
    return abs(math.fsum(x * x for x in d.unit) - 1.0)
