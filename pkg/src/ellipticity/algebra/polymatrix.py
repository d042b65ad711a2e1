"""Matrices of MultiPoly entries, plus a compiled float form for batched evaluation."""
from __future__ import annotations

from itertools import combinations
from typing import Sequence

import numpy as np

from .linalg import bareiss_determinant
from .numbers import GaussianRational
from .poly import MultiPoly, poly_eval


class PolyMatrix:
    __slots__ = ("rows", "cols", "nvars", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]], nvars: int | None = None):
        ent = tuple(tuple(row) for row in entries)
        if nvars is None:
            if not ent or not ent[0]:
                raise ValueError("nvars required for an empty matrix")
            nvars = ent[0][0].nvars
        if any(len(r) != len(ent[0]) for r in ent):
            raise ValueError("ragged polynomial matrix")
        for row in ent:
            for p in row:
                if not isinstance(p, MultiPoly) or p.nvars != nvars:
                    raise ValueError("entries must be MultiPoly in a shared number of variables")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "rows", len(ent))
        object.__setattr__(self, "cols", len(ent[0]) if ent else 0)
        object.__setattr__(self, "nvars", nvars)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.nvars == other.nvars and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}, nvars={self.nvars})"

    def column(self, j: int) -> list[MultiPoly]:
        return [row[j] for row in self.entries]

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([[self.entries[r][c] for r in range(self.rows)] for c in range(self.cols)], self.nvars)

    def conjugate(self) -> PolyMatrix:
        return PolyMatrix([[p.conjugate() for p in row] for row in self.entries], self.nvars)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows or self.nvars != other.nvars:
            raise ValueError("shape mismatch")
        z = MultiPoly.zero(self.nvars)
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = z
                for t in range(self.cols):
                    acc = acc + self.entries[r][t] * other.entries[t][c]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.nvars)

    def augment(self, column: Sequence) -> PolyMatrix:
        """Append a constant column [M | w]."""
        if len(column) != self.rows:
            raise ValueError("column length mismatch")
        return PolyMatrix(
            [list(row) + [MultiPoly.constant(self.nvars, column[r])] for r, row in enumerate(self.entries)],
            self.nvars,
        )

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def evaluate_exact(self, point: Sequence) -> list[list[GaussianRational]]:
        return [[p.evaluate_exact(point) for p in row] for row in self.entries]

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        return np.array([[poly_eval(p, point) for p in row] for row in self.entries], dtype=complex)

    def substitute_linear(self, matrix: Sequence[Sequence], new_nvars: int | None = None) -> PolyMatrix:
        m = new_nvars if new_nvars is not None else len(matrix[0])
        return PolyMatrix([[p.substitute_linear(matrix, m) for p in row] for row in self.entries], m)

    def minors(self, size: int):
        """Yield (row subset, col subset, determinant) for all size x size minors."""
        for rs in combinations(range(self.rows), size):
            for cs in combinations(range(self.cols), size):
                sub = [[self.entries[r][c] for c in cs] for r in rs]
                yield rs, cs, determinant(sub)

    def determinant(self) -> MultiPoly:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        if self.rows == 0:
            return MultiPoly.constant(self.nvars, 1)
        return determinant(self.entries)

    def compile(self) -> CompiledPolyMatrix:
        return CompiledPolyMatrix.from_polymatrix(self)


def determinant(entries: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    n = len(entries)
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    return bareiss_determinant(entries)


class CompiledPolyMatrix:
    """M(x) = sum_m x^{e_m} C_m with dense complex coefficient matrices C_m."""

    def __init__(self, exponents: np.ndarray, coefficients: np.ndarray, nvars: int, shape: tuple[int, int]):
        self.exponents = np.asarray(exponents, dtype=np.int64).reshape(-1, nvars)
        self.coefficients = np.asarray(coefficients, dtype=complex).reshape(-1, *shape)
        self.nvars = nvars
        self.shape = shape
        if len(self.coefficients):
            self.norms = np.linalg.norm(self.coefficients, ord=2, axis=(1, 2))
            self.frobenius = float(np.sqrt(np.sum(np.abs(self.coefficients) ** 2)))
        else:
            self.norms = np.zeros(0)
            self.frobenius = 0.0
        self.max_power = int(self.exponents.max()) if self.exponents.size else 0

    @classmethod
    def from_polymatrix(cls, pm: PolyMatrix) -> CompiledPolyMatrix:
        exps: dict[tuple, np.ndarray] = {}
        for r, row in enumerate(pm.entries):
            for c, p in enumerate(row):
                for e, coef in p.items():
                    if e not in exps:
                        exps[e] = np.zeros((pm.rows, pm.cols), dtype=complex)
                    exps[e][r, c] = complex(coef)
        keys = sorted(exps)
        coefs = np.array([exps[e] for e in keys]) if keys else np.zeros((0, pm.rows, pm.cols), dtype=complex)
        return cls(np.array(keys, dtype=np.int64).reshape(-1, pm.nvars), coefs, pm.nvars, (pm.rows, pm.cols))

    def monomials(self, points: np.ndarray) -> np.ndarray:
        """(P, M) array of x^{e_m} at each point."""
        pts = np.asarray(points)
        out = np.ones((pts.shape[0], len(self.exponents)), dtype=pts.dtype if np.iscomplexobj(pts) else float)
        for j in range(self.nvars):
            col = pts[:, j]
            powers = np.stack([col ** a for a in range(self.max_power + 1)], axis=1)
            out = out * powers[:, self.exponents[:, j]]
        return out

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Batched evaluation; points has shape (P, nvars), result (P, rows, cols)."""
        pts = np.atleast_2d(np.asarray(points))
        mon = self.monomials(pts)
        return np.einsum("pm,mij->pij", mon, self.coefficients)

    def perturbation_bound(self, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
        """Upper bound on ||M(x) - M(c)||_2 over boxes |x_j - c_j| <= r_j, per box."""
        ac = np.abs(np.asarray(centers, dtype=float))
        r = np.asarray(radii, dtype=float)
        outer = self._abs_monomials(ac + r)
        inner = self._abs_monomials(ac)
        return (outer - inner) @ self.norms

    def _abs_monomials(self, a: np.ndarray) -> np.ndarray:
        out = np.ones((a.shape[0], len(self.exponents)))
        for j in range(self.nvars):
            col = a[:, j]
            powers = np.stack([col ** p for p in range(self.max_power + 1)], axis=1)
            out = out * powers[:, self.exponents[:, j]]
        return out
