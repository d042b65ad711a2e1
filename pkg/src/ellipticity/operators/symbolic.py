"""Operators derived from a given operator through its symbol."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..algebra import MultiPoly, PolyMatrix, homogeneity_degree, kernel, rank, sylvester_resultant, to_fraction
from ..algebra.polymatrix import determinant
from .model import Direction, Operator, OperatorError, symbol_matrix


def operator_from_symbol(pm: PolyMatrix, k: int, name: str | None = None) -> Operator:
    """Inverse of symbol_matrix for a real, k-homogeneous polynomial matrix."""
    acc: dict[tuple, list[list[Fraction]]] = {}
    for r, row in enumerate(pm.entries):
        for c, p in enumerate(row):
            for e, coef in p.items():
                if sum(e) != k:
                    raise OperatorError(f"symbol entry is not homogeneous of degree {k}")
                if not coef.is_real():
                    raise OperatorError("symbol has non-real coefficients")
                m = acc.setdefault(e, [[Fraction(0)] * pm.cols for _ in range(pm.rows)])
                m[r][c] = coef.re
    return Operator(pm.nvars, k, pm.cols, pm.rows, tuple(acc.items()), name)


def adjoint(op: Operator) -> Operator:
    """(-1)^k sum A_a^T d^a."""
    sign = -1 if op.k % 2 else 1
    terms = tuple(
        (a, tuple(tuple(sign * m[r][c] for r in range(op.dim_w)) for c in range(op.dim_v)))
        for a, m in op.terms
    )
    name = f"adjoint({op.name})" if op.name else None
    return Operator(op.n, op.k, op.dim_w, op.dim_v, terms, name)


def compound_matrix(pm: PolyMatrix, m: int) -> PolyMatrix:
    """m-th compound: entry (I, J) = det pm[I, J] over sorted index subsets."""
    rs = list(combinations(range(pm.rows), m))
    cs = list(combinations(range(pm.cols), m))
    entries = [[determinant([[pm.entries[r][c] for c in J] for r in I]) for J in cs] for I in rs]
    return PolyMatrix(entries, pm.nvars)


def wedge_power(op: Operator, m: int) -> Operator:
    """Operator of order m k acting on the m-th exterior power.

    Basis of the exterior powers: e_{i1} ^ ... ^ e_{im} with i1 < ... < im,
    in lexicographic order."""
    if not 2 <= m <= op.dim_v:
        raise OperatorError(f"wedge power needs 2 <= m <= dim_v = {op.dim_v}, got {m}")
    if m > op.dim_w:
        raise OperatorError("wedge power exceeds dim_w")
    pm = compound_matrix(symbol_matrix(op), m)
    name = f"wedge{m}({op.name})" if op.name else None
    return operator_from_symbol(pm, m * op.k, name)


def plane_slice(op: Operator, d1: Sequence, d2: Sequence) -> Operator:
    """Two-variable operator with symbol (s, t) -> A(s d1 + t d2)."""
    d1 = [to_fraction(x) for x in d1]
    d2 = [to_fraction(x) for x in d2]
    if len(d1) != op.n or len(d2) != op.n:
        raise OperatorError("slice directions must live in R^n")
    if rank([d1, d2]) != 2:
        raise OperatorError("slice directions are linearly dependent")
    sub = [[d1[i], d2[i]] for i in range(op.n)]
    pm = symbol_matrix(op).substitute_linear(sub, 2)
    name = f"slice({op.name})" if op.name else None
    return operator_from_symbol(pm, op.k, name)


def tangent_frame(nu: Direction) -> list[list[Fraction]]:
    """Rational n x n matrix whose last column is nu and whose other columns
    span the orthogonal complement of nu."""
    n = nu.n
    comp = kernel([list(nu.components)], n).basis
    cols = [list(v) for v in comp] + [list(nu.components)]
    return [[to_fraction(cols[j][i]) for j in range(n)] for i in range(n)]


def resultant_P(op: Operator, nu: Direction, w: Sequence, w0: Sequence | None = None) -> MultiPoly:
    """Resultant in xi_n of w0.A(xi) and w.A(xi), with xi_n along nu.

    Result is a polynomial in the n-1 tangential variables of the frame
    returned by tangent_frame."""
    if op.dim_v != 1:
        raise OperatorError("resultant_P needs a scalar-input operator (dim_v = 1)")
    if nu.n != op.n:
        raise OperatorError("direction dimension mismatch")
    a_nu = [row[0] for row in op.symbol_at(list(nu.components))]
    if all(x == 0 for x in a_nu):
        raise OperatorError("A(nu) = 0: not boundary elliptic in nu")
    if w0 is None:
        w0 = [x.re for x in a_nu]
    w0 = [to_fraction(x) for x in w0]
    w = [to_fraction(x) for x in w]
    if len(w0) != op.dim_w or len(w) != op.dim_w:
        raise OperatorError("w and w0 must have length dim_w")
    if all(x == 0 for x in w0):
        raise OperatorError("w0 = 0: not boundary elliptic in nu")
    n = op.n
    pm = symbol_matrix(op).substitute_linear(tangent_frame(nu), n)
    col = pm.column(0)
    zero = MultiPoly.zero(n)

    def contract(vec):
        acc = zero
        for c, p in zip(vec, col):
            if c:
                acc = acc + p.scale(c)
        return acc

    p0 = contract(w0)
    p1 = contract(w)
    if p0.is_zero():
        raise OperatorError("w0 . A vanishes identically")
    if p1.is_zero():
        return MultiPoly.zero(n - 1)
    if p0.degree_in(n - 1) == 0 and p1.degree_in(n - 1) == 0:
        raise OperatorError("neither polynomial depends on the normal variable")
    res = sylvester_resultant(p0.coefficients_in(n - 1), p1.coefficients_in(n - 1))
    if not isinstance(res, MultiPoly):
        res = MultiPoly.constant(n, res)
    return res.drop_variable(n - 1)


def resultant_degree(p: MultiPoly):
    if p.is_zero():
        return None
    return homogeneity_degree(p)
