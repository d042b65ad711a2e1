"""Exact linear algebra over Q and Q(i)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numbers import GaussianRational, to_fraction


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x.re if x.is_real() else x
    return to_fraction(x)


def _is_zero(x) -> bool:
    return x == 0


def as_matrix(m: Sequence[Sequence]) -> list[list]:
    rows = [[_coerce(x) for x in row] for row in m]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def rref(m: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = as_matrix(m)
    if not a:
        return [], []
    cols = len(a[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(a)) if not _is_zero(a[i][c])), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and not _is_zero(a[i][c]):
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(m: Sequence[Sequence]) -> int:
    return len(rref(m)[1])


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of linearly independent exact vectors. Equality is mutual containment."""

    ambient_dim: int
    basis: tuple[tuple, ...]

    def __post_init__(self):
        for v in self.basis:
            if len(v) != self.ambient_dim:
                raise ValueError("basis vector has wrong length")
        if self.basis and rank(self.basis) != len(self.basis):
            raise ValueError("basis vectors are linearly dependent")

    @classmethod
    def span(cls, vectors: Sequence[Sequence], ambient_dim: int) -> Subspace:
        vecs = [list(v) for v in vectors]
        if not vecs:
            return cls(ambient_dim, ())
        rows, _ = rref(vecs, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls(ambient_dim, tuple(tuple(Fraction(int(i == j)) for j in range(ambient_dim)) for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("vector has wrong length")
        if all(_is_zero(x) for x in v):
            return True
        return rank(list(self.basis) + [list(v)]) == self.dim

    def contains_space(self, other: Subspace) -> bool:
        return all(self.contains(v) for v in other.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and self.contains_space(other)
            and other.contains_space(self)
        )

    __hash__ = None

    def canonical(self) -> Subspace:
        return Subspace.span(self.basis, self.ambient_dim)


def kernel(m: Sequence[Sequence], ncols: int | None = None) -> Subspace:
    a = as_matrix(m)
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    if not a:
        return Subspace.full(cols)
    rows, pivots = rref(a, cols)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(tuple(_coerce(x) for x in v))
    return Subspace(cols, tuple(basis))


def exact_rank_kernel(m: Sequence[Sequence], ncols: int | None = None) -> tuple[int, Subspace]:
    a = as_matrix(m)
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    ker = kernel(a, cols)
    return cols - ker.dim, ker


def column_space(m: Sequence[Sequence]) -> Subspace:
    a = as_matrix(m)
    if not a:
        return Subspace.zero(0)
    cols = [[a[i][j] for i in range(len(a))] for j in range(len(a[0]))]
    return Subspace.span(cols, len(a))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in m]


def subspace_intersection(spaces: Sequence[Subspace]) -> Subspace:
    if not spaces:
        raise ValueError("need at least one subspace")
    d = spaces[0].ambient_dim
    if any(s.ambient_dim != d for s in spaces):
        raise ValueError("ambient dimension mismatch")
    acc = spaces[0].canonical()
    for s in spaces[1:]:
        acc = _intersect2(acc, s)
        if acc.dim == 0:
            break
    return acc


def _intersect2(u: Subspace, v: Subspace) -> Subspace:
    d = u.ambient_dim
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(d)
    # solve sum a_i u_i - sum b_j v_j = 0; each solution gives sum a_i u_i in both spaces
    cols = list(u.basis) + [tuple(-x for x in w) for w in v.basis]
    system = [[c[i] for c in cols] for i in range(d)]
    ker = kernel(system, len(cols))
    vecs = []
    for sol in ker.basis:
        a = sol[: u.dim]
        vecs.append([sum((a[i] * u.basis[i][r] for i in range(u.dim)), Fraction(0)) for r in range(d)])
    return Subspace.span(vecs, d)


def _exact_quotient(a, b):
    if hasattr(a, "exact_div"):
        return a.exact_div(b)
    return a / b


def bareiss_determinant(m: Sequence[Sequence]):
    """Fraction-free determinant over an integral domain with exact division."""
    a = [[Fraction(x) if isinstance(x, int) else x for x in row] for row in m]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    zero = a[0][0] * 0
    one = zero + 1
    sign = 1
    prev = one
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if not a[i][k] == 0), None)
            if swap is None:
                return zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * pivot - a[i][k] * a[k][j]
                a[i][j] = num if prev == one else _exact_quotient(num, prev)
            a[i][k] = zero
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det
