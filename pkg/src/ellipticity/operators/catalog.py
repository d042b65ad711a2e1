"""Named example operators.

Matrix-valued targets are flattened row-major over the upper triangle
(11, 12, ..., 1n, 22, ...). Off-diagonal entries are stored once with
weight 1, so eps_ij = (d_i u_j + d_j u_i)/2 appears a single time.
"""
from __future__ import annotations

from fractions import Fraction

from ..algebra import multi_indices
from .model import Operator, OperatorError

HALF = Fraction(1, 2)


def _unit(n: int, j: int) -> tuple[int, ...]:
    return tuple(1 if i == j else 0 for i in range(n))


def _build(n, k, dim_v, dim_w, entries, name) -> Operator:
    """entries: iterable of (row, col, alpha, coefficient)."""
    acc: dict[tuple, list[list[Fraction]]] = {}
    for r, c, alpha, coef in entries:
        m = acc.setdefault(tuple(alpha), [[Fraction(0)] * dim_v for _ in range(dim_w)])
        m[r][c] += Fraction(coef)
    return Operator(n, k, dim_v, dim_w, tuple(acc.items()), name)


def _need(cond: bool, msg: str):
    if not cond:
        raise OperatorError(msg)


def gradient(n: int, N: int = 1) -> Operator:
    _need(n >= 1 and N >= 1, "gradient needs n >= 1, N >= 1")
    entries = [(c * n + j, c, _unit(n, j), 1) for c in range(N) for j in range(n)]
    return _build(n, 1, N, N * n, entries, "gradient")


def kth_gradient(n: int, k: int = 2, N: int = 1) -> Operator:
    """All order-k partials, one row per (component, multi-index)."""
    _need(n >= 1 and k >= 1 and N >= 1, "kth_gradient needs n, k, N >= 1")
    alphas = list(multi_indices(n, k))
    entries = [(c * len(alphas) + i, c, a, 1) for c in range(N) for i, a in enumerate(alphas)]
    return _build(n, k, N, N * len(alphas), entries, "kth_gradient")


def divergence(n: int) -> Operator:
    _need(n >= 1, "divergence needs n >= 1")
    return _build(n, 1, n, 1, [(0, j, _unit(n, j), 1) for j in range(n)], "divergence")


def laplacian(n: int, N: int = 1) -> Operator:
    _need(n >= 1 and N >= 1, "laplacian needs n >= 1, N >= 1")
    entries = [(c, c, tuple(2 if i == j else 0 for i in range(n)), 1) for c in range(N) for j in range(n)]
    return _build(n, 2, N, N, entries, "laplacian")


def cauchy_riemann(n: int = 2) -> Operator:
    _need(n == 2, "cauchy_riemann is defined for n = 2")
    e1, e2 = (1, 0), (0, 1)
    entries = [(0, 0, e1, 1), (0, 1, e2, -1), (1, 0, e2, 1), (1, 1, e1, 1)]
    return _build(2, 1, 2, 2, entries, "cauchy_riemann")


def sym_index(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def symmetric_gradient(n: int) -> Operator:
    _need(n >= 1, "symmetric_gradient needs n >= 1")
    entries = []
    for r, (i, j) in enumerate(sym_index(n)):
        if i == j:
            entries.append((r, i, _unit(n, i), 1))
        else:
            entries.append((r, j, _unit(n, i), HALF))
            entries.append((r, i, _unit(n, j), HALF))
    return _build(n, 1, n, n * (n + 1) // 2, entries, "symmetric_gradient")


def dev_symmetric_gradient(n: int) -> Operator:
    """Trace-free part of the symmetric gradient."""
    _need(n >= 2, "dev_symmetric_gradient needs n >= 2")
    entries = []
    for r, (i, j) in enumerate(sym_index(n)):
        if i == j:
            entries.append((r, i, _unit(n, i), 1))
            for l in range(n):
                entries.append((r, l, _unit(n, l), Fraction(-1, n)))
        else:
            entries.append((r, j, _unit(n, i), HALF))
            entries.append((r, i, _unit(n, j), HALF))
    return _build(n, 1, n, n * (n + 1) // 2, entries, "dev_symmetric_gradient")


def directional_example(n: int = 3, N: int = 3) -> Operator:
    """First-order operator from R^N to ((N-1)n - 1) x 2 matrices.

    Row layout (each row has two columns, flattened row-major):
      (d1 u1 - d2 u2, d1 u2 + d2 u1)
      (dj u1, dj u2)        for j = 3..n
      (dj ul, 0)            for l = 3..N, j = 1..n
    """
    _need(n >= 3 and N >= 3, "directional_example needs n >= 3 and N >= 3")
    rows = (N - 1) * n - 1
    e = lambda j: _unit(n, j - 1)
    entries = [
        (0, 0, e(1), 1), (0, 1, e(2), -1),
        (1, 1, e(1), 1), (1, 0, e(2), 1),
    ]
    r = 1
    for j in range(3, n + 1):
        entries.append((2 * r, 0, e(j), 1))
        entries.append((2 * r + 1, 1, e(j), 1))
        r += 1
    for l in range(3, N + 1):
        for j in range(1, n + 1):
            entries.append((2 * r, l - 1, e(j), 1))
            # second column of this row is the explicit zero block
            r += 1
    assert r == rows
    return _build(n, 1, N, 2 * rows, entries, "directional_example")


CATALOG = {
    "gradient": (gradient, {"n": "space dimension >= 1", "N": "components (default 1)"}),
    "kth_gradient": (kth_gradient, {"n": "space dimension >= 1", "k": "order (default 2)", "N": "components (default 1)"}),
    "divergence": (divergence, {"n": "space dimension >= 1"}),
    "laplacian": (laplacian, {"n": "space dimension >= 1", "N": "components (default 1)"}),
    "cauchy_riemann": (cauchy_riemann, {"n": "must be 2"}),
    "symmetric_gradient": (symmetric_gradient, {"n": "space dimension >= 1"}),
    "dev_symmetric_gradient": (dev_symmetric_gradient, {"n": "space dimension >= 2"}),
    "directional_example": (directional_example, {"n": "space dimension >= 3", "N": "components >= 3"}),
}


def catalog(name: str, **params) -> Operator:
    if name not in CATALOG:
        raise OperatorError(f"unknown catalog operator {name!r}; known: {', '.join(sorted(CATALOG))}")
    builder, schema = CATALOG[name]
    unknown = set(params) - set(schema)
    if unknown:
        raise OperatorError(f"{name} does not take parameter(s) {sorted(unknown)}")
    clean = {k: v for k, v in params.items() if v is not None}
    try:
        return builder(**clean)
    except TypeError as exc:
        raise OperatorError(f"invalid parameters for {name}: {exc}") from None


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def catalog_schema() -> dict[str, dict[str, str]]:
    return {name: dict(schema) for name, (_, schema) in sorted(CATALOG.items())}


def default_params(name: str, n: int | None = None, N: int | None = None) -> dict:
    _, schema = CATALOG[name]
    out = {}
    if "n" in schema and n is not None:
        out["n"] = n
    if "N" in schema and N is not None:
        out["N"] = N
    return out
