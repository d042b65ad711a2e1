"""Sylvester resultants of univariate polynomials over an exact ring."""
from __future__ import annotations

from typing import Sequence

from .linalg import bareiss_determinant


def _strip(coeffs: Sequence) -> list:
    """Drop zero leading coefficients (coefficients are stored lowest degree first)."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def sylvester_matrix(p: Sequence, q: Sequence) -> list[list]:
    """Sylvester matrix of p, q given as coefficient lists, lowest degree first."""
    p, q = _strip(p), _strip(q)
    m, n = len(p) - 1, len(q) - 1
    if m < 0 or n < 0:
        raise ValueError("Sylvester matrix of a zero polynomial")
    sample = p[-1]
    zero = sample * 0
    size = m + n
    rows = []
    hp = list(reversed(p))
    hq = list(reversed(q))
    for i in range(n):
        rows.append([zero] * i + hp + [zero] * (size - i - len(hp)))
    for i in range(m):
        rows.append([zero] * i + hq + [zero] * (size - i - len(hq)))
    return rows


def sylvester_resultant(p: Sequence, q: Sequence):
    """Res(p, q) = det Syl(p, q), computed fraction-free.

    Coefficients may be any ring elements supporting +, -, * and exact
    division (Fractions, Gaussian rationals, MultiPoly)."""
    ps, qs = _strip(p), _strip(q)
    if not ps and not qs:
        raise ValueError("resultant of two zero polynomials is undefined")
    if not ps or not qs:
        nonzero = ps or qs
        if len(nonzero) == 1:
            raise ValueError("resultant needs a polynomial of degree at least 1")
        return nonzero[-1] * 0
    if len(ps) == 1 and len(qs) == 1:
        return ps[0] * 0 + 1
    return bareiss_determinant(sylvester_matrix(ps, qs))
