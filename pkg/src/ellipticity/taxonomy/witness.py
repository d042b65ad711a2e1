"""Witness refinement: local least squares, then an exact kernel solve at a rounded frequency."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from ..algebra import GaussianRational, exact_rank_kernel, fraction_to_str
from ..operators import Direction, Operator

DENOMINATORS = (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 25, 32, 50, 64, 100, 128, 256, 1000, 10**4, 10**5, 10**6)


@dataclass(frozen=True)
class Witness:
    frequency: tuple[complex, ...]
    kernel_vector: tuple[complex, ...]
    residual: float
    exact_frequency: tuple[GaussianRational, ...] | None = None
    exact_kernel_vector: tuple[GaussianRational, ...] | None = None

    @property
    def exact(self) -> bool:
        return self.exact_frequency is not None

    def to_json(self) -> dict:
        out = {
            "frequency": [[z.real, z.imag] for z in self.frequency],
            "kernel_vector": [[z.real, z.imag] for z in self.kernel_vector],
            "residual": self.residual,
            "exact": self.exact,
        }
        if self.exact_frequency is not None:
            out["frequency_exact"] = [g.to_json() for g in self.exact_frequency]
            out["kernel_vector_exact"] = [g.to_json() for g in self.exact_kernel_vector]
        return out


def normalized_residual(op: Operator, zeta: Sequence[complex], v: Sequence[complex]) -> float:
    """|A(zeta) v| / (||coefficients||_F (1 + |zeta|)^k) for unit v."""
    z = np.asarray(zeta, dtype=complex)
    vv = np.asarray(v, dtype=complex)
    vv = vv / np.linalg.norm(vv)
    num = np.linalg.norm(op.symbol_numeric(z) @ vv)
    return float(num / (op.coefficient_norm() * (1.0 + np.linalg.norm(z)) ** op.k))


def verify_witness(op: Operator, w: Witness) -> float:
    """Independent residual from the raw coefficient terms."""
    if w.exact_frequency is not None:
        m = op.symbol_at(list(w.exact_frequency))
        v = list(w.exact_kernel_vector)
        for row in m:
            acc = GaussianRational(0)
            for a, b in zip(row, v):
                acc = acc + a * b
            if not acc.is_zero():
                return float("inf")
        return 0.0
    return normalized_residual(op, w.frequency, w.kernel_vector)


def _exact_witness(op: Operator, zeta_exact: list[GaussianRational]) -> Witness | None:
    if all(z.is_zero() for z in zeta_exact):
        return None
    m = op.symbol_at(zeta_exact)
    rank, ker = exact_rank_kernel(m, op.dim_v)
    if ker.dim == 0:
        return None
    v_exact = tuple(GaussianRational.coerce(x) for x in ker.basis[0])
    v = np.array([complex(x) for x in v_exact])
    v = v / np.linalg.norm(v)
    return Witness(
        tuple(complex(z) for z in zeta_exact),
        tuple(complex(x) for x in v),
        0.0,
        tuple(zeta_exact),
        v_exact,
    )


def _round_candidates(z: np.ndarray):
    """Gaussian-rational roundings of a complex vector with growing denominators."""
    seen = set()
    for d in DENOMINATORS:
        q = tuple(
            GaussianRational(Fraction(float(x.real)).limit_denominator(d), Fraction(float(x.imag)).limit_denominator(d))
            for x in z
        )
        key = tuple((g.re, g.im) for g in q)
        if key in seen:
            continue
        seen.add(key)
        yield q


def _smallest_right_singular(m: np.ndarray) -> tuple[float, np.ndarray]:
    rows, cols = m.shape
    u, s, vh = np.linalg.svd(m)
    if rows < cols:
        return 0.0, vh[-1].conj()
    return float(s[cols - 1]), vh[cols - 1].conj()


def refine_witness(
    op: Operator,
    mode: str,
    start: Sequence,
    nu: Direction | None = None,
    tol: float = 1e-9,
    steps: int = 50,
) -> Witness | None:
    """Search near `start` for (zeta, v) with A(zeta) v = 0.

    mode "real": zeta = xi real; "boundary": zeta = xi + i nu with xi real;
    "complex": zeta free in C^n (start may be complex)."""
    n = op.n
    if mode == "boundary":
        if nu is None:
            raise ValueError("boundary mode needs a direction")
        nu_f = np.array([float(c) for c in nu.components])
        nu_exact = [GaussianRational(0, c) for c in nu.components]
    start = np.asarray(start, dtype=complex)

    def zeta_of(p):
        if mode == "real":
            return p[:n].astype(complex)
        if mode == "boundary":
            return p[:n] + 1j * nu_f
        return p[:n] + 1j * p[n:2 * n]

    nz = n if mode in ("real", "boundary") else 2 * n
    if mode == "complex":
        p0 = np.concatenate([start.real, start.imag])
    else:
        p0 = start.real.copy()
    if mode == "real":
        p0 = p0 / max(np.max(np.abs(p0)), 1e-300)
    _, v0 = _smallest_right_singular(op.symbol_numeric(zeta_of(p0)))
    piv = int(np.argmax(np.abs(v0)))
    v0 = v0 * np.exp(-1j * np.angle(v0[piv]))

    def residual(x):
        z = zeta_of(x[:nz])
        v = x[nz:nz + op.dim_v] + 1j * x[nz + op.dim_v:]
        r = op.symbol_numeric(z) @ v
        extra = [np.vdot(v, v).real - 1.0, v[piv].imag]
        if mode == "real":
            extra.append(np.dot(x[:n], x[:n]) - 1.0)
        elif mode == "complex":
            extra.append(np.vdot(z, z).real - 1.0)
        return np.concatenate([r.real, r.imag, extra])

    x0 = np.concatenate([p0, v0.real, v0.imag])
    if mode == "real":
        x0[:n] = p0 / np.linalg.norm(p0)
    elif mode == "complex":
        zz = zeta_of(p0)
        x0[:nz] = np.concatenate([zz.real, zz.imag]) / np.linalg.norm(zz)
    try:
        sol = least_squares(residual, x0, method="trf", max_nfev=steps, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        x = sol.x
    except (ValueError, np.linalg.LinAlgError):
        x = x0
    z = zeta_of(x[:nz])

    # exact attempt at rounded frequencies
    for target in _rounding_targets(z, mode):
        for q in _round_candidates(target):
            if mode == "boundary":
                q = tuple(GaussianRational(g.re) + nu_exact[j] for j, g in enumerate(q))
            elif mode == "real":
                q = tuple(GaussianRational(g.re) for g in q)
            w = _exact_witness(op, list(q))
            if w is not None:
                return w

    s, v = _smallest_right_singular(op.symbol_numeric(z))
    res = normalized_residual(op, z, v)
    if res <= tol and np.linalg.norm(z) > 0:
        return Witness(tuple(complex(t) for t in z), tuple(complex(t) for t in v / np.linalg.norm(v)), res)
    return None


def _rounding_targets(z: np.ndarray, mode: str):
    yield z
    if mode == "real":
        m = np.max(np.abs(z.real))
        if m > 0:
            yield z.real / m
    elif mode == "complex":
        j = int(np.argmax(np.abs(z)))
        if abs(z[j]) > 0:
            yield z / z[j]


def format_vector(v: Sequence[Fraction]) -> list[str]:
    return [fraction_to_str(x) for x in v]
