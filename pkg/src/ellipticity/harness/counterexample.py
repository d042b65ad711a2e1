"""Product fields psi(y) g(a.y + 2 eps) w with analytic derivatives.

The counterexample family lives in frame coordinates y = Q x where the first
row of Q is the unit normal and the second spans the tangential part of the
witness frequency. Derivatives come from the Leibniz rule

    d^alpha (psi g w) = sum_{beta <= alpha} C(alpha, beta) d^beta psi g^(|alpha - beta|) a^(alpha - beta) w,

so no finite differences touch the near-singular profile."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from ..algebra import multi_indices
from ..operators import Direction, Operator
from .grid import GridField, sample_field

TRACE = "trace"
SOBOLEV = "sobolev"


class CounterexampleError(ValueError):
    pass


# ---------------------------------------------------------------- profiles in w

@dataclass(frozen=True)
class LogPowerForm:
    """sum c * w^beta * log(w)^delta with rational beta, delta in {0, 1}; principal branch."""

    terms: tuple[tuple[Fraction, int, Fraction], ...]

    @classmethod
    def power(cls, beta, coeff=1) -> LogPowerForm:
        return cls(((Fraction(beta), 0, Fraction(coeff)),))

    @staticmethod
    def _make(acc: dict) -> LogPowerForm:
        return LogPowerForm(tuple(sorted((b, d, c) for (b, d), c in acc.items() if c != 0)))

    def derivative(self) -> LogPowerForm:
        acc: dict = {}
        for b, d, c in self.terms:
            if b != 0:
                acc[(b - 1, d)] = acc.get((b - 1, d), 0) + c * b
            if d == 1:
                acc[(b - 1, 0)] = acc.get((b - 1, 0), 0) + c
        return self._make(acc)

    def antiderivative(self) -> LogPowerForm:
        """Formal primitive with zero integration constants."""
        acc: dict = {}
        for b, d, c in self.terms:
            if d == 0:
                key, val = ((0, 1), c) if b == -1 else ((b + 1, 0), c / (b + 1))
                acc[key] = acc.get(key, 0) + val
            else:
                if b == -1:
                    raise CounterexampleError("primitive of log(w)/w leaves the log-power class")
                acc[(b + 1, 1)] = acc.get((b + 1, 1), 0) + c / (b + 1)
                acc[(b + 1, 0)] = acc.get((b + 1, 0), 0) - c / (b + 1) ** 2
        return self._make(acc)

    def __call__(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        logw = np.log(w)
        out = np.zeros_like(w)
        for b, d, c in self.terms:
            if b.denominator == 1:
                t = w ** int(b)
            else:
                t = np.exp(float(b) * logw)
            if d:
                t = t * logw
            out = out + float(c) * t
        return out

    def __str__(self):
        parts = []
        for b, d, c in self.terms:
            parts.append(f"{c}*w^({b})" + ("*log(w)" if d else ""))
        return " + ".join(parts) or "0"


class HolomorphicProfile:
    """g with g^(k-1)(w) = w^beta; forms[j] is the closed form of g^(j)."""

    def __init__(self, beta, k: int, max_order: int | None = None):
        self.beta = Fraction(beta)
        self.k = k
        top = k if max_order is None else max_order
        forms = {k - 1: LogPowerForm.power(self.beta)}
        for j in range(k - 2, -1, -1):
            forms[j] = forms[j + 1].antiderivative()
        for j in range(k, top + 1):
            forms[j] = forms[j - 1].derivative()
        self.forms = forms

    def derivative(self, j: int, w: np.ndarray) -> np.ndarray:
        if j not in self.forms:
            f = self.forms[max(self.forms)]
            for _ in range(j - max(self.forms)):
                f = f.derivative()
            self.forms[j] = f
        return self.forms[j](w)


class ConstantProfile:
    def derivative(self, j: int, w: np.ndarray) -> np.ndarray:
        return np.ones_like(w, dtype=complex) if j == 0 else np.zeros_like(w, dtype=complex)


def sobolev_exponent(n: int) -> Fraction:
    return Fraction(-2 * (n - 1), n)


# ---------------------------------------------------------------- 1D factors

def smoothstep(m: int) -> Polynomial:
    """S on [0, 1] with S(0) = 0, S(1) = 1 and derivatives 1..m vanishing at both ends."""
    base = Polynomial([0, 1]) ** m * Polynomial([1, -1]) ** m
    prim = base.integ()
    return prim / prim(1.0)


class Factor:
    """A one-dimensional factor with derivatives: __call__(t, d)."""

    def __call__(self, t: np.ndarray, d: int = 0) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError


class Plateau(Factor):
    """1 on |t| <= inner, smooth descent to 0 at |t| = outer."""

    def __init__(self, inner: float = 1.0, outer: float = 2.0, smoothness: int = 4):
        self.inner, self.outer = inner, outer
        self.width = outer - inner
        self.s = smoothstep(smoothness)
        self._ds = {}

    def _sd(self, d):
        if d not in self._ds:
            self._ds[d] = self.s.deriv(d) if d else self.s
        return self._ds[d]

    def __call__(self, t, d=0):
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        s = (a - self.inner) / self.width
        mid = (s > 0) & (s < 1)
        out = np.zeros_like(t)
        if d == 0:
            out = np.where(a <= self.inner, 1.0, 0.0)
        vals = -self._sd(d)(np.clip(s, 0, 1)) / self.width ** d
        sign = np.where(t < 0, (-1.0) ** d, 1.0)
        return np.where(mid, sign * vals, out)


class Step(Factor):
    """0 below lo, smooth rise to 1 at hi, 1 above."""

    def __init__(self, lo: float, hi: float, smoothness: int = 4):
        self.lo, self.hi = lo, hi
        self.s = smoothstep(smoothness)

    def __call__(self, t, d=0):
        t = np.asarray(t, dtype=float)
        w = self.hi - self.lo
        s = (t - self.lo) / w
        p = self.s.deriv(d) if d else self.s
        base = np.where(s >= 1, 1.0 if d == 0 else 0.0, 0.0)
        return np.where((s > 0) & (s < 1), p(np.clip(s, 0, 1)) / w ** d, base)


class Bump(Factor):
    """(1 - ((t - c)/r)^2)^m on |t - c| < r."""

    def __init__(self, center: float, radius: float, power: int):
        self.c, self.r, self.m = center, radius, power
        self.p = Polynomial([1, 0, -1]) ** power

    def __call__(self, t, d=0):
        s = (np.asarray(t, dtype=float) - self.c) / self.r
        q = self.p.deriv(d) if d else self.p
        return np.where(np.abs(s) < 1, q(s) / self.r ** d, 0.0)


class ProductFactor(Factor):
    def __init__(self, f: Factor, g: Factor):
        self.f, self.g = f, g

    def __call__(self, t, d=0):
        return sum(comb(d, i) * self.f(t, i) * self.g(t, d - i) for i in range(d + 1))


# ---------------------------------------------------------------- frames

def frame_matrix(nu_unit: np.ndarray, tangent: np.ndarray | None = None) -> np.ndarray:
    """Orthogonal Q with rows (nu, normalized tangential part of `tangent`, completion)."""
    n = len(nu_unit)
    cols = [np.asarray(nu_unit, float)]
    if tangent is not None:
        cols.append(np.asarray(tangent, float))
    cols += [np.eye(n)[j] for j in range(n)]
    basis = []
    for c in cols:
        v = c.copy()
        for b in basis:
            v = v - np.dot(b, v) * b
        nv = np.linalg.norm(v)
        if nv > 1e-10:
            basis.append(v / nv)
        if len(basis) == n:
            break
    return np.array(basis)


def rotate_operator(op: Operator, q: np.ndarray) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Float terms of the operator in coordinates y = Q x: symbol xi_y -> A(Q^T xi_y)."""
    n = op.n
    acc: dict[tuple[int, ...], np.ndarray] = {}
    for alpha, mat in op.terms:
        m = np.array([[float(x) for x in row] for row in mat])
        poly = {tuple([0] * n): 1.0}
        for j, a in enumerate(alpha):
            for _ in range(a):
                nxt: dict = {}
                for e, c in poly.items():
                    for i in range(n):
                        if q[i, j] != 0.0:
                            e2 = list(e)
                            e2[i] += 1
                            e2 = tuple(e2)
                            nxt[e2] = nxt.get(e2, 0.0) + c * q[i, j]
                poly = nxt
        for e, c in poly.items():
            acc[e] = acc.get(e, 0.0) + c * m
    return sorted(acc.items())


# ---------------------------------------------------------------- product fields

@dataclass
class ProductField:
    """u(y) = prod_j factors[j](y_j) * g(a.y + shift) * w."""

    factors: Sequence[Factor]
    profile: object
    a: np.ndarray
    shift: complex
    w: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.factors)

    def _tables(self, y: np.ndarray, order: int):
        y = np.atleast_2d(y)
        fac = [[self.factors[j](y[:, j], d) for d in range(order + 1)] for j in range(self.n)]
        z = y @ self.a + self.shift
        gd = [self.profile.derivative(d, z) for d in range(order + 1)]
        return fac, gd

    def _scalar_partial(self, alpha, fac, gd) -> np.ndarray:
        out = 0.0
        for beta in product(*[range(a + 1) for a in alpha]):
            c = 1.0
            psi = 1.0
            for j, (a, b) in enumerate(zip(alpha, beta)):
                c *= comb(a, b) * self.a[j] ** (a - b)
                psi = psi * fac[j][b]
            out = out + c * psi * gd[sum(alpha) - sum(beta)]
        return out

    def values(self, y: np.ndarray) -> np.ndarray:
        fac, gd = self._tables(y, 0)
        return self._scalar_partial((0,) * self.n, fac, gd)[:, None] * self.w[None, :]

    def partial(self, y: np.ndarray, alpha) -> np.ndarray:
        fac, gd = self._tables(y, sum(alpha))
        return self._scalar_partial(tuple(alpha), fac, gd)[:, None] * self.w[None, :]

    def apply(self, terms, y: np.ndarray) -> np.ndarray:
        """sum_alpha A_alpha d^alpha u for float frame terms, shape (N, dim_w)."""
        order = max(sum(a) for a, _ in terms)
        fac, gd = self._tables(y, order)
        out = 0.0
        for alpha, m in terms:
            s = self._scalar_partial(tuple(alpha), fac, gd)
            out = out + s[:, None] * (m @ self.w)[None, :]
        return out

    def derivative_norm(self, y: np.ndarray, order: int) -> np.ndarray:
        """Frobenius norm of D^order u (multinomial-weighted sum over multi-indices)."""
        fac, gd = self._tables(y, order)
        wn = np.linalg.norm(self.w)
        if order == 0:
            return np.abs(self._scalar_partial((0,) * self.n, fac, gd)) * wn
        acc = 0.0
        for alpha in multi_indices(self.n, order):
            mult = factorial(order) / np.prod([factorial(x) for x in alpha])
            acc = acc + mult * np.abs(self._scalar_partial(alpha, fac, gd)) ** 2
        return np.sqrt(acc) * wn


# ---------------------------------------------------------------- the counterexample family

@dataclass
class WitnessFrame:
    """Normalized witness data: A(nu + i eta) conj(v) = 0 with |nu| = 1."""

    nu: np.ndarray
    eta: np.ndarray
    v: np.ndarray
    q: np.ndarray
    a: np.ndarray
    eta_perp: float
    residual: float


def witness_frame(op: Operator, nu: Direction, frequency: Sequence[complex], v: Sequence[complex],
                  tol: float = 1e-9) -> WitnessFrame:
    """Frame from a boundary witness A(xi + i nu) v = 0 (frequency = xi + i nu)."""
    nu_f = np.array([float(c) for c in nu.components])
    scale = np.linalg.norm(nu_f)
    zeta = np.asarray(frequency, dtype=complex) / scale
    nu_hat = nu_f / scale
    if np.max(np.abs(zeta.imag - nu_hat)) > 1e-9:
        raise CounterexampleError("witness frequency does not have imaginary part nu")
    eta = zeta.real
    vv = np.asarray(v, dtype=complex)
    vv = vv / np.linalg.norm(vv)
    vbar = vv.conj()
    res = np.linalg.norm(op.symbol_numeric(nu_hat + 1j * eta) @ vbar)
    res /= op.coefficient_norm() * (1 + np.linalg.norm(zeta)) ** op.k
    if res > tol:
        raise CounterexampleError(f"witness residual {res:.3e} exceeds {tol:g}")
    return _frame(nu_hat, eta, vv, res)


def _frame(nu_hat, eta, v, residual) -> WitnessFrame:
    perp = eta - np.dot(eta, nu_hat) * nu_hat
    ep = float(np.linalg.norm(perp))
    if ep < 1e-12:
        raise CounterexampleError("witness frequency is parallel to nu (operator is not elliptic)")
    q = frame_matrix(nu_hat, perp)
    a = q @ (nu_hat + 1j * eta)
    return WitnessFrame(nu_hat, eta, v, q, a, ep, residual)


def near_witness_frame(op: Operator, nu: Direction) -> WitnessFrame:
    """For a boundary-elliptic direction: the tangential eta minimizing
    sigma_min(A(eta + i nu)) along the first tangent axis, with its singular vector."""
    from scipy.optimize import minimize_scalar

    nu_hat = nu.unit
    q = frame_matrix(nu_hat)
    t = q[1]

    def smin(s):
        m = op.symbol_numeric(s * t + 1j * nu_hat)
        return np.linalg.svd(m, compute_uv=False)[-1] if m.shape[0] >= m.shape[1] else 0.0

    best = minimize_scalar(smin, bounds=(-4.0, 4.0), method="bounded", options={"xatol": 1e-10})
    s = float(best.x) if abs(best.x) > 1e-6 else 1.0
    m = op.symbol_numeric(s * t + 1j * nu_hat)
    _, sv, vh = np.linalg.svd(m)
    v = vh[-1].conj()
    return _frame(nu_hat, s * t, v / np.linalg.norm(v), float(sv[-1]))


@dataclass
class CounterexampleFamily:
    op: Operator
    frame: WitnessFrame
    variant: str = TRACE
    smoothness: int | None = None

    def __post_init__(self):
        if self.variant not in (TRACE, SOBOLEV):
            raise CounterexampleError(f"unknown variant {self.variant!r}")
        k = self.op.k
        beta = -1 if self.variant == TRACE else sobolev_exponent(self.op.n)
        self.profile = HolomorphicProfile(beta, k, max_order=k)
        if self.smoothness is None:
            self.smoothness = k + 2
        self.frame_terms = rotate_operator(self.op, self.frame.q)

    @property
    def singular_y2(self) -> Callable[[float], float]:
        c = float(self.frame.a[0].imag)
        return lambda eps: 2 * eps * c / self.frame.eta_perp

    def field(self, eps: float) -> ProductField:
        if not 0 < eps < 1:
            raise CounterexampleError("epsilon must lie in (0, 1)")
        n = self.op.n
        rho = Plateau(1.0, 2.0, self.smoothness)
        normal = ProductFactor(rho, Step(-2 * eps, -eps, self.smoothness))
        factors = [normal] + [rho] * (n - 1)
        return ProductField(factors, self.profile, self.frame.a, 2 * eps, self.frame.v.conj(),
                            {"epsilon": eps, "variant": self.variant})

    def face_constant(self) -> float:
        """Leading coefficient F0 of the face norm: face ~ F0 * arsinh(|eta_perp| / (2 eps))."""
        n, k = self.op.n, self.op.k
        return 2 ** (n - 1) * np.linalg.norm(self.frame.a) ** (k - 1) / self.frame.eta_perp

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "nu": self.frame.nu.tolist(),
            "eta": self.frame.eta.tolist(),
            "v": [[z.real, z.imag] for z in self.frame.v],
            "witness_residual": self.frame.residual,
            "frame": self.frame.q.tolist(),
            "profile": {j: str(f) for j, f in sorted(self.profile.forms.items())},
        }


def family_for(op: Operator, nu: Direction, variant: str = TRACE, witness=None) -> tuple[CounterexampleFamily, bool]:
    """(family, failing): a true counterexample from a boundary witness when one
    exists, otherwise the near-witness family for a boundary-elliptic direction."""
    if witness is None:
        from ..taxonomy import check_boundary_ellipticity
        verdict = check_boundary_ellipticity(op, nu)
        witness = verdict.witness if verdict.fails else None
    if witness is not None:
        frame = witness_frame(op, nu, witness.frequency, witness.kernel_vector)
        return CounterexampleFamily(op, frame, variant), True
    return CounterexampleFamily(op, near_witness_frame(op, nu), variant), False


def counterexample_field(op: Operator, nu: Direction, eps: float, variant: str = TRACE, h: float | None = None,
                         box: Sequence[Sequence[float]] | None = None, witness=None) -> GridField:
    """Sample u_eps on a lattice in frame coordinates (axis 0 along nu)."""
    fam, failing = family_for(op, nu, variant, witness)
    if not failing:
        raise CounterexampleError(f"no boundary witness: operator is boundary elliptic in direction {nu}")
    u = fam.field(eps)
    if h is None:
        h = 1 / 64 if op.n == 2 else 1 / 16
    if box is None:
        box = [(0.0, 2.0)] + [(-2.0, 2.0)] * (op.n - 1)
    meta = fam.to_json()
    meta.update({"epsilon": eps, "coordinates": "frame"})
    return sample_field(u.values, box, h, boundary_axis=0, metadata=meta)
