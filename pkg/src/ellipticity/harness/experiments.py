"""Halfspace experiments: trace blow-up, bounded ratios, Sobolev ratios,
the trace-free null field, the representation formula and kernel decay."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..constructions.kernel import KernelProfile, default_profile, sobolev_kernel
from ..operators import Direction, Operator
from .besov import besov_seminorm_detailed
from .counterexample import (
    Bump,
    ConstantProfile,
    CounterexampleFamily,
    Plateau,
    ProductField,
    frame_matrix,
    family_for,
    rotate_operator,
)
from .curve import LOG, LOG_INVERSE, LOG_X, POWER, ExperimentCurve
from .fd import ONE_SIDED, apply_operator_fd, apply_terms_fd, derivative_norm_fd
from .grid import GridField, sample_field
from .norms import lp_norm
from .quadrature import graded_breaks, panel_rule, tensor_integrate

DEFAULT_EPS = tuple(2.0 ** -j for j in range(3, 11))


class ExperimentError(ValueError):
    pass


def default_h(n: int) -> float:
    return 1 / 64 if n == 2 else 1 / 16


def default_order(n: int) -> int:
    return 8 if n == 2 else 4


# ---------------------------------------------------------------- trace ratios

def _face_points(y: np.ndarray) -> np.ndarray:
    return np.concatenate([np.zeros((len(y), 1)), y], axis=1)


def counterexample_norms(fam: CounterexampleFamily, eps: float, h: float, order: int) -> tuple[float, float]:
    """(||D^(k-1) u||_L1(face), ||A u||_L1(H+)) by graded Gauss quadrature."""
    n, k = fam.op.n, fam.op.k
    u = fam.field(eps)
    s = eps / 4
    r_normal = panel_rule(graded_breaks(0.0, 2.0, h, [(0.0, s)]), order)
    r_tan = panel_rule(graded_breaks(-2.0, 2.0, h, [(0.0, s), (fam.singular_y2(eps), s)]), order)
    r_rest = panel_rule(graded_breaks(-2.0, 2.0, h), order)
    bulk_rules = [r_normal, r_tan] + [r_rest] * (n - 2)
    vol = tensor_integrate(lambda y: np.linalg.norm(u.apply(fam.frame_terms, y), axis=1), bulk_rules)
    face = tensor_integrate(lambda y: u.derivative_norm(_face_points(y), k - 1), bulk_rules[1:])
    return face, vol


def random_bump(op: Operator, rng: np.random.Generator, centered_on_face: bool = True) -> tuple[ProductField, list]:
    """Product bump in frame coordinates: axis 0 is the normal."""
    n, k = op.n, op.k
    m = k + 3
    r = rng.uniform(0.4, 1.0)
    c0 = 0.0 if centered_on_face else rng.uniform(0.0, 0.5 * r)
    centers = [c0] + list(rng.uniform(-0.5, 0.5, size=n - 1))
    radii = [r] + list(r * rng.uniform(0.6, 1.0, size=n - 1))
    w = rng.normal(size=op.dim_v)
    w = w / np.linalg.norm(w)
    factors = [Bump(c, rr, m) for c, rr in zip(centers, radii)]
    f = ProductField(factors, ConstantProfile(), np.zeros(n, dtype=complex), 0.0, w.astype(complex),
                     {"centers": centers, "radii": radii, "w": w.tolist()})
    return f, list(zip(centers, radii))


def bump_trace_ratio(op: Operator, terms, bump: ProductField, support, h: float, order: int) -> tuple[float, float]:
    (c0, r0), rest = support[0], support[1:]
    rules = [panel_rule(graded_breaks(max(0.0, c0 - r0), c0 + r0, h), order)]
    rules += [panel_rule(graded_breaks(c - r, c + r, h), order) for c, r in rest]
    vol = tensor_integrate(lambda y: np.linalg.norm(bump.apply(terms, y), axis=1), rules)
    face = tensor_integrate(lambda y: bump.derivative_norm(_face_points(y), op.k - 1), rules[1:])
    return face, vol


def trace_blowup_experiment(op: Operator, nu: Direction, eps_list: Sequence[float] = DEFAULT_EPS,
                            h: float | None = None, order: int | None = None, witness=None,
                            bumps: int = 20, seed: int = 0) -> ExperimentCurve:
    """Face-norm ratio ||D^(k-1) u_eps||_L1(face) / ||A u_eps||_L1(H+) over eps.

    With a boundary witness the ordinates are normalized by F0 / Vbar (F0 the
    leading face coefficient, Vbar the geometric mean of the volume norms), so
    the asymptotic slope against log(1/eps) is that of arsinh, namely 1.
    Without one (boundary-elliptic direction) the near-witness family and
    `bumps` random bumps give raw ratios, whose spread is reported."""
    h = h or default_h(op.n)
    order = order or default_order(op.n)
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    if len(eps_list) < 3:
        raise ExperimentError("need at least three epsilon values")
    fam, failing = family_for(op, nu, witness=witness)
    faces, vols = [], []
    for e in eps_list:
        f, v = counterexample_norms(fam, e, h, order)
        faces.append(f)
        vols.append(v)
    faces, vols = np.array(faces), np.array(vols)
    raw = faces / vols
    base = {"operator": op.describe(), "direction": str(nu), "h": h, "gauss_order": order,
            "family": fam.to_json()}
    if failing:
        vbar = float(np.exp(np.mean(np.log(vols))))
        f0 = fam.face_constant()
        ords = raw * vbar / f0
        curve = ExperimentCurve(eps_list, ords, LOG, LOG_INVERSE, "trace-blowup",
                                {"raw_ratio": raw, "face": faces, "volume": vols, "face_over_F0": faces / f0})
        curve.summary = dict(base, variant="blowup", F0=f0, volume_geomean=vbar,
                             volume_variation=float(vols.max() / vols.min() - 1.0),
                             face_monotone=bool(np.all(np.diff(faces) > 0)), slope_target=1.0)
        return curve
    rng = np.random.default_rng(seed)
    q = frame_matrix(nu.unit)
    terms = rotate_operator(op, q)
    bump_ratios = []
    for _ in range(bumps):
        b, sup = random_bump(op, rng)
        f, v = bump_trace_ratio(op, terms, b, sup, h, order)
        bump_ratios.append(f / v)
    allr = np.concatenate([raw, bump_ratios]) if bumps else raw
    curve = ExperimentCurve(eps_list, raw, LOG, LOG_INVERSE, "trace-bounded", {"face": faces, "volume": vols})
    curve.summary = dict(base, variant="bounded", bump_ratios=[float(x) for x in bump_ratios], seed=seed,
                         max_ratio=float(allr.max()), min_ratio=float(allr.min()),
                         max_over_min=float(allr.max() / allr.min()))
    return curve


# ---------------------------------------------------------------- trace-free null field

def null_field(x: np.ndarray) -> np.ndarray:
    """f = (x1 / |x|^2, -x2 / |x|^2) in two dimensions."""
    r2 = x[:, 0] ** 2 + x[:, 1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.stack([x[:, 0] / r2, -x[:, 1] / r2], axis=1)


def null_field_jacobian(x: np.ndarray) -> np.ndarray:
    """J[:, i, j] = d_j f_i."""
    x1, x2 = x[:, 0], x[:, 1]
    r4 = (x1 ** 2 + x2 ** 2) ** 2
    a = (x2 ** 2 - x1 ** 2) / r4
    b = 2 * x1 * x2 / r4
    return np.stack([np.stack([a, -b], axis=1), np.stack([b, a], axis=1)], axis=1)


def _first_order_apply(op: Operator, jac: np.ndarray) -> np.ndarray:
    out = 0.0
    for alpha, m in op.terms:
        j = alpha.index(1)
        mm = np.array([[float(x) for x in row] for row in m])
        out = out + jac[:, :, j] @ mm.T
    return out


def _require_null(op: Operator):
    if op.n != 2 or op.k != 1 or op.dim_v != 2:
        raise ExperimentError("the null field lives in R^2 for first-order operators on R^2-valued maps")
    pts = np.array([[0.3, 0.7], [-1.2, 0.4], [2.0, -0.5]])
    if np.max(np.abs(_first_order_apply(op, null_field_jacobian(pts)))) > 1e-12:
        raise ExperimentError(f"{op.describe()} does not annihilate the null field")


@dataclass
class NullFieldCheck:
    hs: list[float]
    errors: list[float]
    orders: list[float]
    inner: float

    def to_json(self) -> dict:
        return {"h": self.hs, "max_error": self.errors, "orders": self.orders, "inner_radius": self.inner}


def null_field_fd_check(op: Operator, hs: Sequence[float] = (1 / 64, 1 / 128), inner: float = 0.25,
                        half_width: float = 1.0) -> NullFieldCheck:
    """max |A f| by central differences on the annulus |x| >= inner, measured on
    the coarsest lattice (shared by all finer ones)."""
    _require_null(op)
    hs = sorted(hs, reverse=True)
    box = [(-half_width, half_width)] * 2
    coarse = None
    errors = []
    for h in hs:
        u = sample_field(null_field, box, h)
        u.values[~np.isfinite(u.values)] = 0.0
        r = apply_operator_fd(op, u)
        pts = r.points().reshape(-1, 2)
        mag = np.linalg.norm(r.values, axis=-1).ravel()
        if coarse is None:
            coarse = hs[0]
        on_coarse = np.all(np.abs(pts / coarse - np.round(pts / coarse)) < 1e-9, axis=1)
        mask = on_coarse & (np.linalg.norm(pts, axis=1) >= inner)
        errors.append(float(mag[mask].max()))
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(len(hs) - 1)]
    return NullFieldCheck(list(hs), errors, orders, inner)


def truncation_face_norms(op: Operator, nu: Direction, radius: float, inner: float = 1.0,
                          order: int = 8, panel: float = 0.125) -> tuple[float, float]:
    """(face L1 norm of eta_R f over |t| >= inner, ||A(eta_R f)||_L1 on H+ minus B_inner)."""
    _require_null(op)
    eta = Plateau(radius, 2 * radius, 1)
    nu_u = nu.unit
    perp = np.array([-nu_u[1], nu_u[0]])
    nodes, w = panel_rule(graded_breaks(inner, 2 * radius, panel), order)
    face = 0.0
    for sgn in (1.0, -1.0):
        pts = sgn * nodes[:, None] * perp[None, :]
        face += float(w @ (eta(nodes) * np.linalg.norm(null_field(pts), axis=1)))
    # bulk in polar coordinates, angle measured from nu across the half plane
    rn, rw = panel_rule(graded_breaks(inner, 2 * radius, panel), order)
    an, aw = panel_rule(graded_breaks(-math.pi / 2, math.pi / 2, math.pi / 32), order)
    rr, aa = np.meshgrid(rn, an, indexing="ij")
    dirs = np.cos(aa)[..., None] * nu_u + np.sin(aa)[..., None] * perp
    pts = (rr[..., None] * dirs).reshape(-1, 2)
    r = rr.ravel()
    f = null_field(pts)
    jac = null_field_jacobian(pts) * eta(r)[:, None, None]
    grad_eta = eta(r, 1)[:, None] * pts / r[:, None]
    jac = jac + f[:, :, None] * grad_eta[:, None, :]
    mag = np.linalg.norm(_first_order_apply(op, jac), axis=1).reshape(rr.shape)
    bulk = float(rw @ ((mag * rr) @ aw))
    return face, bulk


def truncation_experiment(op: Operator, nu: Direction, radii: Sequence[float] = (4, 8, 16, 32),
                          inner: float = 1.0) -> ExperimentCurve:
    faces, bulks = [], []
    for R in radii:
        f, b = truncation_face_norms(op, nu, R, inner)
        faces.append(f)
        bulks.append(b)
    curve = ExperimentCurve(radii, faces, LOG, LOG_X, "truncation", {"bulk": bulks})
    curve.summary = {"operator": op.describe(), "direction": str(nu), "inner_radius": inner, "slope_target": 2.0,
                     "bulk_max_over_min": float(max(bulks) / min(bulks))}
    return curve


# ---------------------------------------------------------------- Sobolev ratios

def sobolev_exponent_p(n: int) -> float:
    return n / (n - 1)


def _terms_for(op: Operator, u: GridField):
    q = u.metadata.get("frame")
    if q is None:
        alphas, mats = op.coefficient_arrays()
        return list(zip(map(tuple, alphas), mats))
    return rotate_operator(op, np.asarray(q))


def sobolev_ratio_field(op: Operator, u: GridField) -> tuple[float, float]:
    """(||D^(k-1) u||_{L^{n/(n-1)}(H+)}, ||A u||_L1(H+)) by finite differences."""
    if u.boundary_axis is None:
        raise ExperimentError("fields must carry the halfspace face as boundary axis")
    p = sobolev_exponent_p(op.n)
    num = lp_norm(derivative_norm_fd(u, op.k - 1, ONE_SIDED), p)
    den = lp_norm(apply_terms_fd(_terms_for(op, u), op.dim_v, u, ONE_SIDED), 1.0)
    return num, den


def dilate(u: GridField) -> GridField:
    """u(2x) on the same spacing: every other lattice value on the halved box."""
    if any(c % 2 == 0 for c in u.counts):
        raise ExperimentError("dilation needs an odd number of points per axis")
    if any(abs(lo / u.h - round(lo / u.h)) > 1e-9 for lo, _ in u.box):
        raise ExperimentError("box corners must be lattice multiples")
    sl = tuple(slice(0, None, 2) for _ in u.counts)
    box = tuple((lo / 2, hi / 2) for lo, hi in u.box)
    return GridField(box, u.h, u.values[sl], u.boundary_axis, dict(u.metadata, dilated=2))


def counterexample_sobolev_norms(fam: CounterexampleFamily, eps: float, h: float, order: int) -> tuple[float, float]:
    n, k = fam.op.n, fam.op.k
    p = sobolev_exponent_p(n)
    u = fam.field(eps)
    s = eps / 4
    rules = [panel_rule(graded_breaks(0.0, 2.0, h, [(0.0, s)]), order),
             panel_rule(graded_breaks(-2.0, 2.0, h, [(0.0, s), (fam.singular_y2(eps), s)]), order)]
    rules += [panel_rule(graded_breaks(-2.0, 2.0, h), order)] * (n - 2)
    num = tensor_integrate(lambda y: u.derivative_norm(y, k - 1) ** p, rules) ** (1 / p)
    den = tensor_integrate(lambda y: np.linalg.norm(u.apply(fam.frame_terms, y), axis=1), rules)
    return num, den


def sobolev_ratio_experiment(op: Operator, nu: Direction, family, eps_list: Sequence[float] = DEFAULT_EPS,
                             h: float | None = None, order: int | None = None) -> ExperimentCurve:
    """Ratio ||D^(k-1) u||_{L^{n/(n-1)}(H+)} / ||A u||_L1(H+).

    `family` is either a list of GridFields (finite differences, with a
    dilation check for every field) or a CounterexampleFamily of the Sobolev
    variant (quadrature over eps_list)."""
    h = h or default_h(op.n)
    if isinstance(family, CounterexampleFamily):
        order = order or default_order(op.n)
        eps_list = sorted((float(e) for e in eps_list), reverse=True)
        nums, dens = zip(*(counterexample_sobolev_norms(family, e, h, order) for e in eps_list))
        ratios = np.array(nums) / np.array(dens)
        curve = ExperimentCurve(eps_list, ratios, LOG, LOG_INVERSE, "sobolev-counterexample",
                                {"numerator": nums, "denominator": dens})
        curve.summary = {"operator": op.describe(), "direction": str(nu), "variant": family.variant,
                         "exponent": str(family.profile.beta),
                         "growing": curve.is_monotone_increasing(), "h": h, "gauss_order": order}
        return curve
    fields = list(family)
    if len(fields) < 3:
        raise ExperimentError("need at least three fields")
    ratios, dil, zero = [], [], []
    for i, u in enumerate(fields):
        num, den = sobolev_ratio_field(op, u)
        if den <= 1e-300:
            zero.append(i)
            ratios.append(np.nan)
            dil.append(np.nan)
            continue
        ratios.append(num / den)
        n2, d2 = sobolev_ratio_field(op, dilate(u))
        dil.append(abs(n2 / d2 - num / den) / (num / den))
    good = [r for r in ratios if np.isfinite(r)]
    if len(good) < 3:
        raise ExperimentError("fewer than three fields with nonzero A u")
    idx = [i + 1 for i, r in enumerate(ratios) if np.isfinite(r)]
    curve = ExperimentCurve(idx, good, LOG, LOG_X, "sobolev-ratio",
                            {"dilation_rel_change": [d for d in dil if np.isfinite(d)]})
    curve.summary = {"operator": op.describe(), "direction": str(nu), "max_ratio": float(max(good)),
                     "min_ratio": float(min(good)), "max_dilation_change": float(np.nanmax(dil)),
                     "zero_denominator": zero, "h": fields[0].h}
    return curve


def random_bump_fields(op: Operator, nu: Direction, count: int, seed: int = 0, h: float | None = None,
                       height: float = 2.0) -> list[GridField]:
    """Seeded product bumps sampled on the halfspace box in frame coordinates."""
    h = h or default_h(op.n)
    rng = np.random.default_rng(seed)
    q = frame_matrix(nu.unit)
    box = [(0.0, height)] + [(-2.0, 2.0)] * (op.n - 1)
    out = []
    for _ in range(count):
        b, _ = random_bump(op, rng, centered_on_face=False)
        u = sample_field(lambda y: b.values(y).real, box, h, boundary_axis=0,
                         metadata={"frame": q.tolist(), "coordinates": "frame", **b.meta})
        out.append(u)
    return out


# ---------------------------------------------------------------- representation formula

@dataclass(frozen=True)
class SmoothField:
    value: Callable
    grad: Callable
    center: tuple[float, ...]
    radius: float

    def shifted(self, s) -> SmoothField:
        s = np.asarray(s, float)
        return SmoothField(lambda x: self.value(x - s), lambda x: self.grad(x - s),
                           tuple(np.asarray(self.center) + s), self.radius)


def standard_bump(center=(0.0, 0.0), radius: float = 1.0, power: int = 4) -> SmoothField:
    c = np.asarray(center, float)

    def value(x):
        s = np.sum((np.atleast_2d(x) - c) ** 2, axis=1) / radius ** 2
        return np.where(s < 1, np.clip(1 - s, 0, None) ** power, 0.0)

    def grad(x):
        d = np.atleast_2d(x) - c
        s = np.sum(d ** 2, axis=1) / radius ** 2
        g = np.where(s < 1, -2 * power * np.clip(1 - s, 0, None) ** (power - 1) / radius ** 2, 0.0)
        return g[:, None] * d

    return SmoothField(value, grad, tuple(c), radius)


def default_probes(center=(0.0, 0.0), spread: float = 0.6) -> np.ndarray:
    t = np.linspace(-spread, spread, 5)
    return np.array([[center[0] + a, center[1] + b] for a in t for b in t])


@dataclass
class RepresentationResult:
    h: float
    errors: list[float]
    max_error: float
    relative_error: float

    def to_json(self) -> dict:
        return {"h": self.h, "max_error": self.max_error, "relative_error": self.relative_error,
                "probe_errors": self.errors}


def representation_value(u: SmoothField, x: np.ndarray, profile: KernelProfile, h: float,
                         singular_cells: float = 2.0, polar_order: int = 16) -> float:
    """int K_1(y) . grad u(x + y) dy: lattice sum outside |y| <= singular_cells * h,
    polar Gauss rule inside it (the 1/|y| factor cancels against r dr)."""
    n = 2
    r0 = singular_cells * h
    c = np.asarray(u.center) - x
    lo = np.floor((c - u.radius) / h).astype(int)
    hi = np.ceil((c + u.radius) / h).astype(int)
    ax = [np.arange(a, b + 1) * h for a, b in zip(lo, hi)]
    ys = np.stack(np.meshgrid(*ax, indexing="ij"), axis=-1).reshape(-1, n)
    r = np.linalg.norm(ys, axis=1)
    keep = (r > r0) & (ys[:, 1] > 0.5 * r)
    ys = ys[keep]
    kv = np.stack([sobolev_kernel(n, 1, profile, ys, (j,)) for j in range(n)], axis=1)
    lattice = h * h * math.fsum(np.sum(kv * u.grad(x + ys), axis=1).tolist())
    # K_1(r theta) . grad u r = -c phi(theta_2) theta . grad u(x + r theta)
    tn, tw = np.polynomial.legendre.leggauss(polar_order)
    a0, a1 = math.pi / 6, 5 * math.pi / 6
    ang = 0.5 * (a1 - a0) * tn + 0.5 * (a1 + a0)
    aw = 0.5 * (a1 - a0) * tw
    rad = 0.5 * r0 * (tn + 1)
    rw = 0.5 * r0 * tw
    rr, aa = np.meshgrid(rad, ang, indexing="ij")
    th = np.stack([np.cos(aa), np.sin(aa)], axis=-1).reshape(-1, n)
    pts = x + rr.reshape(-1, 1) * th
    integrand = -profile.phi(th[:, 1]) * np.sum(th * u.grad(pts), axis=1)
    polar = float(rw @ integrand.reshape(rr.shape) @ aw)
    return lattice + polar


def verify_representation(u: SmoothField | None = None, profile: KernelProfile | None = None, h: float = 1 / 128,
                          probes: np.ndarray | None = None) -> RepresentationResult:
    """Reconstruct u at the probes from its gradient (the n = 2, k = 1 kernel)."""
    u = u or standard_bump()
    profile = profile or default_profile(2)
    probes = default_probes(u.center) if probes is None else np.atleast_2d(probes)
    exact = u.value(probes)
    rec = np.array([representation_value(u, p, profile, h) for p in probes])
    err = np.abs(rec - exact)
    scale = float(np.max(np.abs(exact)))
    return RepresentationResult(h, err.tolist(), float(err.max()), float(err.max() / scale) if scale else 0.0)


def zero_field() -> SmoothField:
    return SmoothField(lambda x: np.zeros(len(np.atleast_2d(x))), lambda x: np.zeros_like(np.atleast_2d(x)),
                       (0.0, 0.0), 1.0)


# ---------------------------------------------------------------- kernel decay

@dataclass
class DecayResult:
    exponent: float
    bound: float
    passes: bool
    vanishes_on_fit_range: bool
    shell_l1: list[float] = field(default_factory=list)
    shell_ratios: list[float] = field(default_factory=list)
    besov: list[float] = field(default_factory=list)
    besov_increments: list[float] = field(default_factory=list)

    @property
    def shells_geometric(self) -> bool:
        rs = [r for r in self.shell_ratios if np.isfinite(r)]
        return all(r < 1.0 for r in rs) and (not rs or max(rs) < 0.95)

    def to_json(self) -> dict:
        # a kernel that vanishes on the fit range has exponent -inf, reported as null
        exp = self.exponent if math.isfinite(self.exponent) else None
        return {"exponent": exp, "bound": self.bound, "passes": self.passes,
                "vanishes_on_fit_range": self.vanishes_on_fit_range, "shell_l1": self.shell_l1,
                "shell_ratios": self.shell_ratios, "besov": self.besov, "besov_increments": self.besov_increments}


def _slice_values(kernel: Callable, n: int, pts: np.ndarray) -> np.ndarray:
    y = np.concatenate([pts, np.ones((len(pts), 1))], axis=1)
    v = np.asarray(kernel(y))
    return np.abs(v) if v.ndim == 1 else np.linalg.norm(v.reshape(len(pts), -1), axis=1)


def _slice_raw(kernel: Callable, pts: np.ndarray) -> np.ndarray:
    y = np.concatenate([pts, np.ones((len(pts), 1))], axis=1)
    v = np.asarray(kernel(y))
    return v.reshape(len(pts), -1)


def _directions(m: int, count: int = 16) -> np.ndarray:
    if m == 1:
        return np.array([[1.0], [-1.0]])
    ang = 2 * math.pi * np.arange(count) / count
    d = np.zeros((count, m))
    d[:, 0], d[:, 1] = np.cos(ang), np.sin(ang)
    return d


def kernel_decay_check(kernel: Callable, n: int, s: float, alpha: float,
                       fit_range: tuple[float, float] = (4.0, 64.0), shells: Sequence[float] = (2, 4, 8, 16, 32, 64),
                       besov_boxes: Sequence[float] = (4, 8, 16), besov_h: float = 1 / 32) -> DecayResult:
    """Log-log decay fit of |K(y', 1)| over |y'| in fit_range, shell L1 masses
    for s = 1 and truncated Besov seminorms of order s - 1 for s > 1."""
    m = n - 1
    dirs = _directions(m)
    radii = np.geomspace(fit_range[0], fit_range[1], 17)
    mags = np.array([_slice_values(kernel, n, r * dirs).max() for r in radii])
    bound = s - n - alpha + 0.1
    if np.all(mags == 0):
        exponent, vanishes = -math.inf, True
    else:
        pos = mags > 0
        if pos.sum() < 3:
            raise ExperimentError("kernel nonzero at fewer than three fit radii")
        curve = ExperimentCurve(radii[pos], mags[pos], POWER, LOG_X)
        exponent, vanishes = curve.fit.slope, False
    res = DecayResult(float(exponent), bound, bool(exponent <= bound), vanishes)
    if s == 1:
        masses = []
        rn, rw = np.polynomial.legendre.leggauss(32)
        for a in shells:
            b = 2 * a
            total = 0.0
            for sub in np.linspace(a, b, 9)[:-1]:
                e = sub + (b - a) / 8
                r = 0.5 * (e - sub) * rn + 0.5 * (e + sub)
                w = 0.5 * (e - sub) * rw
                for d in dirs:
                    vals = _slice_values(kernel, n, r[:, None] * d[None, :])
                    dens = w * r ** (m - 1)
                    total += float(dens @ vals) * (2 * math.pi / len(dirs) if m == 2 else 1.0)
            masses.append(total)
        res.shell_l1 = masses
        res.shell_ratios = [masses[i + 1] / masses[i] if masses[i] > 0 else (0.0 if masses[i + 1] == 0 else math.inf)
                            for i in range(len(masses) - 1)]
    elif s > 1:
        if m != 1:
            raise ExperimentError("Besov stabilization is implemented for n = 2")
        order = s - 1
        kdiff = int(math.floor(order)) + 1
        vals = []
        for R in besov_boxes:
            g = sample_field(lambda p: _slice_raw(kernel, p), [(-R, R)], besov_h)
            vals.append(besov_seminorm_detailed(g, order, kdiff, truncation=2 * R).value)
        res.besov = vals
        res.besov_increments = [abs(vals[i + 1] - vals[i]) for i in range(len(vals) - 1)]
    return res
