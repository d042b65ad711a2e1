"""The four symbol conditions: real ellipticity, boundary ellipticity in a
direction, complex ellipticity and cancellation."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm as _normal
from scipy.stats import qmc

from ..algebra import (
    GaussianRational,
    MultiPoly,
    Subspace,
    column_space,
    rank,
    subspace_intersection,
)
from ..operators import Direction, Operator, symbol_matrix
from .bnb import branch_and_bound
from .witness import Witness, refine_witness

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"


@dataclass(frozen=True)
class Budgets:
    boxes: int = 200_000
    witness_tol: float = 1e-9
    refine_steps: int = 50
    c_directions: int = 64
    real_gap: float = 0.1
    boundary_gap: float = 0.5
    search_radius: float = 4.0

    def to_json(self) -> dict:
        return {
            "boxes": self.boxes,
            "witness_tol": self.witness_tol,
            "refine_steps": self.refine_steps,
            "c_directions": self.c_directions,
            "real_gap": self.real_gap,
            "boundary_gap": self.boundary_gap,
            "search_radius": self.search_radius,
        }


DEFAULT_BUDGETS = Budgets()


@dataclass(frozen=True)
class Certificate:
    kind: str  # sphere_min, ball_min, cancellation_directions, noncancellation_identity
    boxes_explored: int = 0
    lower_bound: float | None = None
    radius: float | None = None
    directions: tuple[Direction, ...] = ()
    identity_minors: tuple[tuple[tuple[int, ...], MultiPoly], ...] = ()
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind in ("sphere_min", "ball_min") and not (self.lower_bound and self.lower_bound > 0):
            raise ValueError("min certificates need a positive lower bound")
        if any(not p.is_zero() for _, p in self.identity_minors):
            raise ValueError("identity minors must vanish identically")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "boxes_explored": self.boxes_explored}
        if self.lower_bound is not None:
            out["lower_bound"] = self.lower_bound
        if self.radius is not None:
            out["radius"] = self.radius
        if self.directions:
            out["directions"] = [d.to_json() for d in self.directions]
        if self.kind == "noncancellation_identity":
            out["identity_minors"] = [{"rows": list(r), "polynomial": p.to_json()} for r, p in self.identity_minors]
        out.update(self.extra)
        return out


@dataclass(frozen=True)
class Verdict:
    status: str
    certificate: Certificate | None = None
    witness: Witness | None = None
    sampled: bool = False
    depth: int | None = None
    boxes_explored: int = 0
    note: str | None = None

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        if self.sampled:
            out["sampled"] = True
        if self.depth is not None:
            out["depth"] = self.depth
        if self.boxes_explored:
            out["boxes_explored"] = self.boxes_explored
        if self.note:
            out["note"] = self.note
        return out


def _scale_fn(op: Operator, nu_f: np.ndarray | None):
    fro = op.coefficient_norm()

    def scale(point):
        z2 = float(np.dot(point, point)) + (float(np.dot(nu_f, nu_f)) if nu_f is not None else 0.0)
        return fro * (1.0 + math.sqrt(z2)) ** op.k

    return scale


def sphere_faces(n: int) -> tuple[np.ndarray, np.ndarray]:
    """The 2n faces of the unit cube boundary as degenerate boxes."""
    los, his = [], []
    for j in range(n):
        for s in (-1.0, 1.0):
            lo = -np.ones(n)
            hi = np.ones(n)
            lo[j] = hi[j] = s
            los.append(lo)
            his.append(hi)
    return np.array(los), np.array(his)


@functools.lru_cache(maxsize=256)
def check_real_ellipticity(op: Operator, budget: int = DEFAULT_BUDGETS.boxes, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """ker A(xi) = 0 for real xi != 0.

    The search runs over the sphere |xi|_inf = 1; by homogeneity the bound on
    the shell 1/2 <= |xi|_inf <= 1 is 2^-k times the sphere bound."""
    cpm = symbol_matrix(op).compile()
    lo, hi = sphere_faces(op.n)
    hook = lambda p: refine_witness(op, "real", p, tol=budgets.witness_tol, steps=budgets.refine_steps)
    res = branch_and_bound(
        cpm, lo, hi, budget=budget, rel_gap=budgets.real_gap,
        scale_fn=_scale_fn(op, None), witness_hook=hook,
    )
    if res.status == "witness":
        return Verdict(FAILS, witness=res.witness, boxes_explored=res.boxes_explored)
    if res.status == "certified":
        cert = Certificate(
            "sphere_min",
            boxes_explored=res.boxes_explored,
            lower_bound=res.lower_bound / 2 ** op.k,
            extra={"unit_sphere_bound": res.lower_bound, "norm": "max", "shell": [0.5, 1.0]},
        )
        return Verdict(HOLDS, certificate=cert, boxes_explored=res.boxes_explored)
    return Verdict(INCONCLUSIVE, depth=res.max_depth, boxes_explored=res.boxes_explored,
                   note=f"budget of {budget} boxes exhausted; best sigma_min seen {res.best_value:.3e}")


def _spectral_norms(op: Operator) -> dict:
    alphas, mats = op.coefficient_arrays()
    return {tuple(a): float(np.linalg.norm(m, 2)) for a, m in zip(alphas, mats)}


def boundary_radius_bound(op: Operator, nu: Direction, m0: float) -> float:
    """R with sigma_min(A(xi + i nu)) >= B (1 + |xi|)^(k-1) > 0 for |xi|_inf >= R.

    m0 bounds sigma_min(A(xi)) from below on |xi|_inf = 1. B bounds the
    lower-order part A(xi + i nu) - A(xi) by sum ||A_a|| (prod(1+|nu_j|)^a_j - 1)
    times (1 + |xi|_inf)^(k-1). R solves m0 R^k = 2 B (1 + R)^(k-1)."""
    if not m0 > 0:
        raise ValueError("m0 must be positive")
    nu_abs = [abs(float(c)) for c in nu.components]
    B = 0.0
    for alpha, s in _spectral_norms(op).items():
        B += s * (math.prod((1.0 + nu_abs[j]) ** a for j, a in enumerate(alpha)) - 1.0)
    if B == 0:
        return 0.0
    k = op.k
    if k == 1:
        return 2.0 * B / m0
    g = lambda R: m0 * R ** k - 2.0 * B * (1.0 + R) ** (k - 1)
    hi = 1.0
    while g(hi) <= 0:
        hi *= 2.0
    return float(brentq(g, 0.0, hi, xtol=1e-12)) * (1 + 1e-9)


def boundary_margin(op: Operator, nu: Direction, m0: float, xi_inf: float) -> float:
    """The explicit lower bound m0 s^k - B (1+s)^(k-1) at s = |xi|_inf."""
    nu_abs = [abs(float(c)) for c in nu.components]
    B = sum(s * (math.prod((1.0 + nu_abs[j]) ** a for j, a in enumerate(alpha)) - 1.0)
            for alpha, s in _spectral_norms(op).items())
    return m0 * xi_inf ** op.k - B * (1.0 + xi_inf) ** (op.k - 1)


@functools.lru_cache(maxsize=1024)
def check_boundary_ellipticity(op: Operator, nu: Direction, budget: int = DEFAULT_BUDGETS.boxes,
                               budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """ker_C A(xi + i nu) = 0 for every real xi."""
    if nu.n != op.n:
        raise ValueError("direction dimension mismatch")
    real = check_real_ellipticity(op, budget, budgets)
    cpm = symbol_matrix(op, nu).compile()
    nu_f = np.array([float(c) for c in nu.components])
    hook = lambda p: refine_witness(op, "boundary", p, nu=nu, tol=budgets.witness_tol, steps=budgets.refine_steps)
    if real.holds:
        m0 = real.certificate.extra["unit_sphere_bound"]
        R = boundary_radius_bound(op, nu, m0)
        radius = max(R, 1e-6)
    else:
        radius = budgets.search_radius * float(np.max(np.abs(nu_f)))
    lo = -radius * np.ones((1, op.n))
    hi = radius * np.ones((1, op.n))
    res = branch_and_bound(
        cpm, lo, hi, budget=budget, rel_gap=budgets.boundary_gap,
        scale_fn=_scale_fn(op, nu_f), witness_hook=hook,
    )
    if res.status == "witness":
        return Verdict(FAILS, witness=res.witness, boxes_explored=res.boxes_explored)
    if res.status == "certified" and real.holds:
        cert = Certificate("ball_min", boxes_explored=res.boxes_explored, lower_bound=res.lower_bound,
                           radius=radius, extra={"norm": "max", "real_unit_sphere_bound": m0})
        return Verdict(HOLDS, certificate=cert, boxes_explored=res.boxes_explored)
    if res.status == "certified":
        return Verdict(INCONCLUSIVE, boxes_explored=res.boxes_explored, depth=res.max_depth,
                       note=f"no kernel in |xi|_inf <= {radius:g}; real ellipticity is {real.status}, so no radius bound is available")
    return Verdict(INCONCLUSIVE, depth=res.max_depth, boxes_explored=res.boxes_explored,
                   note=f"budget of {budget} boxes exhausted; best sigma_min seen {res.best_value:.3e}")


def normalize_complex_direction(xi1: Sequence, xi2: Sequence, frame: Sequence | None = None):
    """Find lambda in C with lambda (xi1 + i xi2) = xi + i nu, nu along `frame`.

    `frame` defaults to e1 when e1 lies in span{xi1, xi2}, otherwise xi2.
    Returns (lambda, xi, nu); the sign is fixed so that the first nonzero
    entry of xi is positive."""
    a1 = [Fraction(x) for x in xi1]
    a2 = [Fraction(x) for x in xi2]
    n = len(a1)
    if len(a2) != n or rank([a1, a2]) != 2:
        raise ValueError("xi1 and xi2 must be linearly independent")
    if frame is None:
        e1 = [Fraction(int(i == 0)) for i in range(n)]
        frame = e1 if rank([a1, a2, e1]) == 2 else a2
    d = [Fraction(x) for x in frame]
    if rank([a1, a2, d]) != 2:
        raise ValueError("frame direction must lie in span{xi1, xi2}")
    # lambda = a + i b; Im(lambda zeta) = b xi1 + a xi2 = d
    rows = [[a1[i], a2[i], d[i]] for i in range(n)]
    from ..algebra import rref
    red, piv = rref(rows, 3)
    if piv != [0, 1]:
        raise ValueError("frame direction is not reachable")
    b, a = red[0][2], red[1][2]
    xi = [a * a1[i] - b * a2[i] for i in range(n)]
    lead = next(x for x in xi if x != 0)
    if lead < 0:
        a, b = -a, -b
        xi = [-x for x in xi]
        d = [-x for x in d]
    return GaussianRational(a, b), xi, d


def rational_sphere_points(n: int, count: int, max_denominator: int = 12) -> list[Direction]:
    """Quasi-uniform exact rational points on S^{n-1} (inverse stereographic
    images of rounded Halton points)."""
    if n == 1:
        return [Direction((Fraction(1),)), Direction((Fraction(-1),))][:count]
    out: list[Direction] = []
    seen = set()
    sampler = qmc.Halton(d=n, scramble=False)
    draws = 0
    while len(out) < count and draws < 200 * count + 1000:
        u = sampler.random(64)
        draws += 64
        for row in u:
            if np.any(row <= 0) or np.any(row >= 1):
                continue
            y = _normal.ppf(row)
            y = y / np.linalg.norm(y)
            if y[-1] > 0.999:
                continue
            proj = y[:-1] / (1.0 - y[-1])
            dmax = max_denominator
            while True:
                # refine the rounding until the point is new
                t = [Fraction(float(x)).limit_denominator(dmax) for x in proj]
                s = sum(x * x for x in t)
                p = tuple([2 * x / (s + 1) for x in t] + [(s - 1) / (s + 1)])
                if p not in seen or dmax > 10**4:
                    break
                dmax *= 2
            if p in seen:
                continue
            seen.add(p)
            out.append(Direction(p))
            if len(out) == count:
                break
    return out


def direction_schedule(n: int, count: int) -> list[Direction]:
    """Coordinate directions first, then rational sphere points."""
    out = [Direction.axis(n, j) for j in range(n)]
    seen = {d.components for d in out}
    for d in rational_sphere_points(n, 3 * count + n):
        if len(out) >= count:
            break
        if d.components in seen or tuple(-c for c in d.components) in seen:
            continue
        seen.add(d.components)
        out.append(d)
    return out[:count]


def _pencil_witness(op: Operator, budgets: Budgets) -> Witness | None:
    """Square symbols: det A(a + t b) has a root t, giving a complex kernel."""
    from ..algebra import MultiPoly as MP
    det = symbol_matrix(op).determinant()
    n = op.n
    if det.is_zero():
        zeta = [GaussianRational(int(j == 0)) for j in range(n)]
        return refine_witness(op, "complex", [complex(z) for z in zeta], tol=budgets.witness_tol)
    for a_idx, b_idx in [(0, 1)] + [(i, j) for i in range(n) for j in range(n) if i != j and (i, j) != (0, 1)]:
        # substitute xi = e_a + t e_b: a one-variable polynomial in t
        sub = [[Fraction(0), Fraction(0)] for _ in range(n)]
        sub[a_idx][0] = Fraction(1)
        sub[b_idx][1] = Fraction(1)
        p2 = det.substitute_linear(sub, 2)  # homogeneous in (s, t); set s = 1
        coeffs: dict[int, complex] = {}
        exact: dict[int, GaussianRational] = {}
        for e, c in p2.items():
            coeffs[e[1]] = coeffs.get(e[1], 0) + complex(c)
            exact[e[1]] = exact.get(e[1], GaussianRational(0)) + c
        top = max(exact)
        d = det.degree()
        if top < d:
            # det(e_b) = 0: the real frequency e_b itself is a kernel point
            zeta = [GaussianRational(int(j == b_idx)) for j in range(n)]
            w = refine_witness(op, "complex", [complex(z) for z in zeta], tol=budgets.witness_tol)
            if w is not None:
                return w
            continue
        poly = [coeffs.get(i, 0) for i in range(top, -1, -1)]
        for t in np.roots(poly):
            zeta = np.zeros(n, dtype=complex)
            zeta[a_idx] = 1.0
            zeta[b_idx] = t
            w = refine_witness(op, "complex", zeta, tol=budgets.witness_tol, steps=budgets.refine_steps)
            if w is not None:
                return w
    return None


@functools.lru_cache(maxsize=256)
def check_C_ellipticity(op: Operator, direction_samples: int = DEFAULT_BUDGETS.c_directions,
                        budget: int = DEFAULT_BUDGETS.boxes, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """ker_C A(zeta) = 0 for zeta in C^n minus 0.

    Holds is only ever reported as sampled: boundary ellipticity is checked
    along `direction_samples` rational directions."""
    real = check_real_ellipticity(op, budget, budgets)
    if real.fails:
        w = real.witness
        return Verdict(FAILS, witness=w, note="real frequency with nontrivial kernel")
    if op.n == 1:
        if real.holds:
            return Verdict(HOLDS, certificate=real.certificate,
                           note="n=1: A(zeta) = zeta^k A(1), so complex and real ellipticity coincide")
        return Verdict(INCONCLUSIVE, note="real ellipticity inconclusive")
    if op.dim_v == op.dim_w:
        w = _pencil_witness(op, budgets)
        if w is not None:
            return Verdict(FAILS, witness=w, note="square symbol: det A vanishes on a complex pencil")
    if not real.holds:
        return Verdict(INCONCLUSIVE, note="real ellipticity inconclusive")
    inconclusive = []
    dirs = direction_schedule(op.n, direction_samples)
    total = 0
    for nu in dirs:
        v = check_boundary_ellipticity(op, nu, budget, budgets)
        total += v.boxes_explored
        if v.fails:
            w = v.witness
            return Verdict(FAILS, witness=w, boxes_explored=total,
                           note=f"boundary ellipticity fails in direction {nu}")
        if not v.holds:
            inconclusive.append(str(nu))
    if inconclusive:
        return Verdict(INCONCLUSIVE, boxes_explored=total, sampled=True,
                       note="inconclusive directions: " + "; ".join(inconclusive))
    return Verdict(HOLDS, sampled=True, boxes_explored=total,
                   note=f"boundary ellipticity holds in {len(dirs)} sampled directions; not a certificate",
                   certificate=None)


def _real_image(op: Operator, xi: Direction) -> Subspace:
    m = op.symbol_at(list(xi.components))
    return column_space([[x.re for x in row] for row in m])


def minors_identically_zero(op: Operator, w: Sequence[Fraction]):
    """All (dim_v+1)-minors of [A(xi) | w]. Returns (all_zero, minors, first_nonzero)."""
    pm = symbol_matrix(op).augment(list(w))
    size = op.dim_v + 1
    minors = []
    if pm.rows < size:
        return True, minors, None
    for rs, cs, det in pm.minors(size):
        if not det.is_zero():
            return False, minors, det
        minors.append((rs, det))
    return True, minors, None


@functools.lru_cache(maxsize=256)
def check_cancellation(op: Operator, budget: int = DEFAULT_BUDGETS.boxes, budgets: Budgets = DEFAULT_BUDGETS) -> Verdict:
    """Intersection of im A(xi) over unit xi is {0}."""
    real = check_real_ellipticity(op, budget, budgets)
    if not real.holds:
        return Verdict(INCONCLUSIVE, note=f"needs real ellipticity, which is {real.status}")
    n = op.n
    S = Subspace.full(op.dim_w)
    used: list[Direction] = []
    stable = 0
    pool = iter(_direction_stream(n))
    while True:
        if S.dim == 0:
            cert = Certificate("cancellation_directions", directions=tuple(used))
            return Verdict(HOLDS, certificate=cert)
        if stable >= 3 * n:
            w = S.basis[0]
            zero, minors, witness_poly = minors_identically_zero(op, w)
            if zero:
                cert = Certificate(
                    "noncancellation_identity",
                    directions=tuple(used),
                    identity_minors=tuple(minors),
                    extra={"vector": [str(x) for x in w], "intersection_dim": S.dim},
                )
                return Verdict(FAILS, certificate=cert,
                               note="w lies in im A(xi) for all xi != 0: every minor of [A(xi)|w] vanishes")
            # some minor is a nonzero polynomial: a frequency where it is nonzero excludes w
            xi = _nonvanishing_point(witness_poly, pool)
            img = _real_image(op, xi)
            S = subspace_intersection([S, img])
            used.append(xi)
            stable = 0
            continue
        xi = next(pool)
        new = subspace_intersection([S, _real_image(op, xi)])
        if new.dim < S.dim:
            used.append(xi)
            stable = 0
        else:
            stable += 1
        S = new


def _direction_stream(n: int) -> Iterator[Direction]:
    for j in range(n):
        yield Direction.axis(n, j)
    batch = 32
    produced = set()
    while True:
        for d in rational_sphere_points(n, batch, max_denominator=12 + batch // 8):
            if d.components not in produced:
                produced.add(d.components)
                yield d
        batch *= 2


def _nonvanishing_point(p: MultiPoly, pool: Iterator[Direction]) -> Direction:
    for _ in range(10_000):
        d = next(pool)
        if not p.evaluate_exact(list(d.components)).is_zero():
            return d
    raise RuntimeError("could not find a point where a nonzero polynomial is nonzero")


def with_budget(b: Budgets, **kw) -> Budgets:
    return replace(b, **kw)
