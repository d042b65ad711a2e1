"""Extensions from prescribed normal-derivative traces to the halfspace.

Boundary data live on an (n-1)-dimensional GridField; the extension adds a
last axis x_n in [0, height] with the same spacing and marks it as the
boundary axis (face at x_n = 0)."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np
from scipy.ndimage import convolve

from ..harness.grid import GridError, GridField
from .vandermonde import ExtensionRecipe, ThetaProfile, default_theta


class ExtensionError(ValueError):
    pass


def _heights(h: float, top: float) -> np.ndarray:
    steps = max(1, int(math.ceil(top / h - 1e-9)))
    return h * np.arange(steps + 1)


def _halfspace(g: GridField, heights: np.ndarray, values: np.ndarray, meta: dict) -> GridField:
    box = g.box + ((0.0, float(heights[-1])),)
    md = dict(g.metadata)
    md.update(meta)
    return GridField(box, g.h, values, g.dim, md)


def layer_extension_top(g: GridField, k: int, epsilon: float, theta: ThetaProfile | None = None,
                        height: float | None = None) -> GridField:
    """u(x', x_n) = theta(x_n/eps) x_n^(k-1) g(x') / (k-1)!, so d_n^(k-1) u(., 0) = g."""
    if not epsilon > 0:
        raise ExtensionError("epsilon must be positive")
    if k < 1:
        raise ExtensionError("k must be at least 1")
    theta = theta or default_theta(k)
    if abs(float(theta(0.0)) - 1.0) > 1e-15:
        raise ExtensionError("theta(0) must be 1")
    t = _heights(g.h, height if height is not None else epsilon * theta.radius)
    prof = theta(t / epsilon) * t ** (k - 1) / math.factorial(k - 1)
    vals = g.values[..., None, :] * prof[:, None]
    return _halfspace(g, t, vals, {"extension": "layer_top", "k": k, "epsilon": epsilon})


def bump_mollifier(r):
    r = np.asarray(r, dtype=float)
    return np.where(r < 1, np.clip(1 - r * r, 0, None) ** 3, 0.0)


def mollify(g: GridField, scale: float, mollifier: Callable = bump_mollifier) -> np.ndarray:
    """(rho_scale * g) on the lattice with discretely normalized weights, zero extension."""
    if scale <= 0:
        return g.values
    rad = int(math.floor(scale / g.h))
    if rad == 0:
        return g.values
    ax = np.arange(-rad, rad + 1) * g.h
    mesh = np.meshgrid(*([ax] * g.dim), indexing="ij")
    r = np.sqrt(sum(m * m for m in mesh)) / scale
    w = mollifier(r)
    w = w / w.sum()
    out = np.empty(g.values.shape, dtype=g.values.dtype)
    for c in range(g.dim_v):
        comp = g.values[..., c]
        if np.iscomplexobj(comp):
            out[..., c] = convolve(comp.real, w, mode="constant") + 1j * convolve(comp.imag, w, mode="constant")
        else:
            out[..., c] = convolve(comp, w, mode="constant")
    return out


def _besov_layer(g: GridField, j: int, heights: np.ndarray, scales: np.ndarray, mollifier, cutoff) -> np.ndarray:
    rows = [mollify(g, s, mollifier) * (t ** j / math.factorial(j)) * cutoff(t) for t, s in zip(heights, scales)]
    return np.stack(rows, axis=g.dim)


def layer_extension_besov(g: GridField, j: int, k: int, mollifier: Callable = bump_mollifier,
                          height: float = 1.0, theta: ThetaProfile | None = None) -> GridField:
    """u = theta(x_n) x_n^j v / j! with v(., x_n) the mollification of g at scale x_n."""
    if not 0 <= j <= k - 2:
        raise ExtensionError(f"need 0 <= j <= k-2, got j={j}, k={k}")
    theta = theta or default_theta(k)
    t = _heights(g.h, height * theta.radius)
    vals = _besov_layer(g, j, t, t, mollifier, lambda s: theta(s / height))
    return _halfspace(g, t, vals, {"extension": "layer_besov", "j": j, "k": k})


def superpose_extension(gs: Sequence[GridField], recipe: ExtensionRecipe, layer: str = "top",
                        mollifier: Callable = bump_mollifier) -> GridField:
    """u(x', x_n) = sum_j sum_i mu_ij u_j(x', lambda_i x_n) with
    u_j = theta(x_n/eps) x_n^j g_j / j! (layer "top") or its mollified variant."""
    k = recipe.k
    if len(gs) != k:
        raise ExtensionError(f"recipe has k={k}, got {len(gs)} traces")
    g0 = gs[0]
    for g in gs[1:]:
        if g.box != g0.box or g.h != g0.h or g.values.shape != g0.values.shape:
            raise GridError("boundary fields live on different grids")
    eps = recipe.epsilon
    theta = recipe.theta
    lam = [float(x) for x in recipe.lambdas]
    t = _heights(g0.h, eps * theta.radius / min(lam))
    total = np.zeros(g0.values.shape[:-1] + (len(t),) + g0.values.shape[-1:],
                     dtype=np.result_type(*[g.values.dtype for g in gs], float))
    for j, g in enumerate(gs):
        for i, li in enumerate(lam):
            mu = float(recipe.mu[i][j])
            if mu == 0.0:
                continue
            s = li * t
            if layer == "top":
                prof = theta(s / eps) * s ** j / math.factorial(j)
                part = g.values[..., None, :] * prof[:, None]
            elif layer == "besov":
                part = _besov_layer(g, j, s, s, mollifier, lambda x: theta(x / eps))
            else:
                raise ExtensionError(f"unknown layer {layer!r}")
            total = total + mu * part
    u = _halfspace(g0, t, total, {"extension": "superposition", "layer": layer, "recipe": recipe.to_json_obj()})
    from ..harness.fd import derivative_norm_fd
    from ..harness.norms import lp_norm
    if min(u.counts) >= 2 * ((k + 1) // 2) + 1:
        u.metadata["Dk_L1"] = lp_norm(derivative_norm_fd(u, k), 1.0)
    return u


def normal_traces(u: GridField, orders: Sequence[int]) -> list[np.ndarray]:
    """Forward-difference approximations of d_n^j u(., 0); first order in h for j >= 1."""
    if u.boundary_axis is None:
        raise GridError("field has no boundary axis")
    a = np.moveaxis(u.values, u.boundary_axis, 0)
    out = []
    for j in orders:
        if a.shape[0] < j + 1:
            raise GridError("too few normal rows for the trace order")
        d = sum((-1) ** (j - i) * math.comb(j, i) * a[i] for i in range(j + 1))
        out.append(d / u.h ** j)
    return out


def random_boundary_data(k: int, seed: int, h: float, box=((-1.5, 1.5),), bumps: int = 3) -> list[GridField]:
    """k seeded smooth boundary fields, each a sum of (1 - r^2)^4 bumps."""
    from ..harness.grid import sample_field

    rng = np.random.default_rng(seed)
    m = len(box)
    out = []
    for _ in range(k):
        centers = rng.uniform(-0.5, 0.5, size=(bumps, m))
        amps = rng.uniform(-1.0, 1.0, size=bumps)
        radii = rng.uniform(0.5, 0.9, size=bumps)

        def g(x, centers=centers, amps=amps, radii=radii):
            total = np.zeros(len(x))
            for c, a, r in zip(centers, amps, radii):
                q = np.sum((x - c) ** 2, axis=1) / (r * r)
                total += a * np.clip(1.0 - q, 0.0, None) ** 4
            return total[:, None]

        out.append(sample_field(g, box, h))
    return out


def verify_extension(k: int = 3, lambdas=None, seed: int = 0, h: float = 1 / 128, layer: str = "top",
                     recipe: ExtensionRecipe | None = None) -> dict:
    """Trace errors of the superposition at h and h/2 plus their ratios."""
    recipe = recipe or ExtensionRecipe.build(k, lambdas)
    errs = {}
    for hh in (h, h / 2):
        gs = random_boundary_data(recipe.k, seed, hh)
        u = superpose_extension(gs, recipe, layer=layer)
        traces = normal_traces(u, range(recipe.k))
        errs[hh] = [float(np.max(np.abs(t - g.values))) for t, g in zip(traces, gs)]
    coarse, fine = errs[h], errs[h / 2]
    ratios = [c / f if f > 0 else (math.inf if c > 0 else None) for c, f in zip(coarse, fine)]
    return {"k": recipe.k, "lambdas": [str(x) for x in recipe.lambdas], "epsilon": recipe.epsilon,
            "theta_power": recipe.theta.power, "seed": seed, "layer": layer, "h": [h, h / 2],
            "trace_errors": {"coarse": coarse, "fine": fine}, "richardson_ratios": ratios,
            "vandermonde_residual": str(recipe.residual()), "mu": recipe.to_json_obj()["mu"]}
