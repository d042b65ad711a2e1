import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipticity.harness import (
    CENTRAL,
    ONE_SIDED,
    ExperimentCurve,
    GridError,
    GridField,
    HolomorphicProfile,
    apply_operator_fd,
    besov_seminorm,
    besov_seminorm_detailed,
    counterexample_field,
    derivative_norm_fd,
    family_for,
    finite_difference_delta,
    lp_norm,
    null_field_fd_check,
    sample_field,
    trace_blowup_experiment,
    verify_representation,
)
from ellipticity.harness.curve import LOG, LOG_INVERSE, POWER
from ellipticity.harness.experiments import (
    counterexample_norms,
    random_bump_fields,
    sobolev_ratio_experiment,
    standard_bump,
    zero_field,
)
from ellipticity.operators import Direction, catalog

BOX2 = [(0.0, 1.0), (0.0, 1.0)]


def test_sample_field_examples():
    z = sample_field(lambda x: np.zeros(len(x)), BOX2, 0.25)
    assert not np.any(z.values)
    u = sample_field(lambda x: x[:, 0], BOX2, 0.5)
    assert u.values[..., 0].tolist() == [[0, 0, 0], [0.5, 0.5, 0.5], [1, 1, 1]]
    bump = sample_field(lambda x: np.exp(-10 * np.sum((x - 0.3) ** 2, axis=1)), BOX2, 0.1)
    assert bump.values.max() == pytest.approx(1.0)


def test_sample_field_reports_failing_point():
    def bad(p):
        if p[0] > 0.6:
            raise ZeroDivisionError("boom")
        return 0.0

    with pytest.raises(GridError, match="lattice point"):
        sample_field(bad, BOX2, 0.5, vectorized=False)


def test_gridfield_save_load(tmp_path):
    u = sample_field(lambda x: np.stack([x[:, 0], 1j * x[:, 1]], axis=1), BOX2, 0.25, boundary_axis=1,
                     metadata={"tag": "x"})
    path = tmp_path / "f.efld"
    u.save(path)
    head = path.read_text().splitlines()[0].split()
    assert head[0] == "EFLD1" and head[1] == "2"
    v = GridField.load(path)
    assert np.array_equal(v.values, u.values) and v.boundary_axis == 1 and v.metadata["tag"] == "x"
    assert (tmp_path / "f.efld.json").exists()


def test_fd_examples():
    grad = catalog("gradient", n=2)
    u = sample_field(lambda x: x[:, 0], [(-1, 1), (-1, 1)], 1 / 8)
    g = apply_operator_fd(grad, u)
    assert np.allclose(g.values[..., 0], 1, atol=1e-12) and np.allclose(g.values[..., 1], 0, atol=1e-12)
    lap = catalog("laplacian", n=2)
    u = sample_field(lambda x: np.sum(x ** 2, axis=1), [(-1, 1), (-1, 1)], 1 / 8)
    assert np.allclose(apply_operator_fd(lap, u).values, 4, atol=1e-10)


def test_one_sided_scheme_covers_face():
    lap = catalog("laplacian", n=2)
    u = sample_field(lambda x: np.sum(x ** 2, axis=1), [(0, 1), (-1, 1)], 1 / 16, boundary_axis=0)
    c = apply_operator_fd(lap, u, CENTRAL)
    o = apply_operator_fd(lap, u, ONE_SIDED)
    assert o.counts[0] > c.counts[0]
    assert np.allclose(o.values, 4, atol=1e-8)
    assert o.metadata["scheme"] == ONE_SIDED


poly_coeffs = st.lists(st.floats(-2, 2, allow_nan=False), min_size=10, max_size=10)
MONOMIALS3 = [(i, j) for i in range(4) for j in range(4) if i + j <= 3]


@settings(max_examples=25, deadline=None)
@given(poly_coeffs, st.sampled_from([("gradient", {"n": 2}), ("laplacian", {"n": 2}),
                                     ("symmetric_gradient", {"n": 2}), ("kth_gradient", {"n": 2, "k": 2})]))
def test_fd_exact_on_low_degree_polynomials(coeffs, case):
    op = catalog(case[0], **case[1])
    deg = op.k + 1
    mons = [(i, j) for (i, j) in MONOMIALS3 if i + j <= deg]
    c = coeffs[:len(mons)]

    def p(x):
        return sum(a * x[:, 0] ** i * x[:, 1] ** j for a, (i, j) in zip(c, mons))

    def dp(x, d):
        out = 0.0
        for a, (i, j) in zip(c, mons):
            if i >= d[0] and j >= d[1]:
                out = out + a * math.perm(i, d[0]) * math.perm(j, d[1]) * x[:, 0] ** (i - d[0]) * x[:, 1] ** (j - d[1])
        return out + 0 * x[:, 0]

    u = sample_field(lambda x: np.stack([p(x)] * op.dim_v, axis=1), [(-1, 1), (-1, 1)], 1 / 8)
    r = apply_operator_fd(op, u)
    pts = r.points().reshape(-1, 2)
    exact = np.zeros((len(pts), op.dim_w))
    for alpha, m in op.terms:
        mm = np.array([[float(x) for x in row] for row in m])
        exact += dp(pts, alpha)[:, None] * mm.sum(axis=1)[None, :]
    assert np.max(np.abs(r.values.reshape(-1, op.dim_w) - exact)) <= 1e-10


def test_lp_norm_examples():
    one = sample_field(lambda x: np.ones(len(x)), BOX2, 1 / 64)
    assert abs(lp_norm(one, 1) - 1) <= 3 / 64
    assert lp_norm(one.with_values(np.zeros_like(one.values)), 1) == 0
    b = sample_field(lambda x: np.clip(1 - np.sum(x ** 2, axis=1), 0, None), [(-1, 1), (-1, 1)], 1 / 128)
    assert lp_norm(b, 1) == pytest.approx(math.pi / 2, rel=0.01)


def test_delta_examples():
    u = sample_field(lambda x: x[:, 0] ** 2, [(0, 2)], 0.25)
    d = finite_difference_delta(u, [0.25], 1)
    assert np.allclose(d.values[:-1, 0], u.values[1:, 0] - u.values[:-1, 0])
    aff = sample_field(lambda x: 3 * x[:, 0] - 1, [(0, 2)], 0.25)
    assert np.allclose(finite_difference_delta(aff, [0.5], 2).values[:-4], 0)
    const = sample_field(lambda x: np.full(len(x), 2.5), [(0, 2)], 0.25)
    for k in (1, 2, 3):
        assert np.allclose(finite_difference_delta(const, [0.25], k).values[:-k], 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4), st.integers(1, 3))
def test_delta_annihilates_polynomials(k, c, j):
    coeffs = c[:k]
    u = sample_field(lambda x: sum(a * x[:, 0] ** i for i, a in enumerate(coeffs)), [(-1, 1)], 1 / 16)
    d = finite_difference_delta(u, [j / 16], k)
    assert np.max(np.abs(d.values[: -k * j])) <= 1e-10


def bump_1d(scale=1.0):
    return lambda x: np.clip(1 - (x[:, 0] / scale) ** 2, 0, None) ** 4


def test_besov_zero():
    z = sample_field(lambda x: np.zeros(len(x)), [(-2, 2)], 1 / 32)
    assert besov_seminorm(z, 0.5, 1) == 0


@pytest.mark.parametrize("s,k", [(0.5, 1), (0.5, 2), (1.0, 2), (1.5, 2)])
def test_besov_scaling(s, k):
    h = 1 / 256
    u = sample_field(bump_1d(), [(-2, 2)], h)
    ul = sample_field(bump_1d(0.5), [(-2, 2)], h)
    assert besov_seminorm(ul, s, k) / besov_seminorm(u, s, k) == pytest.approx(2 ** (s - 1), rel=0.05)


def test_besov_matches_refined_oracle():
    vals = [besov_seminorm(sample_field(bump_1d(), [(-2, 2)], h), 0.5, 1) for h in (1 / 128, 1 / 256)]
    # first-order in h, so Richardson on the two finest grids
    oracle = 2 * vals[1] - vals[0]
    coarse = besov_seminorm(sample_field(bump_1d(), [(-2, 2)], 1 / 64), 0.5, 1)
    assert coarse == pytest.approx(oracle, rel=0.02)


def test_besov_tail_exact_for_wide_truncation():
    u = sample_field(bump_1d(), [(-2, 2)], 1 / 64)
    r = besov_seminorm_detailed(u, 0.5, 1)
    assert r.tail_exact and r.tail > 0 and r.value == pytest.approx(r.truncated + r.tail)


def test_besov_rejects_s_out_of_range():
    u = sample_field(bump_1d(), [(-2, 2)], 1 / 16)
    with pytest.raises(ValueError):
        besov_seminorm(u, 1.0, 1)


def test_curve_fit_and_csv_round_trip():
    eps = [2.0 ** -j for j in range(3, 9)]
    ords = [math.asinh(1 / e) for e in eps]
    c = ExperimentCurve(eps, ords, LOG, LOG_INVERSE)
    assert c.fit.slope == pytest.approx(1, abs=0.02) and c.fit.r_squared > 0.999
    text = c.to_csv()
    assert text.startswith("# model=log slope=")
    assert text.splitlines()[1] == "abscissa,ordinate,fit_residual"
    back = ExperimentCurve.from_csv(text)
    assert back.fit.slope == c.fit.slope
    p = ExperimentCurve([1, 2, 4, 8], [1, 0.25, 1 / 16, 1 / 64], POWER)
    assert p.fit.slope == pytest.approx(-2)


def test_holomorphic_profile_closed_forms():
    prof = HolomorphicProfile(-1, 3)
    w = np.array([0.5 + 0.3j, 2 - 1j, 1.5j])
    # g'' = 1/w; check g' and g by differencing the closed forms
    d = 1e-6
    for j in (0, 1):
        num = (prof.derivative(j, w + d) - prof.derivative(j, w - d)) / (2 * d)
        assert np.allclose(num, prof.derivative(j + 1, w), rtol=1e-7)
    assert np.allclose(prof.derivative(2, w), 1 / w)


def test_profile_cauchy_riemann_residual_second_order():
    prof = HolomorphicProfile(-1, 2)
    eps = 1 / 8
    errs = []
    for h in (1 / 32, 1 / 64):
        x = np.arange(0.2, 1.0, h)
        y = np.arange(-0.5, 0.5, h)
        X, Y = np.meshgrid(x, y, indexing="ij")
        g = prof.derivative(0, X + 1j * Y + 2 * eps)
        dx = (g[2:, 1:-1] - g[:-2, 1:-1]) / (2 * h)
        dy = (g[1:-1, 2:] - g[1:-1, :-2]) / (2 * h)
        errs.append(np.max(np.abs(dx + 1j * dy)))
    assert errs[0] / errs[1] == pytest.approx(4, rel=0.15)


def test_counterexample_field_frame_and_metadata():
    lap = catalog("laplacian", n=2)
    u = counterexample_field(lap, Direction.parse("0,1"), 1 / 8, h=1 / 16)
    assert u.boundary_axis == 0 and u.metadata["coordinates"] == "frame"
    assert u.is_complex


def test_counterexample_invariant_volume_bounded_face_growing():
    lap = catalog("laplacian", n=2)
    fam, failing = family_for(lap, Direction.parse("0,1"))
    assert failing
    faces, vols = [], []
    for e in (2.0 ** -3, 2.0 ** -6, 2.0 ** -10):
        f, v = counterexample_norms(fam, e, 1 / 64, 8)
        faces.append(f)
        vols.append(v)
    assert max(vols) / min(vols) - 1 <= 0.25
    assert faces[0] < faces[1] < faces[2]


def test_trace_curve_rotation_invariant():
    lap = catalog("laplacian", n=2)
    eps = [2.0 ** -3, 2.0 ** -5, 2.0 ** -7]
    a = trace_blowup_experiment(lap, Direction.parse("0,1"), eps)
    b = trace_blowup_experiment(lap, Direction.parse("3/5,4/5"), eps)
    assert np.allclose(a.ordinates, b.ordinates, rtol=0.05)


def test_experiments_deterministic():
    sym = catalog("symmetric_gradient", n=2)
    eps = [2.0 ** -3, 2.0 ** -4, 2.0 ** -5]
    a = trace_blowup_experiment(sym, Direction.parse("0,1"), eps, bumps=3, seed=7)
    b = trace_blowup_experiment(sym, Direction.parse("0,1"), eps, bumps=3, seed=7)
    assert a.to_csv() == b.to_csv() and a.summary == b.summary


def test_sobolev_ratio_gradient_dilation_invariant():
    grad = catalog("gradient", n=2)
    nu = Direction.parse("0,1")
    c = sobolev_ratio_experiment(grad, nu, random_bump_fields(grad, nu, 5, seed=1))
    assert c.summary["max_dilation_change"] <= 0.02


def test_null_field_second_order():
    chk = null_field_fd_check(catalog("dev_symmetric_gradient", n=2))
    assert 1.6 <= chk.orders[0] <= 2.4


def test_representation_zero_field():
    assert verify_representation(zero_field(), h=1 / 32).max_error == 0


def test_representation_translation_equivariant():
    base = verify_representation(standard_bump(), h=1 / 64)
    moved = verify_representation(standard_bump((0.25, -0.5)), h=1 / 64)
    assert np.allclose(base.errors, moved.errors, atol=2e-3)


def test_derivative_norm_metadata():
    u = sample_field(lambda x: x[:, 0] * x[:, 1], [(0, 1), (0, 1)], 1 / 8, boundary_axis=0)
    d = derivative_norm_fd(u, 1, ONE_SIDED)
    assert "face_consistency_order" in d.metadata
