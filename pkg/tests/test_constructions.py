import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipticity.constructions import (
    ExtensionRecipe,
    VandermondeError,
    default_profile,
    fd_weights,
    holder_cone_kernel,
    layer_extension_besov,
    layer_extension_top,
    normal_traces,
    random_boundary_data,
    sobolev_kernel,
    superpose_extension,
    vandermonde_coefficients,
    vandermonde_residual,
)
from ellipticity.harness import sample_field


def test_vandermonde_examples():
    assert vandermonde_coefficients([1]) == [[Fraction(1)]]
    mu = vandermonde_coefficients([1, 2])
    assert [mu[0][0], mu[1][0]] == [2, -1]
    assert [mu[0][1], mu[1][1]] == [-1, 1]
    mu = vandermonde_coefficients([1, 2, 3])
    assert vandermonde_residual([1, 2, 3], mu) == 0


def test_vandermonde_rejects_bad_nodes():
    with pytest.raises(VandermondeError):
        vandermonde_coefficients([1, 1])
    with pytest.raises(VandermondeError):
        vandermonde_coefficients([1, -2])


distinct = st.lists(st.fractions(min_value=Fraction(1, 9), max_value=10, max_denominator=9),
                    min_size=1, max_size=5, unique=True)


@settings(max_examples=40, deadline=None)
@given(distinct)
def test_vandermonde_residual_exactly_zero(lams):
    mu = vandermonde_coefficients(lams)
    assert vandermonde_residual(lams, mu) == 0
    for j in range(len(lams)):
        for l in range(len(lams)):
            assert sum(mu[i][j] * lams[i] ** l for i in range(len(lams))) == int(j == l)


def test_fd_weights_central_second_derivative():
    assert fd_weights([-1, 0, 1], 2) == [1, -2, 1]


def test_recipe_json_round_trip():
    r = ExtensionRecipe.build(3)
    back = ExtensionRecipe.from_json(r.to_json())
    assert back.mu == r.mu and back.lambdas == r.lambdas and r.residual() == 0


def boundary(f, h, box=((-1.5, 1.5),)):
    return sample_field(f, box, h)


def bump1(x):
    return np.clip(1 - x[:, 0] ** 2, 0, None) ** 4


def test_layer_top_k1_exact_trace():
    g = boundary(bump1, 1 / 32)
    u = layer_extension_top(g, 1, 0.5)
    assert np.array_equal(normal_traces(u, [0])[0], g.values)


def test_layer_top_k2_constant_data():
    errs = []
    for h in (1 / 32, 1 / 64):
        g = boundary(lambda x: np.ones(len(x)), h)
        u = layer_extension_top(g, 2, 0.5)
        t0, t1 = normal_traces(u, [0, 1])
        assert np.max(np.abs(t0)) == 0
        errs.append(np.max(np.abs(t1 - 1)))
    assert errs[1] < errs[0] * 0.6


def test_layer_besov_traces():
    g = boundary(bump1, 1 / 64)
    u0 = layer_extension_besov(g, 0, 2)
    assert np.allclose(normal_traces(u0, [0])[0], g.values)
    errs = []
    for h in (1 / 64, 1 / 128):
        g = boundary(bump1, h)
        u = layer_extension_besov(g, 1, 3)
        t0, t1 = normal_traces(u, [0, 1])
        assert np.max(np.abs(t0)) == 0
        errs.append(np.max(np.abs(t1 - g.values)))
    assert errs[1] < errs[0] * 0.7


def test_superpose_k1_is_layer_top():
    g = boundary(bump1, 1 / 32)
    r = ExtensionRecipe.build(1, epsilon=0.5)
    a = superpose_extension([g], r)
    b = layer_extension_top(g, 1, 0.5, r.theta)
    n = min(a.counts[-1], b.counts[-1])
    assert np.allclose(a.values[:, :n], b.values[:, :n])


def test_superpose_k2_bump_and_zero():
    errs = []
    for h in (1 / 32, 1 / 64):
        g0 = boundary(bump1, h)
        g1 = g0.with_values(np.zeros_like(g0.values))
        u = superpose_extension([g0, g1], ExtensionRecipe.build(2))
        t0, t1 = normal_traces(u, [0, 1])
        errs.append(np.max(np.abs(t1)))
        assert np.max(np.abs(t0 - g0.values)) < 1e-12
    assert 1.6 <= errs[0] / errs[1] <= 2.4


def test_superpose_zero_data():
    g = boundary(lambda x: np.zeros(len(x)), 1 / 16)
    u = superpose_extension([g, g, g], ExtensionRecipe.build(3))
    assert not np.any(u.values)


def test_superpose_linear():
    r = ExtensionRecipe.build(3)
    a = random_boundary_data(3, 1, 1 / 32)
    b = random_boundary_data(3, 2, 1 / 32)
    s = [x + y for x, y in zip(a, b)]
    lhs = superpose_extension(s, r).values
    rhs = superpose_extension(a, r).values + superpose_extension(b, r).values
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12)


def test_trace_richardson_ratios_first_order():
    from ellipticity.constructions import verify_extension

    rep = verify_extension(k=3, seed=4)
    for r in rep["richardson_ratios"][1:]:
        assert 1.7 <= r <= 2.3


PROFILE2 = default_profile(2)
PROFILE3 = default_profile(3)


def test_profile_normalized():
    assert PROFILE2.normalization_error() <= 1e-8
    assert PROFILE3.normalization_error() <= 1e-8


def test_kernel_zero_below_cone():
    y = np.array([[0.3, -1.0], [1.0, 0.5], [5.0, 2.4999], [-1.0, 0.0]])
    assert np.all(sobolev_kernel(2, 1, PROFILE2, y, (0,)) == 0)
    with pytest.raises(ValueError):
        sobolev_kernel(2, 1, PROFILE2, np.zeros(2), (0,))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 3), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_kernel_homogeneity(n, k, seed):
    prof = PROFILE2 if n == 2 else PROFILE3
    rng = np.random.default_rng(seed)
    y = rng.normal(size=(20, n))
    y[:, -1] = np.abs(y[:, -1]) + 0.1
    tgt = tuple(rng.integers(0, n, size=k))
    a = sobolev_kernel(n, k, prof, 2 * y, tgt)
    b = sobolev_kernel(n, k, prof, y, tgt)
    assert np.all((a == 0) == (b == 0))
    nz = b != 0
    assert np.all(np.abs(a[nz] - 2.0 ** (k - n) * b[nz]) <= 1e-12 * np.abs(a[nz]))


def test_kernel_support_exact_on_random_points():
    rng = np.random.default_rng(5)
    y = rng.normal(size=(500, 3))
    v = sobolev_kernel(3, 2, PROFILE3, y, (0, 2))
    below = y[:, 2] <= 0.5 * np.linalg.norm(y, axis=1)
    assert np.all(v[below] == 0)


def test_holder_cone_kernel_slice():
    k = holder_cone_kernel(2, 0.5)
    y = np.array([[3.0, 1.0]])
    assert k(y)[0] == pytest.approx(math.hypot(3, 1) ** (-1.5))
