import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermite_multipliers.errors import GridMismatchError, SizingError
from hermite_multipliers.hermite_core import (
    GridFunction, GridSpec, build_basis, eigenvalue, eval_hermite, gauss_hermite_function_weights,
    gauss_hermite_rule, hermite_function, hermite_function_d, hermite_functions, hermite_lp_norm,
    hermite_lp_norms, hermite_series, lp_norm, sample)

mpmath.mp.dps = 50


def phi_ref(k, x):
    """phi_k(x) = (2^k k! sqrt(pi))^(-1/2) H_k(x) exp(-x^2/2) in high precision."""
    x = mpmath.mpf(x)
    norm = mpmath.sqrt(2**k * mpmath.factorial(k) * mpmath.sqrt(mpmath.pi))
    return float(mpmath.hermite(k, x) * mpmath.exp(-x * x / 2) / norm)


@pytest.mark.parametrize("k", [0, 1, 2, 5, 17, 50, 100])
def test_matches_rodrigues_form(k):
    xs = np.linspace(-15, 15, 61)
    got = hermite_functions(100, xs)[:, k]
    want = np.array([phi_ref(k, x) for x in xs])
    assert np.max(np.abs(got - want)) < 1e-12
    assert np.allclose(hermite_function(k, xs), got, atol=1e-15, rtol=0)


def test_known_values():
    assert hermite_function(0, 0.0) == pytest.approx(math.pi**-0.25, abs=1e-16)
    assert hermite_function(0, 0.0) == pytest.approx(0.7511255444649425, abs=1e-15)
    assert hermite_function(50, 0.0) == pytest.approx(phi_ref(50, 0), abs=1e-14)


def test_large_arguments_underflow_to_zero():
    vals = hermite_functions(200, np.array([50.0, 1e3, -1e5]))
    assert np.all(np.isfinite(vals))
    assert np.max(np.abs(vals)) < 1e-200


def test_high_index_stays_finite():
    x = np.linspace(-100, 100, 2001)
    v = hermite_function(4000, x)
    assert np.all(np.isfinite(v))
    # sup-norm decays like k^(-1/12); at k = 4000 it is well below phi_0(0)
    assert 0.1 < np.abs(v).max() < 0.75


@settings(max_examples=40, deadline=None)
@given(k=st.integers(0, 300), x=st.floats(-30, 30))
def test_parity(k, x):
    assert hermite_function(k, -x) == pytest.approx((-1) ** k * hermite_function(k, x), abs=1e-14)


def test_derivative_matches_finite_difference():
    x = np.linspace(-6, 6, 41)
    h = 1e-6
    for k in (0, 3, 20):
        _, d = hermite_function_d(k, x)
        fd = (hermite_function(k, x + h) - hermite_function(k, x - h)) / (2 * h)
        assert np.max(np.abs(d - fd)) < 1e-8


def test_series_agrees_with_matrix():
    rng = np.random.default_rng(0)
    c = rng.standard_normal((3, 40))
    x = np.linspace(-8, 8, 101)
    assert np.allclose(hermite_series(c, x), c @ hermite_functions(39, x).T, atol=1e-13)


def test_eval_hermite_tensor_product():
    pts = np.array([[0.3, -1.2], [2.0, 0.5]])
    got = eval_hermite((2, 3), pts)
    want = hermite_function(2, pts[:, 0]) * hermite_function(3, pts[:, 1])
    assert got.dtype == complex
    assert np.allclose(got.real, want, atol=1e-15) and np.all(got.imag == 0)
    with pytest.raises(ValueError):
        eval_hermite((1, -1), pts)


def test_eigenvalue():
    assert eigenvalue((0,)) == 1
    assert eigenvalue((2, 3)) == 12
    assert eigenvalue(4) == 9
    with pytest.raises(ValueError):
        eigenvalue((1, 1), n=3)


# --------------------------------------------------------------------------
# quadrature

def test_gauss_hermite_closed_forms():
    x, w = gauss_hermite_rule(2)
    assert np.allclose(x, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    assert np.allclose(w, [math.sqrt(math.pi) / 2] * 2, atol=1e-15)
    x, w = gauss_hermite_rule(3)
    assert np.allclose(x, [-math.sqrt(1.5), 0, math.sqrt(1.5)], atol=1e-15)
    assert np.allclose(w, [math.sqrt(math.pi) / 6, 2 * math.sqrt(math.pi) / 3, math.sqrt(math.pi) / 6],
                       atol=1e-15)


def test_function_weights_are_christoffel_form():
    x, w = gauss_hermite_rule(30)
    W = gauss_hermite_function_weights(x)
    assert np.allclose(W, w * np.exp(x**2), rtol=1e-12)


@pytest.mark.parametrize("M", [16, 65, 200])
def test_function_weights_integrate_products_exactly(M):
    x, _ = gauss_hermite_rule(M)
    W = gauss_hermite_function_weights(x)
    H = hermite_functions(M - 1, x)
    G = (H * W[:, None]).T @ H
    assert np.max(np.abs(G - np.eye(M))) < 1e-12


def test_quadrature_order_cap():
    with pytest.raises(SizingError):
        gauss_hermite_rule(10_001)
    with pytest.raises(ValueError):
        gauss_hermite_rule(0)


# --------------------------------------------------------------------------
# grids and bases

def test_build_basis_sizes():
    b = build_basis(1, 16)
    assert b.quad_order == 17
    assert b.grid.nodes[0][-1] >= math.sqrt(2 * 33) + 4
    assert b.grid.spacing()[0] <= math.pi / (4 * math.sqrt(33)) + 1e-15
    with pytest.raises(SizingError):
        build_basis(1, 1_000_000)
    with pytest.raises(SizingError):
        build_basis(3, 200)


def test_check_grid_rejects_coarse_or_short_grids():
    b = build_basis(1, 32)
    with pytest.raises(GridMismatchError):
        b.check_grid(GridSpec.uniform(20.0, 0.5, 1))
    with pytest.raises(GridMismatchError):
        b.check_grid(GridSpec.uniform(5.0, 0.01, 1))
    with pytest.raises(GridMismatchError):
        b.check_grid(build_basis(2, 4).grid)
    b.check_grid(b.grid)
    b.check_grid(b.quad_grid)


@pytest.mark.parametrize("n,N", [(1, 40), (2, 10)])
def test_orthonormal_on_uniform_grid(n, N):
    b = build_basis(n, N)
    grid = b.grid
    H = b.axis_matrix(grid.nodes[0])
    G = (H * grid.weights[0][:, None]).T @ H
    assert np.max(np.abs(G - np.eye(N + 1))) < 1e-12


def test_sample_and_arithmetic():
    grid = GridSpec.uniform(3.0, 0.5, 2)
    f = sample(grid, lambda p: p[:, 0] + 2 * p[:, 1])
    g = f + f * 2.0 - f
    assert np.allclose(g.values, 2 * f.values)
    assert f.tensor().shape == grid.shape


# --------------------------------------------------------------------------
# Lp norms

def phi0_norm(p):
    if math.isinf(p):
        return math.pi**-0.25
    return math.pi**-0.25 * (2 * math.pi / p) ** (1 / (2 * p))


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4, math.inf])
def test_lp_of_ground_state(p):
    assert hermite_lp_norms(0, [p])[float(p)] == pytest.approx(phi0_norm(p), rel=1e-13)
    b = build_basis(1, 8)
    f = GridFunction(b.grid, hermite_function(0, b.grid.nodes[0]))
    assert lp_norm(f, p) == pytest.approx(phi0_norm(p), rel=1e-12)


def test_lp_closed_forms_first_excited_state():
    c = math.sqrt(2) * math.pi**-0.25
    norms = hermite_lp_norms(1, [1, 2, math.inf])
    assert norms[1.0] == pytest.approx(2 * c, rel=1e-13)
    assert norms[2.0] == pytest.approx(1.0, rel=1e-13)
    assert norms[math.inf] == pytest.approx(c * math.exp(-0.5), rel=1e-14)


@pytest.mark.parametrize("k,p", [(10, 3.0), (25, 1.0), (7, 6.0)])
def test_lp_against_mpmath_quadrature(k, p):
    mpmath.mp.dps = 30
    zeros = sorted(float(z) for z in np.roots(np.polynomial.hermite.herm2poly([0] * k + [1])[::-1]).real)
    R = math.sqrt(2 * k + 1) + 12
    pts = [-R] + zeros + [R]
    val = mpmath.quad(lambda t: abs(phi_ref(k, t)) ** p, pts)
    mpmath.mp.dps = 50
    assert hermite_lp_norms(k, [p])[p] == pytest.approx(float(val) ** (1 / p), rel=1e-11)


def test_l2_norm_is_one_for_high_indices():
    for k in (128, 1000, 4096):
        assert hermite_lp_norms(k, [2])[2.0] == pytest.approx(1.0, abs=1e-12)


def test_oversample_stability():
    a = hermite_lp_norms(500, [1, 3, 4, math.inf], oversample=1.0)
    b = hermite_lp_norms(500, [1, 3, 4, math.inf], oversample=2.0)
    for p in a:
        assert a[p] == pytest.approx(b[p], rel=1e-11)


def test_multi_index_norm_is_a_product():
    val = hermite_lp_norm((3, 5), 3)
    want = hermite_lp_norms(3, [3])[3.0] * hermite_lp_norms(5, [3])[3.0]
    assert val == pytest.approx(want, rel=1e-15)
    with pytest.raises(ValueError):
        hermite_lp_norm(2, 0.5)
