import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cesarohardy.errors import DivergenceError, InvalidArgument, NotPositiveDefinite
from cesarohardy.functions import exponential, gaussian, laguerre, t_power_exp
from cesarohardy.kernels import (
    GramMatrix,
    KernelSpec,
    covariance_b,
    covariance_n,
    gram,
    green_fn,
    green_kernel_integral,
    kernel_k,
    kernel_norm,
    reproducing_pairing,
    weyl_kernel_derivative,
)
from cesarohardy.special import gamma_fn

GRID = np.geomspace(0.1, 10.0, 5)


def test_order_one_is_reciprocal_max():
    s, t = np.meshgrid(GRID, GRID)
    np.testing.assert_allclose(kernel_k(1.0, s, t), 1 / np.maximum(s, t), rtol=1e-15)


def test_order_two_closed_form():
    # 2F1(-1, 1; 3; x) = 1 - x/3
    s, t = 0.4, 1.6
    np.testing.assert_allclose(kernel_k(2.0, s, t), (1 - 0.25 / 3) / (2 * 1.6), rtol=1e-14)


# frozen from mpmath.hyp2f1 at 30 digits
@pytest.mark.parametrize(
    "alpha, s, t, want",
    [
        (1.5, 1.0, 2.0, 0.37827545164773481524),
        (0.75, 0.5, 3.0, 0.30361263390034496478),
        (3.0, 0.2, 0.7, 0.10301263362487852758),
    ],
)
@pytest.mark.parametrize("strategy", ["hypergeometric", "quadrature-oracle"])
def test_kernel_frozen(alpha, s, t, want, strategy):
    np.testing.assert_allclose(kernel_k(KernelSpec(alpha, strategy), s, t), want, rtol=1e-10)


@pytest.mark.parametrize("alpha", [0.75, 1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_diagonal_closed_form(alpha, t):
    want = 1 / (gamma_fn(alpha) ** 2 * (2 * alpha - 1) * t)
    np.testing.assert_allclose(kernel_k(alpha, t, t), want, rtol=1e-10)
    np.testing.assert_allclose(kernel_norm(alpha, t) ** 2, want, rtol=1e-14)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_three_strategies_agree(alpha):
    s, t = np.meshgrid(GRID, GRID)
    values = [kernel_k(KernelSpec(alpha, name), s, t) for name in ("hyp", "int", "quad")]
    np.testing.assert_allclose(values[1], values[0], rtol=1e-12)
    np.testing.assert_allclose(values[2], values[0], rtol=1e-8)


@pytest.mark.parametrize("alpha", [0.75, 1.5, 2.4])
def test_green_integral_route(alpha):
    for s, t in [(0.5, 2.0), (1.0, 1.0), (3.0, 0.2)]:
        np.testing.assert_allclose(green_kernel_integral(alpha, s, t), kernel_k(alpha, s, t), rtol=1e-8)


def test_integer_sum_rejects_fractional_order():
    with pytest.raises(InvalidArgument):
        KernelSpec(1.5, "integer-sum")


def test_unknown_strategy():
    with pytest.raises(InvalidArgument):
        KernelSpec(1.0, "series")


@pytest.mark.parametrize("alpha", [0.5, 0.3])
def test_diagonal_diverges(alpha):
    with pytest.raises(DivergenceError):
        kernel_k(alpha, 1.0, 1.0)
    with pytest.raises(DivergenceError):
        kernel_norm(alpha, 1.0)
    # off-diagonal values stay finite
    assert np.isfinite(kernel_k(alpha, 1.0, 2.0))


def test_nonpositive_arguments():
    with pytest.raises(InvalidArgument):
        kernel_k(1.0, 0.0, 1.0)


@pytest.mark.parametrize("gap", [1e-12, 1e-8, 1e-4])
def test_near_diagonal_against_mpmath(gap):
    # the kernel is only Hoelder continuous there: 1 - m/M enters as a power 2 alpha - 1
    alpha, t = 0.8, 1.0 + gap
    x = 1 - mpmath.mpf(gap) / (1 + mpmath.mpf(gap))
    want = mpmath.hyp2f1(1 - alpha, 1, alpha + 1, x) / (t * mpmath.gamma(alpha) * mpmath.gamma(alpha + 1))
    np.testing.assert_allclose(kernel_k(alpha, 1.0, t), float(want), rtol=1e-11)


@settings(max_examples=30, deadline=None)
@given(
    alpha=st.floats(0.55, 4.0),
    s=st.floats(0.01, 100.0),
    t=st.floats(0.01, 100.0),
    lam=st.floats(0.01, 100.0),
)
def test_kernel_homogeneity_and_symmetry(alpha, s, t, lam):
    k = kernel_k(alpha, s, t)
    np.testing.assert_allclose(kernel_k(alpha, t, s), k, rtol=1e-15)
    np.testing.assert_allclose(kernel_k(alpha, lam * s, lam * t), k / lam, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.55, 4.0), s=st.floats(0.01, 100.0), t=st.floats(0.01, 100.0))
def test_cauchy_schwarz(alpha, s, t):
    assert kernel_k(alpha, s, t) <= kernel_norm(alpha, s) * kernel_norm(alpha, t) * (1 + 1e-12)


def test_green_fn_support():
    assert green_fn(1.5, 2.0, 1.0) == 0.0
    np.testing.assert_allclose(green_fn(1.0, 1.0, 2.0), 0.5)
    np.testing.assert_allclose(weyl_kernel_derivative(1.0, 1.0, 2.0), 0.25)


@pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
@pytest.mark.parametrize(
    "f", [exponential(1.0), t_power_exp(2, 1.0), laguerre(3), gaussian()], ids=lambda f: f.name
)
def test_reproducing_property(f, alpha, t):
    value, err = reproducing_pairing(f, alpha, t)
    np.testing.assert_allclose(value, f(t), atol=1e-8)
    assert err < 1e-6


def test_pairing_needs_kernel_in_space():
    with pytest.raises(DivergenceError):
        reproducing_pairing(exponential(1.0), 0.5, 1.0)


# ---------------------------------------------------------------------------
# covariances


def test_brownian_covariance_is_min():
    t, s = np.meshgrid(GRID, GRID)
    np.testing.assert_allclose(covariance_b(0.0, t, s), np.minimum(t, s), rtol=1e-15)


# frozen from mpmath at 30 digits
@pytest.mark.parametrize("alpha, want", [(1.5, 1.0699245480660690408), (0.4, 0.44676966432350095414)])
def test_covariance_n_frozen(alpha, want):
    for route in ("identity", "direct"):
        np.testing.assert_allclose(covariance_n(alpha, 1.0, 2.0, route=route), want, rtol=1e-10)


@pytest.mark.parametrize("alpha", [0.75, 1.0, 2.5])
def test_covariance_routes_agree(alpha):
    t, s = np.meshgrid(GRID, GRID)
    np.testing.assert_allclose(
        covariance_n(alpha, t, s, route="direct"), covariance_n(alpha, t, s), rtol=1e-9
    )


def test_covariance_b_shift():
    np.testing.assert_allclose(covariance_b(0.7, 1.0, 3.0), covariance_n(1.7, 1.0, 3.0), rtol=0)


def test_covariance_b_rejects_negative_order():
    with pytest.raises(InvalidArgument):
        covariance_b(-0.1, 1.0, 2.0)


def test_covariance_unknown_route():
    with pytest.raises(InvalidArgument):
        covariance_n(1.0, 1.0, 2.0, route="fft")


@pytest.mark.parametrize("alpha", [0.0, 0.3, 1.2])
@pytest.mark.parametrize("lam", [0.5, 7.0])
def test_covariance_self_similarity(alpha, lam):
    t, s = np.meshgrid(GRID, GRID)
    np.testing.assert_allclose(
        covariance_b(alpha, lam * t, lam * s), lam ** (2 * alpha + 1) * covariance_b(alpha, t, s), rtol=1e-12
    )


# ---------------------------------------------------------------------------
# Gram matrices


@pytest.mark.parametrize("kernel", [0.75, 2.0, KernelSpec(3.0, "int"), ("n", 1.5), ("b", 0.0)], ids=str)
def test_gram_is_psd(kernel):
    G = gram(kernel, np.geomspace(0.05, 20.0, 40))
    assert isinstance(G, GramMatrix)
    np.testing.assert_array_equal(G.entries, G.entries.T)
    assert G.min_eigenvalue >= -1e-10 * np.diag(G.entries).max()


def test_gram_brownian_entries():
    g = np.array([1.0, 2.0, 3.0])
    np.testing.assert_allclose(gram(("b", 0.0), g).entries, np.minimum.outer(g, g), rtol=1e-15)


@pytest.mark.parametrize("grid", [[], [1.0, 1.0], [0.0, 1.0], [[1.0, 2.0]]], ids=["empty", "repeat", "zero", "2d"])
def test_gram_grid_validation(grid):
    with pytest.raises(InvalidArgument):
        gram(1.0, grid)


def test_gram_rejects_unknown_descriptor():
    with pytest.raises(InvalidArgument):
        gram("k", [1.0, 2.0])


def test_gram_certificate_enforced():
    with pytest.raises(NotPositiveDefinite):
        GramMatrix(np.array([1.0, 2.0]), np.array([[1.0, 2.0], [2.0, 1.0]]), None, 0.0, -1.0)
