import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import exp1

from cesarohardy.errors import DomainError, InvalidArgument, UnsupportedFunction
from cesarohardy.functions import (
    constant,
    exponential,
    identity_fn,
    indicator,
    laguerre,
    t_power_exp,
)
from cesarohardy.operators import (
    cesaro_plus,
    cesaro_plus_fn,
    cesaro_star,
    cesaro_star_fn,
    cesaro_star_subordinated,
    hardy_constant,
    integrate_halfline,
    l2_inner,
    l2_norm,
    pointwise_constant,
    riemann_liouville_fn,
    riemann_liouville_integral,
    sobolev_inner,
    sobolev_norm,
    theta_isometry,
    weyl_derivative,
    weyl_derivative_fn,
    weyl_integral,
    weyl_integral_fn,
    weyl_scale_identity_check,
)
from cesarohardy.special import gamma_fn

T = np.array([0.1, 0.5, 1.0, 2.0, 5.0])
FAMILY = [exponential(1.0), exponential(2.5), laguerre(2), t_power_exp(2, 1.0)]


def test_cesaro_plus_order_one():
    # (1/t) int_0^t exp(-u) du
    np.testing.assert_allclose(cesaro_plus(exponential(1.0), 1.0, T), (1 - np.exp(-T)) / T, rtol=1e-13)


def test_cesaro_plus_constant_is_constant():
    np.testing.assert_allclose(cesaro_plus(constant(2.0), 0.7, T), 2.0, rtol=1e-13)


def test_cesaro_star_order_one_is_e1():
    np.testing.assert_allclose(cesaro_star(exponential(1.0), 1.0, T), exp1(T), rtol=1e-11)


# frozen from mpmath.quad at 30 digits
@pytest.mark.parametrize(
    "op, alpha, t, want",
    [
        (cesaro_star, 0.5, 1.0, 0.28034425456132801828),
        (cesaro_star, 2.5, 0.1, 2.3078918303870777483),
        (cesaro_plus, 0.5, 2.0, 0.31999403728270446189),
    ],
)
def test_frozen_averages(op, alpha, t, want):
    np.testing.assert_allclose(op(exponential(1.0), alpha, t), want, rtol=1e-11)


def test_error_estimates_returned():
    value, err = cesaro_star(exponential(1.0), 0.5, T, full_output=True)
    assert value.shape == err.shape == T.shape
    assert np.all(err < 1e-9)


@pytest.mark.parametrize("t", [0.0, -1.0, math.nan])
def test_points_must_be_positive(t):
    with pytest.raises(DomainError):
        cesaro_star(exponential(1.0), 1.0, t)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7, 3.0])
@pytest.mark.parametrize("f", FAMILY[:3], ids=lambda f: f.name)
def test_subordinated_matches_direct(f, alpha):
    t = np.array([0.3, 1.0, 4.0])
    np.testing.assert_allclose(cesaro_star_subordinated(f, alpha, t), cesaro_star(f, alpha, t), atol=1e-8)


@pytest.mark.parametrize("alpha, beta", [(0.5, 1.0), (1.5, 0.7), (2.0, 2.0)])
def test_averages_commute(alpha, beta):
    f = exponential(1.0)
    t = np.array([0.5, 1.0, 3.0])
    left = cesaro_star(cesaro_plus_fn(f, beta), alpha, t)
    right = cesaro_plus(cesaro_star_fn(f, alpha), beta, t)
    np.testing.assert_allclose(left, right, atol=1e-7)


@pytest.mark.parametrize("alpha", [0.4, 1.0, 2.3])
def test_weyl_fixes_exponential(alpha):
    np.testing.assert_allclose(weyl_integral(exponential(1.0), alpha, T), np.exp(-T), rtol=1e-11)
    value, err = weyl_derivative(exponential(1.0), alpha, T, full_output=True)
    np.testing.assert_allclose(value, np.exp(-T), rtol=1e-5)
    assert np.all(np.abs(value - np.exp(-T)) <= 10 * err)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
def test_weyl_derivative_of_t_exp(alpha):
    np.testing.assert_allclose(
        weyl_derivative(t_power_exp(1, 1.0), alpha, T), (T - alpha) * np.exp(-T), atol=1e-8
    )


@pytest.mark.parametrize("alpha", [0.5, 1.3, 2.0])
@pytest.mark.parametrize("f", FAMILY, ids=lambda f: f.name)
def test_weyl_round_trip(f, alpha):
    t = np.array([0.5, 1.0, 2.0])
    got = weyl_derivative(weyl_integral_fn(f, alpha), alpha, t)
    np.testing.assert_allclose(got, f(t), atol=1e-6)


@pytest.mark.parametrize("alpha, beta", [(0.5, 1.5), (0.3, 2.0), (1.0, 2.5)])
def test_weyl_semigroup(alpha, beta):
    assert weyl_scale_identity_check(laguerre(1), alpha, beta, [0.7, 2.0]) < 1e-6


def test_weyl_scale_identity_needs_order():
    with pytest.raises(InvalidArgument):
        weyl_scale_identity_check(exponential(1.0), 1.0, 0.5, 1.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_weyl_homogeneity(alpha, lam):
    # W^alpha f(lam .) = lam**alpha (W^alpha f)(lam .)
    f, fl = exponential(1.0), exponential(lam)
    t = np.array([0.4, 1.0, 2.0])
    np.testing.assert_allclose(
        weyl_derivative(fl, alpha, t), lam**alpha * weyl_derivative(f, alpha, lam * t), rtol=1e-6
    )


def test_weyl_derivative_fn_decay():
    g = weyl_derivative_fn(identity_fn(), 0.5)
    assert g.decay.power == -0.5


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.5])
def test_riemann_liouville_of_constant(alpha):
    x = np.array([0.5, 1.0, 3.0])
    np.testing.assert_allclose(riemann_liouville_integral(constant(1.0), alpha, x), x**alpha / gamma_fn(alpha + 1), rtol=1e-13)


def test_riemann_liouville_fn_composition():
    # D^-1 D^-1 1 = x**2 / 2
    f = riemann_liouville_fn(riemann_liouville_fn(constant(1.0), 1.0), 1.0)
    np.testing.assert_allclose(f(np.array([1.0, 2.0])), [0.5, 2.0], rtol=1e-12)


def test_theta_is_involution():
    f = exponential(1.0)
    g = theta_isometry(theta_isometry(f, 1.5), 1.5)
    np.testing.assert_allclose(g(T), f(T), rtol=1e-14)


def test_theta_maps_compact_support():
    g = theta_isometry(indicator(0.5, 2.0), 1.0)
    assert (g.decay.a, g.decay.b) == (0.5, 2.0)


@pytest.mark.parametrize(
    "f, want",
    [(exponential(1.0), 1.0), (t_power_exp(3, 2.0), 6 / 16), (indicator(1.0, 4.0), 3.0)],
    ids=["exp", "t3exp", "indicator"],
)
def test_integrate_halfline_values(f, want):
    value, err = integrate_halfline(f)
    np.testing.assert_allclose(value, want, rtol=1e-12)
    assert err < 1e-10


def test_integrate_rejects_slow_decay():
    with pytest.raises(UnsupportedFunction):
        integrate_halfline(identity_fn())


@pytest.mark.parametrize("m", range(6))
def test_laguerre_norms(m):
    value, err = l2_norm(laguerre(m))
    np.testing.assert_allclose(value, 1.0, rtol=1e-12)


def test_weighted_inner_product():
    # int t**2 exp(-2t) dt = 1/4
    value, _ = l2_inner(exponential(1.0), exponential(1.0), weight_power=2.0)
    np.testing.assert_allclose(value, 0.25, rtol=1e-12)


def test_sobolev_norm_of_t_exp():
    # t**alpha (t - alpha) exp(-t) squared and integrated at alpha = 1/2
    res = sobolev_norm(t_power_exp(1, 1.0), 0.5)
    np.testing.assert_allclose(res.value, math.sqrt(0.1875), rtol=1e-8)
    assert res.quadrature_error < 1e-7


@pytest.mark.parametrize("alpha", [0.6, 1.0, 2.0])
def test_sobolev_norm_of_exponential(alpha):
    # int t**(2 alpha) exp(-2t) dt = Gamma(2 alpha + 1) / 2**(2 alpha + 1)
    want = math.sqrt(math.gamma(2 * alpha + 1) / 2 ** (2 * alpha + 1))
    np.testing.assert_allclose(sobolev_norm(exponential(1.0), alpha).value, want, rtol=1e-8)


def test_sobolev_inner_is_polarized_norm():
    f, g = exponential(1.0), laguerre(1)
    inner, _ = sobolev_inner(f, g, 1.0)
    plus = f.derived(lambda t: f(t) + g(t), g.decay)
    minus = f.derived(lambda t: f(t) - g(t), g.decay)
    polar = (sobolev_norm(plus, 1.0).value ** 2 - sobolev_norm(minus, 1.0).value ** 2) / 4
    np.testing.assert_allclose(inner, polar, atol=1e-8)


def test_hardy_constant():
    np.testing.assert_allclose(hardy_constant(1.0), 2.0, rtol=1e-14)


def test_pointwise_constant_domain():
    with pytest.raises(InvalidArgument):
        pointwise_constant(1.0, 1.5)


@settings(max_examples=15, deadline=None)
@given(alpha=st.floats(0.2, 3.0), beta=st.floats(0.7, 2.5), t=st.floats(0.05, 8.0))
def test_pointwise_bound_on_exponential(alpha, beta, t):
    beta = alpha + beta
    f = exponential(1.0)
    lhs = abs(weyl_derivative(f, alpha, t))
    rhs = pointwise_constant(alpha, beta) * t ** -(alpha + 0.5) * sobolev_norm(f, beta).value
    assert lhs <= rhs * (1 + 1e-8)
