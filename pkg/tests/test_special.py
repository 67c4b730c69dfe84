import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cesarohardy.errors import DivergenceError, DomainError, InvalidArgument
from cesarohardy.quadrature import Tail, halfline_nodes, interval_nodes
from cesarohardy.special import (
    SpecialFnContext,
    beta_fn,
    gamma_fn,
    hyp2f1_kernel,
    laguerre_fn,
    laguerre_sum,
    ln_gamma,
    pochhammer,
)


def test_elementary_values():
    assert gamma_fn(5) == 24
    assert beta_fn(1, 2 * 1 - 1) == pytest.approx(1.0, rel=1e-15)
    assert pochhammer(1, 3) == 6
    assert pochhammer(0.5, 0) == 1
    np.testing.assert_allclose(ln_gamma(100.0), math.lgamma(100.0), rtol=1e-14)


def test_beta_does_not_overflow():
    # Gamma(400) overflows a double; B(200, 200) does not
    np.testing.assert_allclose(np.log(beta_fn(200.0, 200.0)), float(mpmath.log(mpmath.beta(200, 200))), rtol=1e-12)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_gamma_poles(x):
    with pytest.raises(DomainError):
        gamma_fn(x)
    with pytest.raises(DomainError):
        ln_gamma(x)


def test_beta_requires_positive_arguments():
    with pytest.raises(DomainError):
        beta_fn(0.0, 1.0)


def test_pochhammer_rejects_fractional_order():
    with pytest.raises(InvalidArgument):
        pochhammer(1.0, 1.5)


@pytest.mark.parametrize("tol, terms", [(0.0, 100), (1e-5, 100), (1e-12, 10)])
def test_context_invariants(tol, terms):
    with pytest.raises(InvalidArgument):
        SpecialFnContext(tol, terms)


# ---------------------------------------------------------------------------
# 2F1(1 - alpha, 1; alpha + 1; x)


@pytest.mark.parametrize("x", [0.0, 0.3, 0.999, 1.0])
def test_hyp2f1_alpha_one_is_one(x):
    assert hyp2f1_kernel(1.0, x) == 1.0


def test_hyp2f1_terminating_at_one():
    np.testing.assert_allclose(hyp2f1_kernel(2.0, 1.0), 2 / 3, rtol=1e-15)


@pytest.mark.parametrize("alpha", [0.75, 1.5, 3.2])
def test_hyp2f1_gauss_limit(alpha):
    np.testing.assert_allclose(hyp2f1_kernel(alpha, 1.0), alpha / (2 * alpha - 1), rtol=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 0.3])
def test_hyp2f1_diverges_at_one(alpha):
    with pytest.raises(DivergenceError):
        hyp2f1_kernel(alpha, 1.0)


@pytest.mark.parametrize("x", [-0.1, 1.5])
def test_hyp2f1_domain(x):
    with pytest.raises(DomainError):
        hyp2f1_kernel(0.75, x)


# frozen from mpmath.hyp2f1 at 30 digits
@pytest.mark.parametrize(
    "alpha, x, want",
    [
        (0.75, 0.5, 1.0952202196882644785),
        (1.5, 0.9, 0.78367995470244186184),
        (0.6, 1 - 1e-6, 2.8520504057620619627),
    ],
)
def test_hyp2f1_frozen(alpha, x, want):
    np.testing.assert_allclose(hyp2f1_kernel(alpha, x), want, rtol=1e-11)


def test_hyp2f1_euler_integral_oracle():
    # int_0^1 (1-t)^(c-2) (1-zt)^-a dt / B(1, c-1) with a = 1/4, c = 7/4
    t, w = interval_nodes(0.0, 1.0, right_power=-0.25, grade_right=10)
    want = ((1 - 0.5 * t) ** (-0.25)) @ w / beta_fn(1.0, 0.75)
    np.testing.assert_allclose(hyp2f1_kernel(0.75, 0.5), want, rtol=1e-10)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(0.05, 6.0), x=st.floats(0.0, 1.0 - 1e-9))
def test_hyp2f1_matches_mpmath(alpha, x):
    want = float(mpmath.hyp2f1(1 - alpha, 1, alpha + 1, x))
    np.testing.assert_allclose(hyp2f1_kernel(alpha, x), want, rtol=1e-12)


def test_hyp2f1_close_to_one_via_complement():
    q = 1e-14
    got = hyp2f1_kernel(0.8, None, one_minus_x=q)
    want = float(mpmath.hyp2f1(0.2, 1, 1.8, 1 - mpmath.mpf(q)))
    np.testing.assert_allclose(got, want, rtol=1e-11)


def test_hyp2f1_error_estimate_is_small():
    value, err = hyp2f1_kernel(0.75, np.array([0.1, 0.7, 0.99]), full_output=True)
    assert np.all(err < 1e-12 * np.abs(value))


# ---------------------------------------------------------------------------
# Laguerre functions


def test_laguerre_examples():
    np.testing.assert_allclose(laguerre_fn(0, 1.0), 0.6065306597126334, rtol=1e-15)
    np.testing.assert_allclose(laguerre_fn(1, 2.0), -math.exp(-1), rtol=1e-15)


@pytest.mark.parametrize("m", range(11))
def test_laguerre_recurrence_vs_sum(m):
    t = np.array([0.1, 1.0, 10.0])
    np.testing.assert_allclose(laguerre_fn(m, t), laguerre_sum(m, t), rtol=1e-10, atol=1e-15)


@pytest.mark.parametrize("m, t", [(25, 3.7), (60, 40.0), (100, 0.2)])
def test_laguerre_high_order_against_mpmath(m, t):
    want = float(mpmath.exp(-t / 2) * mpmath.laguerre(m, 0, t))
    np.testing.assert_allclose(laguerre_fn(m, t), want, rtol=1e-10, atol=1e-14)


def test_laguerre_orthonormal():
    t, w = halfline_nodes(Tail(rate=1.0), scale=2.0)
    L = np.array([laguerre_fn(m, t) for m in range(13)])
    np.testing.assert_allclose((L * w) @ L.T, np.eye(13), atol=1e-9)


def test_laguerre_rejects_negative_index():
    with pytest.raises(InvalidArgument):
        laguerre_fn(-1, 1.0)
