import math

import numpy as np
import pytest

from cesarohardy.errors import InvalidArgument, UnsupportedFunction
from cesarohardy.functions import (
    Algebraic,
    Compact,
    Exponential,
    Order,
    RealFn,
    as_alpha,
    constant,
    exponential,
    gaussian,
    identity_fn,
    indicator,
    laguerre,
    t_power_exp,
)


@pytest.mark.parametrize("alpha, n, integer", [(0.3, 1, False), (1.0, 2, True), (2.5, 3, False)])
def test_order(alpha, n, integer):
    o = Order(alpha)
    assert o.n == n
    assert o.is_integer is integer
    assert as_alpha(o) == alpha


@pytest.mark.parametrize("alpha", [0.0, -1.0, math.inf, math.nan])
def test_order_rejects(alpha):
    with pytest.raises(InvalidArgument):
        as_alpha(alpha)


def test_decay_metadata_required():
    with pytest.raises(UnsupportedFunction):
        RealFn(lambda t: t, None)


def test_smoothness_tag_checked():
    with pytest.raises(InvalidArgument):
        RealFn(lambda t: np.exp(-t), Exponential(1.0), smoothness="rough")


@pytest.mark.parametrize("a, b", [(-1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
def test_compact_support_validated(a, b):
    with pytest.raises(InvalidArgument):
        Compact(a, b)


def test_exponential_rate_positive():
    with pytest.raises(InvalidArgument):
        Exponential(0.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_envelope_rejects_growth_under_decay_tag():
    with pytest.raises(UnsupportedFunction):
        RealFn(lambda t: np.exp(t), Exponential(1.0))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_envelope_rejects_nonfinite_values():
    with pytest.raises(UnsupportedFunction):
        RealFn(lambda t: 1 / (t - t), Algebraic(0.0))


def test_support_violation_detected():
    with pytest.raises(UnsupportedFunction):
        RealFn(lambda t: np.ones_like(t), Compact(0.0, 1.0))


def test_compact_support_becomes_breaks():
    f = indicator(0.5, 2.0)
    assert f.breaks == (0.5, 2.0)
    assert f.tail.end == 2.0


def test_scalar_in_scalar_out():
    f = exponential(2.0)
    assert isinstance(f(1.0), float)
    assert f(np.ones((2, 3))).shape == (2, 3)


def test_broadcast_constant_evaluator():
    assert constant(3.0)(np.array([1.0, 2.0])).tolist() == [3.0, 3.0]


def test_tails():
    assert exponential(2.0).tail.rate == 2.0
    assert identity_fn().tail.power == -1.0
    assert gaussian().scale == 0.25


@pytest.mark.parametrize("k", [0, 1, 2.5])
def test_t_power_exp_laplace(k):
    f = t_power_exp(k, 1.0)
    np.testing.assert_allclose(f.laplace(1.0), math.gamma(k + 1) / 2 ** (k + 1))
    assert f.singular_at_zero is (k == 2.5)


def test_laguerre_laplace_at_half():
    # ell_m-hat(1/2) = 1 for m = 0 and 0 otherwise
    assert laguerre(0).laplace(0.5) == 1.0
    assert laguerre(3).laplace(0.5) == 0.0


def test_derived_inherits_flags():
    f = indicator(1.0, 3.0)
    g = f.derived(lambda t: 2 * f(t), Compact(1.0, 3.0))
    assert g.breaks == f.breaks
    assert g.smoothness == "measurable"
