"""Gamma-family functions, the kernel hypergeometric function and Laguerre functions.

Only the hypergeometric family ``2F1(1 - alpha, 1; alpha + 1; x)`` on
``[0, 1]`` is needed.  For ``x <= 1/2`` its power series converges at least
like ``2**-k``.  Closer to 1 the series crawls, so the value is carried from
``x = 1/2`` to the target by Taylor re-expansion of the hypergeometric
differential equation, halving the distance to the singular point at every
step.  Callers that know ``1 - x`` more accurately than ``x`` pass it as
``one_minus_x``; this matters on the near-diagonal of the kernel, where the
function has a cusp of order ``(1 - x)**(2 alpha - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import DivergenceError, DomainError, InvalidArgument

__all__ = [
    "SpecialFnContext",
    "gamma_fn",
    "ln_gamma",
    "beta_fn",
    "pochhammer",
    "hyp2f1_kernel",
    "laguerre_fn",
    "laguerre_sum",
]


@dataclass(frozen=True)
class SpecialFnContext:
    """Target relative tolerance and series-length cap."""

    tolerance: float = 1e-12
    max_terms: int = 200

    def __post_init__(self):
        if not 0.0 < self.tolerance <= 1e-6:
            raise InvalidArgument(f"tolerance must lie in (0, 1e-6], got {self.tolerance!r}")
        if self.max_terms < 64:
            raise InvalidArgument(f"max_terms must be at least 64, got {self.max_terms!r}")


DEFAULT_CONTEXT = SpecialFnContext()


def _is_pole(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return (x <= 0) & (x == np.floor(x))


def gamma_fn(x):
    """Euler's gamma function; raises at the poles 0, -1, -2, ..."""
    if np.any(_is_pole(x)):
        raise DomainError("gamma function has a pole at nonpositive integers")
    out = sp.gamma(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def ln_gamma(x):
    """``log |Gamma(x)|``."""
    if np.any(_is_pole(x)):
        raise DomainError("gamma function has a pole at nonpositive integers")
    out = sp.gammaln(np.asarray(x, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def beta_fn(a, b):
    """``B(a, b)`` for positive arguments, evaluated through ``ln_gamma``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("beta function requires positive arguments")
    out = np.exp(sp.gammaln(a) + sp.gammaln(b) - sp.gammaln(a + b))
    return float(out) if np.ndim(out) == 0 else out


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``(a)_k = a (a + 1) ... (a + k - 1)``."""
    if int(k) != k or k < 0:
        raise InvalidArgument(f"pochhammer order must be a nonnegative integer, got {k!r}")
    out = 1.0
    for j in range(int(k)):
        out *= a + j
    return out


# ---------------------------------------------------------------------------
# 2F1(1 - alpha, 1; alpha + 1; x)

_SERIES_LIMIT = 0.5
_TAYLOR_TERMS = 64


def _series(alpha: float, x: np.ndarray, ctx: SpecialFnContext):
    """Power series with term ratio ``x (k + 1 - alpha) / (k + 1 + alpha)``.

    Returns the value, its derivative and an error estimate.
    """
    term = np.ones_like(x)
    value = np.ones_like(x)
    deriv = np.zeros_like(x)
    dterm = np.zeros_like(x)
    err = np.zeros_like(x)
    for k in range(ctx.max_terms):
        ratio = (k + 1.0 - alpha) / (k + 1.0 + alpha)
        # derivative of c_{k+1} x^{k+1} is (k + 1) c_{k+1} x^k
        dterm = (k + 1.0) * ratio * term
        term = term * ratio * x
        value = value + term
        deriv = deriv + dterm
        if ratio == 0.0:
            return value, deriv, np.zeros_like(x)
        err = np.abs(term) * 2.0
        if np.all(err <= ctx.tolerance * 1e-4 * np.abs(value)):
            break
    return value, deriv, err


def _continue_to(alpha: float, q_target: np.ndarray, ctx: SpecialFnContext):
    """Carry (F, F') from x = 1/2 to x = 1 - q_target by Taylor steps.

    The variable is ``q = 1 - x``; every step moves at most half of the
    remaining distance to the singularity, so each Taylor series converges
    like ``2**-n``.
    """
    a_b_1 = 3.0 - alpha
    c = alpha + 1.0
    R = alpha - 1.0
    half = np.full_like(q_target, 0.5)
    F, dF, err = _series(alpha, half, ctx)
    q = half.copy()
    n = np.arange(_TAYLOR_TERMS, dtype=float)
    while True:
        h = np.minimum(q - q_target, 0.5 * q)
        active = h > 0
        if not np.any(active):
            break
        h = np.where(active, h, 0.0)
        p = 1.0 - q
        P0 = p * q
        P1 = 2.0 * q - 1.0
        Q0 = c - a_b_1 * p
        # scaled coefficients d_k = c_k h^k
        d = np.empty((_TAYLOR_TERMS,) + q.shape)
        d[0] = F
        d[1] = dF * h
        for k in range(_TAYLOR_TERMS - 2):
            denom = P0 * (k + 2.0) * (k + 1.0)
            d[k + 2] = -(
                h * (P1 * k + Q0) * (k + 1.0) * d[k + 1]
                + h * h * (-k * (k - 1.0) - a_b_1 * k + R) * d[k]
            ) / denom
        F_new = d.sum(axis=0)
        safe_h = np.where(active, h, 1.0)
        dF_new = (n[1:, None] * d[1:]).sum(axis=0) / safe_h
        trunc = np.abs(d[-1]) + np.abs(d[-2])
        err = np.where(active, err + trunc + 4e-16 * np.abs(F_new), err)
        F = np.where(active, F_new, F)
        dF = np.where(active, dF_new, dF)
        q = np.where(active, q - h, q)
    return F, err


def hyp2f1_kernel(alpha: float, x, *, one_minus_x=None, ctx: SpecialFnContext = DEFAULT_CONTEXT,
                  full_output: bool = False):
    """Evaluate ``2F1(1 - alpha, 1; alpha + 1; x)`` for ``0 <= x <= 1``.

    Parameters
    ----------
    alpha : float
        Positive order.
    x : array_like
        Arguments in ``[0, 1]``.
    one_minus_x : array_like, optional
        ``1 - x`` supplied directly; when given, ``x`` is ignored.
    full_output : bool
        Also return an error estimate.

    Notes
    -----
    Integer ``alpha`` gives a polynomial of degree ``alpha - 1`` which is
    summed exactly.  At ``x = 1`` the Gauss summation formula reduces to
    ``alpha / (2 alpha - 1)`` and requires ``alpha > 1/2``.
    """
    if not alpha > 0:
        raise InvalidArgument(f"alpha must be positive, got {alpha!r}")
    if one_minus_x is None:
        x = np.asarray(x, dtype=float)
        q = 1.0 - x
    else:
        q = np.asarray(one_minus_x, dtype=float)
        x = 1.0 - q
    if np.any(x < 0) or np.any(q < 0) or np.any(~np.isfinite(x)):
        raise DomainError("hypergeometric argument must lie in [0, 1]")
    scalar = x.ndim == 0
    x = np.atleast_1d(x).astype(float)
    q = np.atleast_1d(q).astype(float)
    value = np.empty_like(x)
    err = np.zeros_like(x)

    if float(alpha).is_integer():
        # terminating: c_{k+1} = c_k (k + 1 - alpha) / (k + 1 + alpha)
        coef = 1.0
        total = np.ones_like(x)
        for k in range(int(alpha) - 1):
            coef *= (k + 1.0 - alpha) / (k + 1.0 + alpha)
            total = total + coef * x ** (k + 1)
        value[:] = total
        err[:] = 4e-16 * int(alpha) * np.abs(total)
    else:
        at_one = q == 0.0
        if np.any(at_one):
            if not 2.0 * alpha - 1.0 > 0:
                raise DivergenceError(
                    "2F1(1 - alpha, 1; alpha + 1; 1) diverges for alpha <= 1/2"
                )
            value[at_one] = alpha / (2.0 * alpha - 1.0)
        low = (x <= _SERIES_LIMIT) & ~at_one
        if np.any(low):
            v, _, e = _series(alpha, x[low], ctx)
            value[low], err[low] = v, e
        high = (x > _SERIES_LIMIT) & ~at_one
        if np.any(high):
            v, e = _continue_to(alpha, q[high], ctx)
            value[high], err[high] = v, e
    if scalar:
        value, err = value[0], err[0]
    return (value, err) if full_output else value


# ---------------------------------------------------------------------------
# Laguerre functions


def laguerre_fn(m: int, t):
    """Orthonormal Laguerre function ``exp(-t/2) L_m(t)`` on ``(0, inf)``.

    ``L_m`` comes from the three-term recurrence
    ``(k + 1) L_{k+1} = (2k + 1 - t) L_k - k L_{k-1}``.
    """
    if int(m) != m or m < 0:
        raise InvalidArgument(f"Laguerre index must be a nonnegative integer, got {m!r}")
    t = np.asarray(t, dtype=float)
    prev = np.zeros_like(t)
    cur = np.ones_like(t)
    for k in range(int(m)):
        prev, cur = cur, ((2 * k + 1 - t) * cur - k * prev) / (k + 1)
    out = np.exp(-0.5 * t) * cur
    return float(out) if out.ndim == 0 else out


def laguerre_sum(m: int, t):
    """Explicit alternating-sum form of :func:`laguerre_fn` (reference only, small m)."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for j in range(int(m) + 1):
        total = total + math.comb(int(m), j) * (-1) ** j * t**j / math.factorial(j)
    out = np.exp(-0.5 * t) * total
    return float(out) if out.ndim == 0 else out
