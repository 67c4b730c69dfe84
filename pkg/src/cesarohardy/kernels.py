"""Reproducing kernels on the half-line and the fractional Brownian covariances.

``k_alpha(s, t)`` has three independent evaluation routes:

* ``hypergeometric``: ``2F1(1-alpha, 1; alpha+1; m/M) / (M Gamma(alpha) Gamma(alpha+1))``
  with ``m = min(s, t)``, ``M = max(s, t)``;
* ``integer-sum``: the terminating sum for integer ``alpha``;
* ``quadrature-oracle``: the Euler integral evaluated by graded Gauss-Jacobi.

``n_alpha(t, s) = (ts)**alpha k_alpha(t, s)`` is the covariance of
``alpha``-times integrated white noise and ``b_alpha = n_{alpha+1}`` that of
Riemann-Liouville fractional Brownian motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DivergenceError, InvalidArgument, NotPositiveDefinite
from .functions import Algebraic, Exponential, RealFn, as_alpha
from .linalg import cholesky_spd
from .operators import _weyl_derivative
from .quadrature import COARSE_NODES, PIECE_NODES, Tail, halfline_nodes, interval_nodes
from .special import gamma_fn, hyp2f1_kernel

__all__ = [
    "STRATEGIES",
    "KernelSpec",
    "GramMatrix",
    "kernel_k",
    "kernel_norm",
    "green_fn",
    "green_kernel_integral",
    "weyl_kernel_derivative",
    "reproducing_pairing",
    "covariance_n",
    "covariance_b",
    "gram",
]

STRATEGIES = ("hypergeometric", "integer-sum", "quadrature-oracle")
_ALIASES = {"hyp": "hypergeometric", "int": "integer-sum", "quad": "quadrature-oracle"}


@dataclass(frozen=True)
class KernelSpec:
    """Order and evaluation route for ``k_alpha``."""

    alpha: float
    strategy: str = "hypergeometric"

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        strategy = _ALIASES.get(self.strategy, self.strategy)
        if strategy not in STRATEGIES:
            raise InvalidArgument(f"unknown kernel strategy {self.strategy!r}")
        if strategy == "integer-sum" and not float(self.alpha).is_integer():
            raise InvalidArgument("the integer-sum strategy needs an integer order")
        object.__setattr__(self, "strategy", strategy)


def _pairs(s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(s > 0)) or np.any(~(t > 0)):
        raise InvalidArgument("kernel arguments must be positive")
    s, t = np.broadcast_arrays(s, t)
    lo = np.minimum(s, t)
    hi = np.maximum(s, t)
    # relative gap computed from the difference, exact for nearby arguments
    gap = np.abs(s - t) / hi
    return lo, hi, gap


def _check_diagonal(alpha: float, gap: np.ndarray):
    if np.any(gap == 0) and not alpha > 0.5:
        raise DivergenceError(
            f"k_alpha(t, t) diverges for alpha = {alpha:g} <= 1/2 (no reproducing kernel)"
        )


def _log_prefactor(alpha: float, hi: np.ndarray) -> np.ndarray:
    return -np.log(hi) - gammaln(alpha) - gammaln(alpha + 1.0)


def _hypergeometric(alpha, lo, hi, gap):
    F = hyp2f1_kernel(alpha, None, one_minus_x=gap)
    return F * np.exp(_log_prefactor(alpha, hi))


def _integer_sum(alpha, lo, hi, gap):
    n = int(alpha)
    ratio = lo / hi
    total = np.zeros_like(ratio)
    for j in range(n):
        total = total + (-1) ** j * ratio**j / (math.factorial(n + j) * math.factorial(n - j - 1))
    return total / hi


@lru_cache(maxsize=None)
def _sigma_rule(power: float, n: int = PIECE_NODES):
    """``int_0^1 sigma**power g(sigma) d sigma``, graded 60 levels toward 0."""
    x, w = interval_nodes(0.0, 1.0, left_power=power, grade_left=60, n=n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _euler_integral(alpha, gap):
    """``int_0^1 (1 - x y)**(alpha-1) (1-y)**(alpha-1) dy`` with ``x = 1 - gap``.

    With ``y = 1 - sigma`` the integrand is
    ``sigma**(alpha-1) (gap + x sigma)**(alpha-1)``; the second factor is
    nearly singular at ``sigma = 0`` when ``gap`` is small, which the graded
    mesh resolves.
    """
    out = np.empty_like(gap)
    diag = gap == 0
    if np.any(diag):
        sig, w = _sigma_rule(2.0 * alpha - 2.0)
        out[diag] = np.sum(w)  # = 1/(2 alpha - 1), integrated rather than assumed
    off = ~diag
    if np.any(off):
        sig, w = _sigma_rule(alpha - 1.0)
        g = gap[off][:, None]
        out[off] = ((g + (1.0 - g) * sig[None, :]) ** (alpha - 1.0)) @ w
    return out


def _oracle(alpha, lo, hi, gap):
    flat_gap = gap.ravel()
    I = _euler_integral(alpha, flat_gap).reshape(gap.shape)
    return I * np.exp(-np.log(hi) - 2.0 * gammaln(alpha))


def kernel_k(spec: KernelSpec | float, s, t):
    """Reproducing kernel ``k_alpha(s, t)`` of the fractional Sobolev space.

    Parameters
    ----------
    spec : KernelSpec or float
        Order and strategy; a bare number selects the hypergeometric route.
    s, t : array_like
        Positive arguments, broadcast together.
    """
    if not isinstance(spec, KernelSpec):
        spec = KernelSpec(spec)
    lo, hi, gap = _pairs(s, t)
    _check_diagonal(spec.alpha, gap)
    route = {
        "hypergeometric": _hypergeometric,
        "integer-sum": _integer_sum,
        "quadrature-oracle": _oracle,
    }[spec.strategy]
    out = route(spec.alpha, lo, hi, gap)
    return float(out) if np.ndim(out) == 0 else out


def kernel_norm(alpha, t):
    """``||k_{alpha,t}|| = 1 / (Gamma(alpha) sqrt((2 alpha - 1) t))``."""
    alpha = as_alpha(alpha)
    if not alpha > 0.5:
        raise DivergenceError("the kernel has infinite norm for alpha <= 1/2")
    t = np.asarray(t, dtype=float)
    out = 1.0 / (gamma_fn(alpha) * np.sqrt((2.0 * alpha - 1.0) * t))
    return float(out) if out.ndim == 0 else out


def green_fn(alpha, t, r):
    """``g_alpha(t, r) = (r - t)_+**(alpha-1) / (r**alpha Gamma(alpha))``."""
    alpha = as_alpha(alpha)
    t, r = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(r, dtype=float))
    gap = np.where(r > t, r - t, 1.0)
    out = np.where(r > t, gap ** (alpha - 1.0) / (r**alpha * gamma_fn(alpha)), 0.0)
    return float(out) if out.ndim == 0 else out


def green_kernel_integral(alpha, s: float, t: float) -> float:
    """``int_0^inf g_alpha(s, r) g_alpha(t, r) dr``, a third route to ``k_alpha``.

    With ``r = M + rho`` the integrand is
    ``rho**(alpha-1) (rho + M - m)**(alpha-1) (M + rho)**(-2 alpha) / Gamma(alpha)**2``.
    """
    alpha = as_alpha(alpha)
    lo, hi = min(s, t), max(s, t)
    gap = hi - lo
    if gap == 0 and not alpha > 0.5:
        raise DivergenceError("the diagonal Green integral diverges for alpha <= 1/2")
    if gap == 0:
        power, second = 2.0 * alpha - 2.0, lambda rho: 1.0
    else:
        power, second = alpha - 1.0, lambda rho: (rho + gap) ** (alpha - 1.0)
    rho, w = halfline_nodes(
        Tail(power=alpha + 1.0 if gap else 2.0 * alpha),
        scale=hi,
        left_power=power,
        grade_left=60,
        n=PIECE_NODES,
    )
    values = second(rho) * (hi + rho) ** (-2.0 * alpha)
    return float(values @ w) / gamma_fn(alpha) ** 2


def weyl_kernel_derivative(alpha, t, u):
    """``W^alpha k_{alpha,t}(u) = (u - t)_+**(alpha-1) / (Gamma(alpha) u**(2 alpha))``."""
    alpha = as_alpha(alpha)
    return green_fn(alpha, t, u) / np.asarray(u, dtype=float) ** alpha


def reproducing_pairing(f: RealFn, alpha, t: float) -> tuple[float, float]:
    """``<f, k_{alpha,t}>`` in the order-alpha Sobolev product, with an error estimate.

    Computes ``int_0^inf W^alpha f(u) W^alpha k_{alpha,t}(u) u**(2 alpha) du``
    with ``W^alpha f`` from finite differences and the kernel side in closed
    form.  Equals ``f(t)`` when ``alpha > 1/2``.
    """
    alpha = as_alpha(alpha)
    if not alpha > 0.5:
        raise DivergenceError("k_alpha lies in the space only for alpha > 1/2")
    if not t > 0:
        raise InvalidArgument("t must be positive")
    d = f.decay
    if isinstance(d, Exponential):
        tail = Tail(rate=d.rate)
    elif isinstance(d, Algebraic) and d.power > 0:
        tail = Tail(power=d.power + alpha)
    else:
        raise InvalidArgument(f"{f.name}: the pairing needs a decaying function")

    values = []
    for n in (PIECE_NODES, COARSE_NODES):
        # u = t + rho; the rule absorbs rho**(alpha-1)
        rho, w = halfline_nodes(
            tail,
            scale=min(t, f.scale),
            left_power=alpha - 1.0,
            grade_left=24,
            breaks=[b - t for b in f.breaks if b > t],
            n=n,
        )
        u = t + rho
        kernel_side = u ** (-2.0 * alpha) / gamma_fn(alpha)
        Wf, err = _weyl_derivative(f, alpha, u)
        weight = kernel_side * u ** (2.0 * alpha) * w
        values.append((float(Wf @ weight), float(err @ np.abs(weight))))
    (value, err), (coarse, _) = values
    return value, err + abs(value - coarse)


def _direct_n(alpha, lo, hi, gap):
    """``int_0^m (t-u)**(alpha-1) (s-u)**(alpha-1) du / Gamma(alpha)**2``.

    With ``u = m y`` this is ``m**alpha M**(alpha-1) I(m/M) / Gamma(alpha)**2``
    where ``I`` is the Euler integral of :func:`_euler_integral`.
    """
    flat = gap.ravel()
    I = _euler_integral(alpha, flat).reshape(gap.shape)
    return np.exp(alpha * np.log(lo) + (alpha - 1.0) * np.log(hi) - 2.0 * gammaln(alpha)) * I


def covariance_n(alpha, t, s, *, route: str = "identity"):
    """Covariance of ``alpha``-times integrated white noise.

    ``route="identity"`` uses ``(ts)**alpha k_alpha(t, s)`` (hypergeometric);
    ``route="direct"`` integrates the defining convolution.
    """
    alpha = as_alpha(alpha)
    lo, hi, gap = _pairs(t, s)
    _check_diagonal(alpha, gap)
    if route == "identity":
        log_ts = np.log(lo) + np.log(hi)
        out = np.exp(alpha * log_ts) * _hypergeometric(alpha, lo, hi, gap)
    elif route == "direct":
        out = _direct_n(alpha, lo, hi, gap)
    else:
        raise InvalidArgument(f"unknown covariance route {route!r}")
    return float(out) if np.ndim(out) == 0 else out


def covariance_b(alpha, t, s, *, route: str = "identity"):
    """Covariance of Riemann-Liouville fractional Brownian motion, ``n_{alpha+1}``."""
    if not float(alpha) >= 0:
        raise InvalidArgument("fractional Brownian order must be nonnegative")
    return covariance_n(float(alpha) + 1.0, t, s, route=route)


# ---------------------------------------------------------------------------
# Gram matrices


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Kernel matrix on a grid with its positive-semidefiniteness certificate."""

    grid: np.ndarray
    entries: np.ndarray
    kernel: object
    jitter: float
    min_eigenvalue: float

    def __post_init__(self):
        G = self.entries
        if not np.allclose(G, G.T, rtol=0, atol=1e-13 * max(1.0, np.abs(G).max())):
            raise ArithmeticError("Gram matrix is not symmetric")
        if self.min_eigenvalue < -1e-10 * np.max(np.diag(G)):
            raise NotPositiveDefinite(
                f"Gram matrix has eigenvalue {self.min_eigenvalue:.3e} below tolerance"
            )


def _grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise InvalidArgument("grid must be a non-empty 1-d sequence")
    if g.size > 10_000:
        raise InvalidArgument("grid has more than 10^4 points")
    if np.any(g <= 0) or np.any(np.diff(g) <= 0):
        raise InvalidArgument("grid must be positive and strictly increasing")
    return g


def _evaluator(kernel):
    """Map a kernel descriptor to ``(callable(s, t), label)``."""
    if isinstance(kernel, KernelSpec):
        return (lambda s, t: kernel_k(kernel, s, t)), kernel
    if isinstance(kernel, tuple) and len(kernel) == 2 and kernel[0] in ("n", "b"):
        kind, alpha = kernel
        fn = covariance_n if kind == "n" else covariance_b
        return (lambda s, t: fn(alpha, s, t)), kernel
    if isinstance(kernel, (int, float)):
        spec = KernelSpec(kernel)
        return (lambda s, t: kernel_k(spec, s, t)), spec
    raise InvalidArgument(f"unsupported kernel descriptor {kernel!r}")


def gram(kernel, grid) -> GramMatrix:
    """Assemble the kernel matrix on ``grid`` from its upper triangle.

    ``kernel`` is a :class:`KernelSpec`, an order (hypergeometric ``k``), or
    ``("n", alpha)`` / ``("b", alpha)`` for the covariances.
    """
    g = _grid(grid)
    fn, label = _evaluator(kernel)
    i, j = np.triu_indices(g.size)
    upper = fn(g[i], g[j])
    G = np.empty((g.size, g.size))
    G[i, j] = upper
    G[j, i] = upper
    _, jitter = cholesky_spd(G)
    min_eig = float(np.linalg.eigvalsh(G)[0]) if g.size <= 2048 else -jitter
    return GramMatrix(g, G, label, jitter, min_eig)
