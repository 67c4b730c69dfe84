"""Fractional operators on the half-line.

All operators take a :class:`~cesarohardy.functions.RealFn`, an order and an
array of evaluation points.  ``full_output=True`` returns ``(value, error)``
where the error compares the fine composite rule with a coarse one (and, for
Weyl derivatives, two Richardson levels).  The ``*_fn`` variants wrap an
operator as a new :class:`RealFn` so operators can be composed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidArgument, UnsupportedFunction
from .functions import Algebraic, Compact, Exponential, RealFn, as_alpha
from .quadrature import (
    COARSE_NODES,
    PIECE_NODES,
    Tail,
    halfline_nodes,
    unit_jacobi_nodes,
    with_error,
)
from .special import gamma_fn

__all__ = [
    "cesaro_plus",
    "cesaro_plus_fn",
    "cesaro_star",
    "cesaro_star_fn",
    "cesaro_star_subordinated",
    "weyl_integral",
    "weyl_integral_fn",
    "weyl_derivative",
    "weyl_derivative_fn",
    "weyl_scale_identity_check",
    "riemann_liouville_integral",
    "riemann_liouville_fn",
    "theta_isometry",
    "integrate_halfline",
    "l2_inner",
    "l2_norm",
    "sobolev_norm",
    "SobolevNormResult",
    "sobolev_inner",
    "hardy_constant",
    "pointwise_constant",
]

#: Grading depth toward the origin for integrands that are singular there.
DEEP = 44


def _points(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError("evaluation points must be positive and finite")
    return np.atleast_1d(arr), arr.ndim == 0


def _shape(out, scalar):
    return out[0] if scalar else out


def _run(compute, t, full_output):
    """Evaluate ``compute(t_array, n)``; optionally with an error estimate."""
    arr, scalar = _points(t)
    if full_output:
        value, err = with_error(lambda n: compute(arr, n))
        return _shape(value, scalar), _shape(err, scalar)
    return _shape(compute(arr, PIECE_NODES), scalar)


def _levels(ratio: float) -> int:
    """Number of halvings needed to resolve a feature ``ratio`` times smaller."""
    return int(min(60, max(0, math.ceil(math.log2(max(ratio, 1.0))))))


def _evaluate_outer(f: RealFn, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    return f(np.multiply.outer(t, x))


# ---------------------------------------------------------------------------
# Cesaro-Hardy operators


def _unit_average(f: RealFn, alpha: float, t: np.ndarray, n: int) -> np.ndarray:
    """``alpha * int_0^1 (1-x)**(alpha-1) f(t x) dx`` for every ``t``."""
    grade = DEEP if f.singular_at_zero else 6 + _levels(t.max() / f.scale)
    if f.breaks:
        out = np.empty(t.shape, dtype=np.result_type(f(t[:1]), float))
        for i, ti in enumerate(t):
            x, w = unit_jacobi_nodes(
                alpha, breaks=[b / ti for b in f.breaks], grade_left=grade, n=n
            )
            out[i] = f(ti * x) @ w
        return alpha * out
    x, w = unit_jacobi_nodes(alpha, grade_left=grade, n=n)
    return alpha * (_evaluate_outer(f, t, x) @ w)


def cesaro_plus(f: RealFn, alpha, t, *, full_output: bool = False):
    """Averaging operator ``(alpha / t**alpha) int_0^t (t-u)**(alpha-1) f(u) du``.

    Evaluated as ``alpha int_0^1 (1-x)**(alpha-1) f(t x) dx`` with the
    endpoint weight absorbed by Gauss-Jacobi.
    """
    alpha = as_alpha(alpha)
    return _run(lambda arr, n: _unit_average(f, alpha, arr, n), t, full_output)


def cesaro_plus_fn(f: RealFn, alpha) -> RealFn:
    alpha = as_alpha(alpha)
    return f.derived(
        lambda t: _unit_average(f, alpha, np.ravel(t), PIECE_NODES).reshape(np.shape(t)),
        Algebraic(1.0),
        name=f"C_{alpha:g}[{f.name}]",
    )


def _star_rule(f: RealFn, alpha: float, tmin: float, tmax: float, n: int, breaks=()):
    """Rule for ``int_0^1 (1-x)**(alpha-1) g(x) dx`` where ``g(x) = f(t/x)/x``."""
    d = f.decay
    if isinstance(d, Exponential):
        grade = 4 + _levels(64.0 / (d.rate * tmin))
        right = _levels(d.rate * tmax)
    elif isinstance(d, Algebraic):
        if not d.power > 0:
            raise UnsupportedFunction(f"{f.name}: adjoint average needs decay at infinity")
        grade = min(60, math.ceil(48.0 / d.power))
        right = 0
    else:
        grade, right = 8, 0
    return unit_jacobi_nodes(alpha, breaks=breaks, grade_left=grade, grade_right=right, n=n)


def _star_values(f: RealFn, alpha: float, t: np.ndarray, n: int) -> np.ndarray:
    d = f.decay
    if isinstance(d, Compact) or f.breaks:
        out = np.zeros(t.shape, dtype=np.result_type(f(t[:1]), float))
        for i, ti in enumerate(t):
            if isinstance(d, Compact) and ti >= d.b:
                continue
            x, w = _star_rule(f, alpha, ti, ti, n, breaks=[ti / b for b in f.breaks if b > ti])
            out[i] = (f(ti / x) / x) @ w
        return alpha * out
    x, w = _star_rule(f, alpha, t.min(), t.max(), n)
    return alpha * ((_evaluate_outer(f, t, 1.0 / x) / x) @ w)


def cesaro_star(f: RealFn, alpha, t, *, full_output: bool = False):
    """Adjoint average ``alpha int_t^inf (u-t)**(alpha-1) u**-alpha f(u) du``.

    The substitution ``u = t/x`` gives
    ``alpha int_0^1 (1-x)**(alpha-1) x**-1 f(t/x) dx``.
    """
    alpha = as_alpha(alpha)
    return _run(lambda arr, n: _star_values(f, alpha, arr, n), t, full_output)


def cesaro_star_fn(f: RealFn, alpha) -> RealFn:
    alpha = as_alpha(alpha)
    d = f.decay
    decay = Exponential(d.rate) if isinstance(d, Exponential) else (
        Compact(0.0, d.b) if isinstance(d, Compact) else Algebraic(d.power)
    )
    return f.derived(
        lambda t: _star_values(f, alpha, np.ravel(t), PIECE_NODES).reshape(np.shape(t)),
        decay,
        singular_at_zero=True,
        breaks=f.breaks,
        name=f"C*_{alpha:g}[{f.name}]",
    )


def _subordinated_one(f: RealFn, alpha: float, t: float, n: int):
    d = f.decay
    if isinstance(d, Exponential):
        lam = d.rate * t
        end = math.log1p(48.0 / lam)
    elif isinstance(d, Algebraic):
        if not d.power > 0:
            raise UnsupportedFunction(f"{f.name}: adjoint average needs decay at infinity")
        end = 48.0 / d.power
    else:
        if t >= d.b:
            return 0.0
        end = math.log(d.b / t)
    breaks = [math.log(b / t) for b in f.breaks if b > t]
    breaks = [s for s in breaks if s < end]
    sigma, w = halfline_nodes(
        Tail(end=end),
        scale=min(1.0, end / 8.0),
        left_power=alpha - 1.0,
        breaks=breaks,
        max_width=max(end / 16.0, 1e-300),
        n=n,
    )
    # alpha (1 - e^-s)^(alpha-1) = alpha s^(alpha-1) ((1 - e^-s)/s)^(alpha-1)
    ratio = -np.expm1(-sigma) / sigma
    return alpha * (ratio ** (alpha - 1.0) * f(np.exp(sigma) * t)) @ w


def cesaro_star_subordinated(f: RealFn, alpha, t, *, full_output: bool = False):
    """Adjoint average as a superposition of dilations.

    ``int_0^inf alpha (1 - e^-s)**(alpha-1) f(e^s t) ds``; the same operator
    as :func:`cesaro_star` reached through the dilation group instead of a
    direct substitution.
    """
    alpha = as_alpha(alpha)

    def compute(arr, n):
        return np.array([_subordinated_one(f, alpha, float(ti), n) for ti in arr])

    return _run(compute, t, full_output)


# ---------------------------------------------------------------------------
# Weyl fractional integrals and derivatives


def _weyl_nodes(g: RealFn, alpha: float, tmin: float, n: int):
    d = g.decay
    grade = 2 + (_levels(g.scale / tmin) + 4 if g.singular_at_zero else 0)
    if isinstance(d, Exponential):
        tail = Tail(rate=d.rate)
    else:
        if not d.power > alpha:
            raise UnsupportedFunction(
                f"{g.name}: decay t^-{d.power:g} too slow for a Weyl integral of order {alpha:g}"
            )
        tail = Tail(power=d.power)
    return halfline_nodes(
        tail, scale=g.scale, left_power=alpha - 1.0, grade_left=grade, n=n
    )


def _weyl_values(g: RealFn, alpha: float, t: np.ndarray, n: int) -> np.ndarray:
    d = g.decay
    if isinstance(d, Compact) or g.breaks:
        out = np.zeros(t.shape, dtype=np.result_type(g(t[:1]), float))
        for i, ti in enumerate(t):
            if isinstance(d, Compact):
                if ti >= d.b:
                    continue
                tail = Tail(end=d.b - ti)
                scale = d.b - ti
            else:
                tail = Tail(rate=d.rate) if isinstance(d, Exponential) else Tail(power=d.power)
                scale = g.scale
            r, w = halfline_nodes(
                tail,
                scale=scale,
                left_power=alpha - 1.0,
                grade_left=2,
                breaks=[b - ti for b in g.breaks if b > ti],
                n=n,
            )
            out[i] = g(ti + r) @ w
        return out / gamma_fn(alpha)
    r, w = _weyl_nodes(g, alpha, t.min(), n)
    return (g(np.add.outer(t, r)) @ w) / gamma_fn(alpha)


def weyl_integral(g: RealFn, alpha, t, *, full_output: bool = False):
    """Weyl fractional integral ``(1/Gamma(alpha)) int_t^inf (s-t)**(alpha-1) g(s) ds``."""
    alpha = as_alpha(alpha)
    return _run(lambda arr, n: _weyl_values(g, alpha, arr, n), t, full_output)


def weyl_integral_fn(g: RealFn, alpha) -> RealFn:
    alpha = as_alpha(alpha)
    d = g.decay
    if isinstance(d, Exponential):
        decay = d
    elif isinstance(d, Compact):
        decay = Compact(0.0, d.b)
    else:
        decay = Algebraic(d.power - alpha)
    return g.derived(
        lambda t: _weyl_values(g, alpha, np.ravel(t), PIECE_NODES).reshape(np.shape(t)),
        decay,
        breaks=g.breaks,
        name=f"W^-{alpha:g}[{g.name}]",
    )


@lru_cache(maxsize=None)
def _central_stencil(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Second-order central stencil for the ``order``-th derivative."""
    p = (order + 1) // 2
    offsets = np.arange(-p, p + 1, dtype=float)
    V = np.vander(offsets, increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    coef = np.linalg.solve(V, rhs)
    coef.setflags(write=False)
    offsets.setflags(write=False)
    return offsets, coef


def _step(t: np.ndarray, order: int, relative: bool = False) -> np.ndarray:
    """Base step ``max(1e-4, 1e-3 t)``, widened for higher orders, kept inside (0, inf).

    ``relative=True`` drops the absolute floor, for functions that vary on
    the scale ``t`` itself near the origin.
    """
    offsets, _ = _central_stencil(order)
    floor = 0.0 if relative else 1e-4
    h = np.maximum(floor, 1e-3 * t) * 10.0 ** ((order - 1) / 2.0)
    return np.minimum(h, t / (2.0 * offsets[-1]))


def _weyl_derivative(f: RealFn, alpha: float, t: np.ndarray):
    if f.smoothness != "smooth":
        raise UnsupportedFunction(f"{f.name}: Weyl derivatives need a smooth function")
    if float(alpha).is_integer():
        order = int(alpha)
        h_fn = f
    else:
        order = math.floor(alpha) + 1
        h_fn = weyl_integral_fn(f, order - alpha)
    offsets, coef = _central_stencil(order)
    base = _step(t, order, relative=h_fn.singular_at_zero)
    steps = np.stack([base, base / 2.0, base / 4.0])
    points = t[None, :, None] + steps[:, :, None] * offsets[None, None, :]
    values = h_fn(points)
    D = (values @ coef) / steps**order
    first = (4.0 * D[1] - D[0]) / 3.0
    second = (4.0 * D[2] - D[1]) / 3.0
    sign = -1.0 if order % 2 else 1.0
    eps = np.finfo(float).eps
    noise = 64 * eps * np.max(np.abs(values), axis=(0, 2)) * np.abs(coef).sum() / steps[2] ** order
    return sign * first, np.abs(first - second) + noise


def weyl_derivative(f: RealFn, alpha, t, *, full_output: bool = False):
    """Weyl fractional derivative ``(-1)**n d^n/dt^n W^-(n-alpha) f``.

    ``n = floor(alpha) + 1`` for fractional ``alpha`` and ``n = alpha`` for
    integers.  The derivative is a central difference with Richardson
    extrapolation from steps ``h`` and ``h/2``; a third level ``h/4`` feeds
    the error estimate.
    """
    alpha = as_alpha(alpha)
    arr, scalar = _points(t)
    value, err = _weyl_derivative(f, alpha, arr)
    if full_output:
        return _shape(value, scalar), _shape(err, scalar)
    return _shape(value, scalar)


def weyl_derivative_fn(f: RealFn, alpha) -> RealFn:
    alpha = as_alpha(alpha)
    d = f.decay
    decay = Algebraic(d.power + alpha) if isinstance(d, Algebraic) else d
    return f.derived(
        lambda t: _weyl_derivative(f, alpha, np.ravel(t))[0].reshape(np.shape(t)),
        decay,
        name=f"W^{alpha:g}[{f.name}]",
    )


def weyl_scale_identity_check(f: RealFn, alpha, beta, t) -> float:
    """Residual of ``W^alpha f = W^-(beta-alpha) W^beta f`` at ``t``."""
    alpha, beta = as_alpha(alpha), as_alpha(beta)
    if not beta > alpha:
        raise InvalidArgument("the identity needs beta > alpha")
    left = weyl_derivative(f, alpha, t)
    right = weyl_integral(weyl_derivative_fn(f, beta), beta - alpha, t)
    return float(np.max(np.abs(left - right)))


# ---------------------------------------------------------------------------
# Riemann-Liouville side


def riemann_liouville_integral(f: RealFn, alpha, x, *, full_output: bool = False):
    """``(1/Gamma(alpha)) int_0^x (x-y)**(alpha-1) f(y) dy`` via ``y = x u``."""
    alpha = as_alpha(alpha)

    def compute(arr, n):
        return arr**alpha * _unit_average(f, alpha, arr, n) / gamma_fn(alpha + 1.0)

    return _run(compute, x, full_output)


def riemann_liouville_fn(f: RealFn, alpha) -> RealFn:
    alpha = as_alpha(alpha)
    return f.derived(
        lambda x: riemann_liouville_integral(f, alpha, np.ravel(x)).reshape(np.shape(x)),
        Algebraic(1.0 - alpha),
        singular_at_zero=f.singular_at_zero or not float(alpha).is_integer(),
        name=f"D^-{alpha:g}[{f.name}]",
    )


def theta_isometry(f: RealFn, alpha, *, order_at_zero: float = 0.0) -> RealFn:
    """``x**(alpha-1) f(1/x)``, an involution exchanging the two half-line pictures.

    The decay of the result at infinity mirrors ``f`` near the origin, which
    ``RealFn`` does not record: pass ``order_at_zero = k`` when
    ``f(y) = O(y**k)`` as ``y -> 0`` (``k = alpha`` for a Riemann-Liouville
    integral of a bounded function).
    """
    alpha = as_alpha(alpha)
    d = f.decay
    if isinstance(d, Compact) and d.a > 0:
        decay = Compact(1.0 / d.b, 1.0 / d.a)
    else:
        decay = Algebraic(1.0 - alpha + order_at_zero)

    def evaluator(x):
        with np.errstate(over="ignore", divide="ignore"):
            return x ** (alpha - 1.0) * f(1.0 / x)

    return f.derived(
        evaluator,
        decay,
        breaks=tuple(1.0 / b for b in f.breaks),
        singular_at_zero=True,
        name=f"Theta_{alpha:g}[{f.name}]",
    )


# ---------------------------------------------------------------------------
# integrals and norms


def _halfline(f_values, tail: Tail, *, scale, breaks, singular, n, left_power=0.0):
    nodes, weights = halfline_nodes(
        tail,
        scale=scale,
        left_power=left_power,
        grade_left=DEEP if singular else 4,
        breaks=breaks,
        n=n,
    )
    return f_values(nodes) @ weights


def integrate_halfline(f: RealFn, decay_rate: float | None = None, rule_size: int = PIECE_NODES):
    """``int_0^inf f`` with an error estimate, returned as ``(value, error)``.

    ``decay_rate`` overrides the metadata with an exponential tail bound.
    """
    if decay_rate is not None:
        tail = Tail(rate=decay_rate)
    else:
        tail = f.tail
        if tail.power is not None and not tail.power > 1.0:
            raise UnsupportedFunction(f"{f.name}: t^-{tail.power:g} is not integrable at infinity")
    fine = _halfline(f, tail, scale=f.scale, breaks=f.breaks, singular=f.singular_at_zero, n=rule_size)
    coarse = _halfline(
        f, tail, scale=f.scale, breaks=f.breaks, singular=f.singular_at_zero,
        n=max(1, min(COARSE_NODES, rule_size // 2)),
    )
    return fine, float(np.abs(fine - coarse) + 8 * np.finfo(float).eps * np.abs(fine))


def _square_tail(f: RealFn, g: RealFn | None = None) -> Tail:
    tails = [f.tail] + ([g.tail] if g is not None else [f.tail])
    ends = [tl.end for tl in tails if tl.end is not None]
    if ends:
        return Tail(end=min(ends))
    rates = [tl.rate for tl in tails if tl.rate is not None]
    powers = [tl.power for tl in tails if tl.power is not None]
    if len(rates) == 2:
        return Tail(rate=sum(rates))
    if rates:
        return Tail(rate=rates[0])
    return Tail(power=sum(powers))


def l2_inner(f: RealFn, g: RealFn, weight_power: float = 0.0):
    """``int_0^inf f conj(g) t**weight_power dt`` with an error estimate."""
    tail = _square_tail(f, g)
    if tail.power is not None:
        tail = Tail(power=tail.power - weight_power)
    breaks = tuple(sorted(set(f.breaks) | set(g.breaks)))
    singular = f.singular_at_zero or g.singular_at_zero or weight_power != 0

    def values(t):
        out = f(t) * np.conj(g(t))
        return out * t**weight_power if weight_power else out

    scale = min(f.scale, g.scale)
    fine = _halfline(values, tail, scale=scale, breaks=breaks, singular=singular, n=PIECE_NODES)
    coarse = _halfline(values, tail, scale=scale, breaks=breaks, singular=singular, n=COARSE_NODES)
    return fine, float(np.abs(fine - coarse) + 8 * np.finfo(float).eps * np.abs(fine))


def l2_norm(f: RealFn, weight_power: float = 0.0):
    """``(int |f|**2 t**weight_power)**(1/2)`` with an error estimate."""
    sq, err = l2_inner(f, f, weight_power)
    value = math.sqrt(max(float(np.real(sq)), 0.0))
    return value, (err / (2 * value) if value > 0 else math.sqrt(err))


@dataclass(frozen=True)
class SobolevNormResult:
    """Norm ``(int |t**alpha W^alpha f|**2)**(1/2)`` and its error bound."""

    value: float
    quadrature_error: float

    def __post_init__(self):
        if self.value < 0 or self.quadrature_error < 0:
            raise InvalidArgument("norm and error must be nonnegative")


def _sobolev_tail(f: RealFn) -> Tail:
    d = f.decay
    if isinstance(d, Exponential):
        return Tail(rate=2.0 * d.rate)
    if isinstance(d, Algebraic):
        return Tail(power=2.0 * d.power)
    raise UnsupportedFunction(f"{f.name}: Sobolev norms need a smooth decaying function")


def sobolev_norm(f: RealFn, alpha) -> SobolevNormResult:
    """Fractional Sobolev norm of order ``alpha`` on the half-line."""
    alpha = as_alpha(alpha)
    tail = _sobolev_tail(f)
    results = []
    for n in (PIECE_NODES, COARSE_NODES):
        t, w = halfline_nodes(tail, scale=f.scale, grade_left=24, n=n)
        W, W_err = _weyl_derivative(f, alpha, t)
        integrand = np.abs(t**alpha * W) ** 2
        sq = float(integrand @ w)
        # first-order propagation of the pointwise derivative errors
        sq_err = float((2.0 * t ** (2 * alpha) * np.abs(W) * W_err) @ w)
        results.append((sq, sq_err))
    (sq, sq_err), (coarse, _) = results
    value = math.sqrt(max(sq, 0.0))
    total = sq_err + abs(sq - coarse)
    err = total / (2 * value) if value > total else math.sqrt(total)
    return SobolevNormResult(value, err)


def sobolev_inner(f: RealFn, g: RealFn, alpha) -> tuple[float, float]:
    """``int t**(2 alpha) W^alpha f W^alpha g dt`` and an error estimate."""
    alpha = as_alpha(alpha)
    tf, tg = _sobolev_tail(f), _sobolev_tail(g)
    if tf.rate is not None and tg.rate is not None:
        tail = Tail(rate=0.5 * (tf.rate + tg.rate))
    elif tf.rate is not None or tg.rate is not None:
        tail = Tail(power=0.5 * (tg.power if tf.rate is not None else tf.power))
    else:
        tail = Tail(power=0.5 * (tf.power + tg.power))
    scale = min(f.scale, g.scale)
    out = []
    for n in (PIECE_NODES, COARSE_NODES):
        t, w = halfline_nodes(tail, scale=scale, grade_left=24, n=n)
        Wf, ef = _weyl_derivative(f, alpha, t)
        Wg, eg = _weyl_derivative(g, alpha, t)
        weight = t ** (2 * alpha) * w
        value = float((Wf * np.conj(Wg)).real @ weight)
        err = float((np.abs(Wf) * eg + np.abs(Wg) * ef) @ weight)
        out.append((value, err))
    (value, err), (coarse, _) = out
    return value, err + abs(value - coarse)


def hardy_constant(alpha, r: float = 2.0) -> float:
    """Norm bound ``Gamma(alpha+1) Gamma(1/r) / Gamma(alpha + 1/r)`` of the adjoint average on L_r."""
    alpha = as_alpha(alpha)
    return gamma_fn(alpha + 1.0) * gamma_fn(1.0 / r) / gamma_fn(alpha + 1.0 / r)


def pointwise_constant(alpha, beta) -> float:
    """Best constant ``C`` in ``|W^alpha f(t)| <= C t**-(alpha+1/2) ||f||_{2,(beta)}``.

    From Cauchy-Schwarz applied to ``W^alpha f = W^-(beta-alpha) W^beta f``;
    finite when ``beta > alpha + 1/2``.
    """
    alpha, beta = as_alpha(alpha), as_alpha(beta)
    gap = beta - alpha
    if not gap > 0.5:
        raise InvalidArgument("the pointwise bound needs beta > alpha + 1/2")
    from .special import beta_fn

    return math.sqrt(beta_fn(2.0 * gap - 1.0, 2.0 * alpha + 1.0)) / gamma_fn(gap)
