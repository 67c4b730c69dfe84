"""Scalar functions on (0, inf) with the metadata the integral operators need."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, UnsupportedFunction
from .quadrature import Tail
from .special import laguerre_fn

__all__ = [
    "Compact",
    "Exponential",
    "Algebraic",
    "RealFn",
    "Order",
    "as_alpha",
    "exponential",
    "t_power_exp",
    "gaussian",
    "indicator",
    "zero",
    "constant",
    "identity_fn",
    "laguerre",
    "ENVELOPE_CONSTANT",
]

#: |f(t)| must stay below ENVELOPE_CONSTANT * max(1, peak) * allowance(t) *
#: envelope(t) on the probe grid, where allowance(t) = (1 + t)**16 for
#: exponential decay and (1 + log(1 + t))**2 for algebraic decay.
ENVELOPE_CONSTANT = 1e3

_PROBE = np.geomspace(1e-3, 1e3, 61)


@dataclass(frozen=True)
class Compact:
    """Support contained in ``[a, b]``."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 <= self.a < self.b < math.inf):
            raise InvalidArgument(f"invalid support [{self.a}, {self.b}]")


@dataclass(frozen=True)
class Exponential:
    """``|f(t)| <~ exp(-rate t)`` up to polynomial factors."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise InvalidArgument("exponential decay rate must be positive")


@dataclass(frozen=True)
class Algebraic:
    """``|f(t)| ~ t**-power`` at infinity (``power`` may be negative: growth)."""

    power: float


Decay = Compact | Exponential | Algebraic

SMOOTHNESS = ("smooth", "continuous", "measurable")


@dataclass(frozen=True, eq=False)
class RealFn:
    """A vectorized function of ``t > 0`` with decay and regularity tags.

    Parameters
    ----------
    evaluator : callable
        Maps an array of positive reals to an array of the same shape.
    decay : Compact, Exponential or Algebraic
        Behaviour at infinity; operators refuse functions without it.
    smoothness : {"smooth", "continuous", "measurable"}
    breaks : tuple of float
        Points where the function has a kink or a jump.
    singular_at_zero : bool
        Whether ``f`` is unbounded or non-smooth as ``t -> 0``; quadrature
        grades its meshes toward the origin when set.
    laplace : callable, optional
        Closed-form Laplace transform, used by tests as an oracle.
    name : str
    validate : bool
        Probe the evaluator for finiteness and consistency with ``decay``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    decay: Decay
    smoothness: str = "smooth"
    breaks: tuple = ()
    singular_at_zero: bool = False
    laplace: Optional[Callable[[complex], complex]] = None
    name: str = "f"
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if not isinstance(self.decay, (Compact, Exponential, Algebraic)):
            raise UnsupportedFunction("a RealFn needs decay metadata")
        if self.smoothness not in SMOOTHNESS:
            raise InvalidArgument(f"unknown smoothness tag {self.smoothness!r}")
        breaks = set(float(b) for b in self.breaks if b > 0)
        if isinstance(self.decay, Compact):
            breaks |= {p for p in (self.decay.a, self.decay.b) if p > 0}
        object.__setattr__(self, "breaks", tuple(sorted(breaks)))
        if self.validate:
            self._check_envelope()

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.evaluator(t))
        if not np.iscomplexobj(out):
            out = out.astype(float, copy=False)
        if out.shape != t.shape:
            out = np.broadcast_to(out, t.shape).copy()
        return out[()] if out.ndim == 0 else out

    def _check_envelope(self):
        values = self(_PROBE)
        if not np.all(np.isfinite(values)):
            raise UnsupportedFunction(f"{self.name}: evaluator is not finite on the probe grid")
        peak = max(1.0, float(np.max(np.abs(values))))
        d = self.decay
        if isinstance(d, Compact):
            outside = (_PROBE < d.a) | (_PROBE > d.b)
            if np.any(values[outside] != 0):
                raise UnsupportedFunction(f"{self.name}: nonzero outside declared support")
            return
        if isinstance(d, Exponential):
            # compare in log space; exp(-rate t) underflows on the probe grid
            log_env = -d.rate * _PROBE + 16 * np.log1p(_PROBE)
        else:
            log_env = -d.power * np.log1p(_PROBE) + 2 * np.log1p(np.log1p(_PROBE))
        with np.errstate(divide="ignore"):
            log_f = np.log(np.abs(values))
        if np.any(log_f > math.log(ENVELOPE_CONSTANT * peak) + log_env):
            raise UnsupportedFunction(f"{self.name}: values exceed the declared decay envelope")

    # ------------------------------------------------------------------
    @property
    def tail(self) -> Tail:
        """Tail descriptor for half-line quadrature of ``f`` itself."""
        d = self.decay
        if isinstance(d, Compact):
            return Tail(end=d.b)
        if isinstance(d, Exponential):
            return Tail(rate=d.rate)
        return Tail(power=d.power)

    @property
    def scale(self) -> float:
        """Length over which ``f`` changes appreciably near its support."""
        d = self.decay
        if isinstance(d, Exponential):
            return 1.0 / d.rate
        if isinstance(d, Compact):
            return d.b
        return 1.0

    def derived(self, evaluator, decay, **kwargs) -> "RealFn":
        """A function computed from this one, inheriting breaks and flags."""
        kwargs.setdefault("smoothness", self.smoothness)
        kwargs.setdefault("breaks", self.breaks)
        kwargs.setdefault("singular_at_zero", self.singular_at_zero)
        kwargs.setdefault("validate", False)
        return RealFn(evaluator, decay, **kwargs)


@dataclass(frozen=True)
class Order:
    """Fractional order ``alpha > 0`` and ``n = floor(alpha) + 1``."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise InvalidArgument(f"order must be a positive finite real, got {self.alpha!r}")

    @property
    def n(self) -> int:
        return math.floor(self.alpha) + 1

    @property
    def is_integer(self) -> bool:
        return float(self.alpha).is_integer()


def as_alpha(alpha) -> float:
    """Accept an :class:`Order` or a number and return a validated float."""
    return Order(alpha.alpha if isinstance(alpha, Order) else float(alpha)).alpha


# ---------------------------------------------------------------------------
# test family


def exponential(rate: float = 1.0) -> RealFn:
    """``exp(-rate t)``."""
    return RealFn(
        lambda t: np.exp(-rate * t),
        Exponential(rate),
        laplace=lambda z: 1.0 / (z + rate),
        name=f"exp(-{rate:g}t)",
    )


def t_power_exp(k: float, rate: float = 1.0) -> RealFn:
    """``t**k exp(-rate t)`` for ``k >= 0``."""
    if k < 0:
        raise InvalidArgument("power must be nonnegative")
    return RealFn(
        lambda t: t**k * np.exp(-rate * t),
        Exponential(rate),
        singular_at_zero=not float(k).is_integer(),
        laplace=lambda z: math.gamma(k + 1) / (z + rate) ** (k + 1),
        name=f"t^{k:g}exp(-{rate:g}t)",
    )


def gaussian() -> RealFn:
    """``exp(-t**2)``; decays faster than any exponential."""
    return RealFn(lambda t: np.exp(-t * t), Exponential(4.0), name="exp(-t^2)")


def indicator(a: float, b: float) -> RealFn:
    """Indicator of ``(a, b)``."""
    return RealFn(
        lambda t: ((t > a) & (t < b)).astype(float),
        Compact(a, b),
        smoothness="measurable",
        laplace=lambda z: (np.exp(-a * z) - np.exp(-b * z)) / z,
        name=f"1({a:g},{b:g})",
    )


def zero() -> RealFn:
    return RealFn(lambda t: np.zeros_like(t), Exponential(1.0), laplace=lambda z: 0.0, name="0")


def constant(c: float = 1.0) -> RealFn:
    """A constant; only local operators (averages, Riemann-Liouville) accept it."""
    return RealFn(lambda t: np.full_like(t, c), Algebraic(0.0), name=f"{c:g}")


def identity_fn() -> RealFn:
    return RealFn(lambda t: t, Algebraic(-1.0), name="t")


def laguerre(m: int) -> RealFn:
    """Orthonormal Laguerre function ``ell_m``."""
    return RealFn(
        lambda t: laguerre_fn(m, t),
        Exponential(0.5),
        laplace=lambda z: 2.0 * (2.0 * z - 1.0) ** m / (2.0 * z + 1.0) ** (m + 1),
        name=f"ell_{m}",
    )
