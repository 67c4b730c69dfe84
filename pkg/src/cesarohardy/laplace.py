"""The right half-plane side: Laplace transforms, Laguerre bases and the kernel K_alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BoundViolation, DomainError, InvalidArgument
from .functions import Algebraic, Compact, Exponential, RealFn, as_alpha
from .operators import (
    cesaro_plus,
    cesaro_plus_fn,
    cesaro_star,
    cesaro_star_fn,
    riemann_liouville_fn,
    _weyl_derivative,
    weyl_integral_fn,
)
from .quadrature import (
    COARSE_NODES,
    PIECE_NODES,
    Tail,
    halfline_nodes,
    interval_nodes,
    unit_jacobi_nodes,
)
from .special import gamma_fn, hyp2f1_kernel, laguerre_fn

__all__ = [
    "HalfPlanePoint",
    "ComplexValue",
    "laplace",
    "laplace_laguerre",
    "laplace_laguerre_alpha",
    "laguerre_alpha_fn",
    "laguerre_alpha_gram",
    "frak_basis",
    "kernel_K",
    "kernel_K_diag",
    "j_integral",
    "BoundReport",
    "estimation_bounds",
    "check_estimation_bounds",
    "probe_lattice",
    "check_intertwining",
    "check_rl_paley_wiener",
    "basis_expansion_partial",
    "plancherel_check",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point ``|z| e^{i theta}`` of the open right half-plane, kept in polar form."""

    modulus: float
    argument: float

    def __post_init__(self):
        if not (self.modulus > 0 and math.isfinite(self.modulus)):
            raise DomainError(f"modulus must be positive and finite, got {self.modulus!r}")
        if not abs(self.argument) < math.pi / 2:
            raise DomainError(f"argument must lie in (-pi/2, pi/2), got {self.argument!r}")

    @classmethod
    def from_complex(cls, z: complex) -> "HalfPlanePoint":
        z = complex(z)
        if not z.real > 0:
            raise DomainError(f"Re z must be positive, got {z!r}")
        return cls(abs(z), math.atan2(z.imag, z.real))

    @property
    def rect(self) -> complex:
        return complex(
            self.modulus * math.cos(self.argument), self.modulus * math.sin(self.argument)
        )

    @property
    def real(self) -> float:
        return self.modulus * math.cos(self.argument)

    def reflect(self) -> "HalfPlanePoint":
        """``1/(4z)``, computed in polar form."""
        return HalfPlanePoint(0.25 / self.modulus, -self.argument)

    def scaled(self, lam: float) -> "HalfPlanePoint":
        return HalfPlanePoint(lam * self.modulus, self.argument)

    def power(self, alpha: float) -> complex:
        """Principal branch ``z**alpha``."""
        r = self.modulus**alpha
        return complex(r * math.cos(alpha * self.argument), r * math.sin(alpha * self.argument))


def _point(z) -> HalfPlanePoint:
    return z if isinstance(z, HalfPlanePoint) else HalfPlanePoint.from_complex(z)


@dataclass(frozen=True)
class ComplexValue:
    """Complex number with an error radius propagated through arithmetic."""

    real: float
    imag: float
    error: float = 0.0

    def __post_init__(self):
        if not self.error >= 0:
            raise InvalidArgument("error radius must be nonnegative")

    @classmethod
    def of(cls, value: complex, error: float = 0.0) -> "ComplexValue":
        value = complex(value)
        return cls(value.real, value.imag, float(error))

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)

    def __abs__(self) -> float:
        return abs(self.value)

    def conjugate(self) -> "ComplexValue":
        return ComplexValue(self.real, -self.imag, self.error)

    def _lift(self, other):
        return other if isinstance(other, ComplexValue) else ComplexValue.of(other)

    def __add__(self, other):
        o = self._lift(other)
        return ComplexValue.of(self.value + o.value, self.error + o.error)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return ComplexValue.of(self.value - o.value, self.error + o.error)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        err = abs(self.value) * o.error + abs(o.value) * self.error + self.error * o.error
        return ComplexValue.of(self.value * o.value, err)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if not abs(o.value) > o.error:
            raise ArithmeticError("division by a value indistinguishable from zero")
        q = self.value / o.value
        err = (self.error + abs(q) * o.error) / (abs(o.value) - o.error)
        return ComplexValue.of(q, err)


# ---------------------------------------------------------------------------
# Laplace transforms


def _laplace_nodes(f: RealFn, z: HalfPlanePoint, n: int):
    d = f.decay
    re = z.real
    if isinstance(d, Exponential):
        tail = Tail(rate=d.rate + re)
    elif isinstance(d, Algebraic):
        tail = Tail(rate=re)
    else:
        tail = Tail(end=d.b)
    scale = min(f.scale, 1.0 / z.modulus)
    im = abs(z.modulus * math.sin(z.argument))
    return halfline_nodes(
        tail,
        scale=scale,
        grade_left=44 if f.singular_at_zero else 4,
        breaks=f.breaks,
        max_width=2.0 / im if im > 0 else None,
        n=n,
    )


def _laplace_raw(f: RealFn, z: HalfPlanePoint, n: int) -> complex:
    t, w = _laplace_nodes(f, z, n)
    zc = z.rect
    return complex((f(t) * np.exp(-zc * t)) @ w)


def laplace(f: RealFn, z) -> ComplexValue:
    """``int_0^inf f(t) e^{-zt} dt`` with an error radius."""
    z = _point(z)
    fine = _laplace_raw(f, z, PIECE_NODES)
    coarse = _laplace_raw(f, z, COARSE_NODES)
    return ComplexValue.of(fine, abs(fine - coarse) + 8 * _EPS * abs(fine))


def laplace_laguerre(m: int, z) -> ComplexValue:
    """Closed form ``2 (2z - 1)**m / (2z + 1)**(m + 1)`` of the Laguerre transform."""
    if int(m) != m or m < 0:
        raise InvalidArgument("Laguerre index must be a nonnegative integer")
    zc = _point(z).rect
    value = 2.0 * (2.0 * zc - 1.0) ** m / (2.0 * zc + 1.0) ** (m + 1)
    return ComplexValue.of(value, 4 * (m + 2) * _EPS * abs(value))


def _laguerre_alpha_raw(m: int, alpha: float, z: HalfPlanePoint, n: int) -> complex:
    # u = 1/x turns (1, inf) into (0, 1); the pole sits at x = -1/(2z)
    grade = 6 + int(math.ceil(math.log2(max(2.0 * z.modulus, 1.0))))
    x, w = unit_jacobi_nodes(alpha, grade_left=min(grade, 60), n=n)
    zc = z.rect
    q = 2.0 * zc * x
    return complex(2.0 / gamma_fn(alpha) * ((((q - 1.0) / (q + 1.0)) ** m / (q + 1.0)) @ w))


def laplace_laguerre_alpha(m: int, alpha, z) -> ComplexValue:
    """Laplace transform of the fractional Laguerre function ``ell_{m,alpha}``.

    ``(2/Gamma(alpha)) int_1^inf (u-1)**(alpha-1) u**-alpha (2z-u)**m/(2z+u)**(m+1) du``,
    evaluated as ``(2/Gamma(alpha)) int_0^1 (1-x)**(alpha-1) (2zx-1)**m/(2zx+1)**(m+1) dx``.
    """
    alpha = as_alpha(alpha)
    z = _point(z)
    fine = _laguerre_alpha_raw(m, alpha, z, PIECE_NODES)
    coarse = _laguerre_alpha_raw(m, alpha, z, COARSE_NODES)
    return ComplexValue.of(fine, abs(fine - coarse) + 16 * _EPS * abs(fine))


def laguerre_alpha_fn(m: int, alpha) -> RealFn:
    """``ell_{m,alpha} = W^-alpha(t**-alpha ell_m)`` by numerical Weyl integration."""
    alpha = as_alpha(alpha)
    base = RealFn(
        lambda t: t**-alpha * laguerre_fn(m, t),
        Exponential(0.5),
        singular_at_zero=True,
        validate=False,
        name=f"t^-{alpha:g}ell_{m}",
    )
    return weyl_integral_fn(base, alpha)


def laguerre_alpha_gram(alpha, size: int = 7) -> np.ndarray:
    """Gram matrix of ``ell_{m,alpha}``, ``m < size``, in the order-alpha Sobolev product.

    Only integer orders are accepted: there ``W^alpha`` is a plain derivative
    of a single Weyl integral, while fractional orders would nest two
    quadratures per node.
    """
    alpha = as_alpha(alpha)
    if not float(alpha).is_integer():
        raise InvalidArgument("the Gram check is implemented for integer orders only")
    if size < 1:
        raise InvalidArgument("size must be positive")
    t, w = halfline_nodes(Tail(rate=1.0), scale=2.0, grade_left=24)
    D = np.array([_weyl_derivative(laguerre_alpha_fn(m, alpha), alpha, t)[0] for m in range(size)])
    return (D * (t ** (2 * alpha) * w)) @ D.T


def _frak_direct(m: int, alpha: float, z: HalfPlanePoint, n: int) -> complex:
    rho, w = halfline_nodes(
        Tail(power=alpha + 1.0), scale=1.0, left_power=alpha - 1.0, grade_left=4, n=n
    )
    u = 1.0 + rho
    q = 2.0 * z.rect * u
    values = u**-alpha * ((q - 1.0) / (q + 1.0)) ** m / (q + 1.0)
    return complex(2.0 / gamma_fn(alpha) * (values @ w))


def frak_basis(m: int, alpha, z, *, route: str = "both") -> ComplexValue:
    """Basis function ``frak L_{m,alpha}(z)`` of the Hardy-Sobolev space.

    ``route="direct"`` integrates over ``u in (1, inf)``; ``route="reflected"``
    uses ``((-1)**m / 2z) L(ell_{m,alpha})(1/(4z))``; ``route="both"`` returns the
    direct value with the discrepancy between the two folded into the error.
    """
    alpha = as_alpha(alpha)
    z = _point(z)
    out = []
    if route in ("direct", "both"):
        fine = _frak_direct(m, alpha, z, PIECE_NODES)
        coarse = _frak_direct(m, alpha, z, COARSE_NODES)
        out.append(ComplexValue.of(fine, abs(fine - coarse) + 16 * _EPS * abs(fine)))
    if route in ("reflected", "both"):
        factor = ComplexValue.of((-1) ** m / (2.0 * z.rect), 4 * _EPS / (2.0 * z.modulus))
        out.append(factor * laplace_laguerre_alpha(m, alpha, z.reflect()))
    if not out:
        raise InvalidArgument(f"unknown route {route!r}")
    if len(out) == 1:
        return out[0]
    direct, reflected = out
    gap = abs(direct.value - reflected.value)
    return ComplexValue.of(direct.value, max(direct.error, gap))


# ---------------------------------------------------------------------------
# the half-plane kernel


@lru_cache(maxsize=None)
def _corner_rule(alpha: float, n: int):
    x, w = unit_jacobi_nodes(alpha, grade_left=44, n=n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _kernel_K_raw(alpha: float, z: complex, w: complex, n: int) -> complex:
    x, wx = _corner_rule(alpha, n)
    denom = np.multiply.outer(x * z, np.ones_like(x)) + np.multiply.outer(
        np.ones_like(x), x * np.conj(w)
    )
    # fixed-order reduction: rows first, then the outer axis
    return complex(wx @ ((1.0 / denom) @ wx)) / gamma_fn(alpha) ** 2


def kernel_K(alpha, z, w) -> ComplexValue:
    """Reproducing kernel of the Hardy-Sobolev space of the half-plane.

    ``K(z, w) = Gamma(alpha)**-2 int_0^1 int_0^1 (1-x)**(alpha-1) (1-y)**(alpha-1)
    / (x z + y conj(w)) dx dy`` by tensor-product graded Gauss-Jacobi.  Near
    the diagonal with ``|arg z|`` close to ``pi/2`` the integrand develops a
    ridge along ``x = y``; use :func:`kernel_K_diag` there.
    """
    alpha = as_alpha(alpha)
    z, w = _point(z).rect, _point(w).rect
    fine = _kernel_K_raw(alpha, z, w, PIECE_NODES)
    coarse = _kernel_K_raw(alpha, z, w, COARSE_NODES)
    return ComplexValue.of(fine, abs(fine - coarse) + 64 * _EPS * abs(fine))


@lru_cache(maxsize=None)
def _diag_inner(alpha: float, n: int):
    """Nodes in ``sigma = 1 - t`` and the inner Euler integral ``I(t)`` there.

    ``I(t) = 2F1(1-alpha, 1; alpha+1; t) / alpha`` behaves like
    ``sigma**(2 alpha - 1)`` when ``alpha < 1/2``; that power is absorbed by
    the Jacobi weight of the first piece.
    """
    power = min(0.0, 2.0 * alpha - 1.0)
    sigma, w = interval_nodes(0.0, 1.0, left_power=power, grade_left=60, n=n)
    inner = hyp2f1_kernel(alpha, None, one_minus_x=sigma) / alpha
    if power:
        inner = inner / sigma**power
    for arr in (sigma, w, inner):
        arr.setflags(write=False)
    return sigma, w, inner


def _kernel_diag_raw(alpha: float, modulus: float, theta: float, n: int) -> float:
    sigma, w, inner = _diag_inner(alpha, n)
    c = math.cos(theta)
    # t**2 + 1 + 2t cos(2 theta) = sigma**2 + 4 (1 - sigma) cos(theta)**2
    ratio = (2.0 - sigma) / (sigma * sigma + 4.0 * (1.0 - sigma) * c * c)
    return 2.0 * c / (gamma_fn(alpha) ** 2 * modulus) * float((inner * ratio) @ w)


def kernel_K_diag(alpha, z, *, full_output: bool = False):
    """Diagonal ``K_alpha(z, z)`` through its one-dimensional real representation."""
    alpha = as_alpha(alpha)
    z = _point(z)
    fine = _kernel_diag_raw(alpha, z.modulus, z.argument, PIECE_NODES)
    if not full_output:
        return fine
    coarse = _kernel_diag_raw(alpha, z.modulus, z.argument, COARSE_NODES)
    return fine, abs(fine - coarse) + 64 * _EPS * abs(fine)


def j_integral(theta):
    """``int_0^1 dt / (t**2 + 1 + 2t cos 2 theta) = |theta| / |sin 2 theta|``, 1/2 at 0."""
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) >= math.pi / 2):
        raise DomainError("angle must lie in (-pi/2, pi/2)")
    # sin(2 theta)/(2 theta) = sinc(2 theta / pi), smooth through 0
    out = 0.5 / np.sinc(2.0 * theta / math.pi)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# norm bounds


@dataclass(frozen=True)
class BoundReport:
    """Sandwich check of ``K_alpha(z, z)`` against its proved bounds."""

    alpha: float
    modulus: float
    theta: float
    value: float
    error: float
    lower: float
    upper: float
    regime: str

    @property
    def passed(self) -> bool:
        slack = self.error + 1e-13 * abs(self.value)
        return self.lower - slack <= self.value <= self.upper + slack


def estimation_bounds(alpha, z) -> tuple[float, float, str]:
    """Lower and upper bounds for ``K_alpha(z, z)`` and the regime label."""
    alpha = as_alpha(alpha)
    z = _point(z)
    g2 = gamma_fn(alpha) ** 2
    if alpha >= 1:
        return 1.0 / ((2 * alpha - 1) * g2 * z.modulus), math.pi / (alpha * g2 * z.modulus), "i"
    if alpha > 0.5:
        return 1.0 / (g2 * z.modulus), math.pi / ((2 * alpha - 1) * g2 * z.modulus), "ii"
    scale = z.modulus if abs(z.argument) <= math.pi / 4 else z.real
    return 1.0 / (g2 * z.modulus), 2.0 / (gamma_fn(alpha + 1.0) ** 2 * scale), "iii"


def check_estimation_bounds(alpha, z, *, strict: bool = False) -> BoundReport:
    """Evaluate ``K_alpha(z, z)`` and compare with the regime's bounds.

    With ``strict=True`` a violation beyond the error radius raises
    :class:`BoundViolation`.
    """
    alpha = as_alpha(alpha)
    z = _point(z)
    value, err = kernel_K_diag(alpha, z, full_output=True)
    lower, upper, regime = estimation_bounds(alpha, z)
    report = BoundReport(alpha, z.modulus, z.argument, value, err, lower, upper, regime)
    if strict and not report.passed:
        raise BoundViolation(f"bound violated: {report}")
    return report


def probe_lattice(
    alphas=(0.3, 0.5, 0.75, 1.0, 2.0),
    moduli=(0.1, 0.5, 1.0, 2.0, 10.0),
    thetas=None,
):
    """Default polar probe lattice: 5 orders x 7 angles x 5 moduli."""
    if thetas is None:
        edge = math.pi / 2 - 1e-3
        thetas = (-edge, -math.pi / 3, -math.pi / 6, 0.0, math.pi / 6, math.pi / 3, edge)
    return [(a, HalfPlanePoint(r, th)) for a in alphas for th in thetas for r in moduli]


# ---------------------------------------------------------------------------
# dual-route identity checks


def _ray_transform(f: RealFn, theta: float) -> RealFn:
    """``r -> L f(r e^{i theta})`` as a complex-valued function of ``r > 0``."""

    def evaluator(r):
        flat = np.ravel(r)
        out = np.array(
            [_laplace_raw(f, HalfPlanePoint(float(ri), theta), PIECE_NODES) for ri in flat]
        )
        return out.reshape(np.shape(r))

    return RealFn(evaluator, Algebraic(1.0), validate=False, name=f"Lf(re^i{theta:g})")


def check_intertwining(f: RealFn, alpha, z, *, part: int = 2) -> float:
    """Residual of the Laplace intertwining of the averaging operators.

    ``part=2``: ``L(C_alpha f)(z)`` against the adjoint average of ``r -> Lf(r e^{i theta})``
    at ``r = |z|``.  ``part=1``: ``L(C*_alpha f)(z)`` against the forward average
    of the same ray function.
    """
    alpha = as_alpha(alpha)
    z = _point(z)
    ray = _ray_transform(f, z.argument)
    if part == 2:
        left = laplace(cesaro_plus_fn(f, alpha), z).value
        right = complex(cesaro_star(ray, alpha, z.modulus))
    elif part == 1:
        left = laplace(cesaro_star_fn(f, alpha), z).value
        right = complex(cesaro_plus(ray, alpha, z.modulus))
    else:
        raise InvalidArgument("part must be 1 or 2")
    return abs(left - right)


def check_rl_paley_wiener(f: RealFn, alpha, z) -> float:
    """Residual ``|L f(z) - z**alpha L(D^-alpha f)(z)|``."""
    alpha = as_alpha(alpha)
    z = _point(z)
    left = laplace(f, z).value
    right = z.power(alpha) * laplace(riemann_liouville_fn(f, alpha), z).value
    return abs(left - right)


def basis_expansion_partial(alpha, z, w, M: int) -> ComplexValue:
    """``sum_{j < M} frak L_j(z) conj(frak L_j(w))``."""
    if int(M) != M or M < 1:
        raise InvalidArgument("M must be a positive integer")
    alpha = as_alpha(alpha)
    total = ComplexValue(0.0, 0.0)
    for j in range(int(M)):
        total = total + frak_basis(j, alpha, z, route="direct") * frak_basis(
            j, alpha, w, route="direct"
        ).conjugate()
    return total


def plancherel_check(f: RealFn, x: float = 1.0, y_max: float = 60.0) -> tuple[float, float]:
    """Both sides of ``(1/2pi) int |Lf(x+iy)|**2 dy = int f(t)**2 e^{-2xt} dt`` for real ``f``.

    The left side uses numerical Laplace transforms on ``0 <= y <= y_max``
    (symmetry in ``y`` covers the rest), so ``|Lf|**2`` must be negligible
    beyond ``y_max``.  The right side is a direct half-line quadrature.
    """
    if not (x > 0 and y_max > 0):
        raise InvalidArgument("x and y_max must be positive")
    edges = np.concatenate([[0.0], np.geomspace(min(1.0, y_max), y_max, 12)])
    edges = np.unique(edges)
    ys, wy = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        y, w = interval_nodes(a, b, n=PIECE_NODES)
        ys.append(y)
        wy.append(w)
    ys, wy = np.concatenate(ys), np.concatenate(wy)
    points = [HalfPlanePoint.from_complex(complex(x, y)) for y in ys]
    values = np.array([abs(_laplace_raw(f, z, PIECE_NODES)) ** 2 for z in points])
    lhs = float(values @ wy) / math.pi

    d = f.decay
    if isinstance(d, Compact):
        tail = Tail(end=d.b)
    elif isinstance(d, Exponential):
        tail = Tail(rate=2.0 * (x + d.rate))
    else:
        tail = Tail(rate=2.0 * x)
    t, w = halfline_nodes(
        tail,
        scale=f.scale,
        grade_left=44 if f.singular_at_zero else 4,
        breaks=f.breaks,
    )
    rhs = float((f(t) ** 2 * np.exp(-2.0 * x * t)) @ w)
    return lhs, rhs
