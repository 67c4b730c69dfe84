"""Gauss rules and the composite (graded) rules built from them.

Every integral in the package is a dot product between function values at
the nodes of a :class:`QuadRule` and its weights.  Base rules come from
Gauss-Legendre and Gauss-Jacobi; composite rules glue scaled copies of them
onto geometrically graded partitions so that algebraic or logarithmic
endpoint behaviour, near-singular poles and kinks at breakpoints all see a
locally smooth integrand.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import betaln, roots_jacobi, roots_legendre

from .errors import InvalidArgument, UnsupportedFunction

#: Nodes per composite piece.  Pieces are at most a factor two from the
#: nearest singularity, so 16 points give errors far below 1e-14.
PIECE_NODES = 16

#: Coarse companion used for a-posteriori error estimates.
COARSE_NODES = 8

#: Default tail cut-off for exponentially decaying integrands: e^-48 ~ 1e-21.
EXP_TAIL = 48.0

#: Polynomial factor tolerated on top of the exponential decay, (1 + r)**16.
TAIL_POLY = 16.0

DOMAINS = ("unit-interval", "jacobi", "half-line", "interval")


@dataclass(frozen=True, eq=False)
class QuadRule:
    """Nodes and positive weights with a domain tag.

    ``domain`` is one of ``"unit-interval"`` (plain weight on [0, 1]),
    ``"jacobi"`` (weight ``(1 - x)**(alpha - 1)`` on [0, 1]),
    ``"interval"`` (a composite rule on a finite interval) or
    ``"half-line"`` (a composite rule on (0, inf)).
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: str
    alpha: float | None = None
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        weights = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise InvalidArgument("nodes and weights must be non-empty 1-d arrays of equal size")
        if self.domain not in DOMAINS:
            raise InvalidArgument(f"unknown domain tag {self.domain!r}")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgument("quadrature nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise InvalidArgument("quadrature weights must be positive")
        if nodes[0] <= self.lower or nodes[-1] >= self.upper:
            raise InvalidArgument("quadrature nodes must lie inside the domain")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values) -> np.ndarray:
        """Contract ``values`` (last axis aligned with the nodes) with the weights."""
        return np.asarray(values) @ self.weights

    def __call__(self, fn: Callable[[np.ndarray], np.ndarray]):
        return self.integrate(fn(self.nodes))


# ---------------------------------------------------------------------------
# base rules on [0, 1]


@functools.lru_cache(maxsize=None)
def _legendre01(n: int) -> tuple[np.ndarray, np.ndarray]:
    xi, wi = roots_legendre(n)
    x, w = 0.5 * (xi + 1.0), 0.5 * wi
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@functools.lru_cache(maxsize=None)
def _jacobi01(n: int, left: float, right: float) -> tuple[np.ndarray, np.ndarray]:
    """Rule for the weight ``x**left * (1 - x)**right`` on [0, 1]."""
    if left == 0.0 and right == 0.0:
        return _legendre01(n)
    xi, wi = roots_jacobi(n, right, left)
    x = 0.5 * (xi + 1.0)
    w = wi / 2.0 ** (left + right + 1.0)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _check_exactness(rule: QuadRule, degree: int, moment: Callable[[int], float], rtol: float):
    for k in range(degree + 1):
        approx = float(np.sum(rule.weights * rule.nodes**k))
        exact = moment(k)
        if abs(approx - exact) > rtol * abs(exact):
            raise ArithmeticError(
                f"quadrature rule fails exactness for x^{k}: {approx!r} vs {exact!r}"
            )


def gauss_legendre(n: int) -> QuadRule:
    """n-point Gauss-Legendre rule on [0, 1], exact up to degree 2n - 1."""
    if int(n) != n or n < 1:
        raise InvalidArgument(f"rule size must be a positive integer, got {n!r}")
    x, w = _legendre01(int(n))
    rule = QuadRule(x, w, "unit-interval")
    _check_exactness(rule, 2 * int(n) - 1, lambda k: 1.0 / (k + 1), 1e-12)
    return rule


def gauss_jacobi_endpoint(n: int, alpha: float) -> QuadRule:
    """n-point rule for the weight ``(1 - x)**(alpha - 1)`` on [0, 1].

    ``sum(w * f(x))`` approximates ``int_0^1 (1-x)**(alpha-1) f(x) dx`` and
    is exact for polynomials of degree at most 2n - 1.
    """
    if int(n) != n or n < 1:
        raise InvalidArgument(f"rule size must be a positive integer, got {n!r}")
    if not alpha > 0:
        raise InvalidArgument(f"alpha must be positive, got {alpha!r}")
    x, w = _jacobi01(int(n), 0.0, float(alpha) - 1.0)
    rule = QuadRule(x, w, "jacobi", alpha=float(alpha))
    _check_exactness(
        rule, 2 * int(n) - 1, lambda k: math.exp(betaln(k + 1.0, alpha)), 1e-12
    )
    return rule


# ---------------------------------------------------------------------------
# composite rules


def _graded_edges(a: float, b: float, grade_left: int, grade_right: int) -> np.ndarray:
    """Piece boundaries on [a, b], halving toward the graded ends."""
    if grade_left and grade_right:
        m = 0.5 * (a + b)
        left = a + (m - a) * 2.0 ** -np.arange(grade_left, -1, -1.0)
        right = b - (b - m) * 2.0 ** -np.arange(1.0, grade_right + 1)
        return np.concatenate(([a], left, right, [b]))
    if grade_left:
        return np.concatenate(([a], a + (b - a) * 2.0 ** -np.arange(grade_left, -1, -1.0)))
    if grade_right:
        return np.concatenate(([a], b - (b - a) * 2.0 ** -np.arange(1.0, grade_right + 1), [b]))
    return np.array([a, b], dtype=float)


def interval_nodes(
    a: float,
    b: float,
    *,
    left_power: float = 0.0,
    right_power: float = 0.0,
    grade_left: int = 0,
    grade_right: int = 0,
    n: int = PIECE_NODES,
) -> tuple[np.ndarray, np.ndarray]:
    """Composite nodes/weights for ``int_a^b (x-a)**lp (b-x)**rp F(x) dx``.

    The weight factors are absorbed by Gauss-Jacobi on the pieces touching
    the corresponding end and evaluated explicitly elsewhere.
    """
    if not b > a:
        raise InvalidArgument(f"empty interval [{a}, {b}]")
    edges = _graded_edges(a, b, grade_left, grade_right)
    xs, ws = [], []
    last = len(edges) - 2
    for i, (p, q) in enumerate(zip(edges[:-1], edges[1:])):
        if q <= p:
            continue
        lp = left_power if i == 0 else 0.0
        rp = right_power if i == last else 0.0
        y, wy = _jacobi01(n, lp, rp)
        h = q - p
        x = p + h * y
        w = wy * h ** (1.0 + lp + rp)
        if i != 0 and left_power:
            w = w * (x - a) ** left_power
        if i != last and right_power:
            w = w * (b - x) ** right_power
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class Tail:
    """How an integrand behaves at +infinity.

    Exactly one of ``rate`` (``|F(r)| <~ exp(-rate r)``), ``power``
    (``|F(r)| ~ r**-power``) or ``end`` (``F = 0`` beyond ``end``) is set.
    """

    rate: float | None = None
    power: float | None = None
    end: float | None = None

    def __post_init__(self):
        if sum(v is not None for v in (self.rate, self.power, self.end)) != 1:
            raise InvalidArgument("exactly one tail descriptor must be given")


def _exp_cutoff(rate: float) -> float:
    """Smallest ``r`` with ``rate r - TAIL_POLY log(1 + r) >= EXP_TAIL``."""
    r = EXP_TAIL / rate
    for _ in range(50):
        nxt = (EXP_TAIL + TAIL_POLY * math.log1p(r)) / rate
        if abs(nxt - r) <= 1e-12 * r:
            break
        r = nxt
    return r


def halfline_nodes(
    tail: Tail,
    *,
    scale: float = 1.0,
    left_power: float = 0.0,
    grade_left: int = 0,
    breaks: Sequence[float] = (),
    break_grading: int = 24,
    max_width: float | None = None,
    n: int = PIECE_NODES,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``int_0^inf r**left_power F(r) dr``.

    The half-line is cut at ``breaks`` (kinks or jumps of ``F``) and at
    ``scale``; beyond it pieces double in width (capped at ``max_width``)
    until the tail is negligible.  An algebraic tail is closed by the map
    ``r = R/x`` with a Jacobi weight matching the decay, so ``F`` need only
    behave like ``r**-power`` up to smooth corrections.
    """
    if not scale > 0:
        raise InvalidArgument("scale must be positive")
    stop = tail.end
    if tail.rate is not None:
        if not tail.rate > 0:
            raise UnsupportedFunction("exponential tail needs a positive rate")
        stop = max(_exp_cutoff(tail.rate), scale)
    if tail.power is not None and not tail.power > left_power + 1.0:
        raise UnsupportedFunction(
            f"algebraic decay r^-{tail.power} is not integrable against r^{left_power}"
        )

    cuts = sorted({float(b) for b in breaks if b > 0 and (stop is None or b < stop)})
    xs, ws = [], []
    start = 0.0
    # finite segments between breakpoints
    for k, c in enumerate(cuts):
        x, w = interval_nodes(
            start,
            c,
            left_power=left_power if k == 0 else 0.0,
            grade_left=grade_left if k == 0 else break_grading,
            grade_right=break_grading,
            n=n,
        )
        if k > 0 and left_power:
            w = w * x**left_power
        xs.append(x)
        ws.append(w)
        start = c

    # the last segment starts at ``start`` and runs to ``stop`` (or infinity)
    first = not cuts
    head_end = start + scale
    if stop is not None and head_end >= stop:
        head_end = stop
    x, w = interval_nodes(
        start,
        head_end,
        left_power=left_power if first else 0.0,
        grade_left=grade_left if first else break_grading,
        n=n,
    )
    if not first and left_power:
        w = w * x**left_power
    xs.append(x)
    ws.append(w)

    y, wy = _legendre01(n)
    lo = head_end
    width = scale
    limit = stop if stop is not None else head_end + scale * 2.0**24
    while lo < limit * (1 - 1e-15):
        width = 2.0 * width if max_width is None else min(2.0 * width, max_width)
        hi = min(lo + width, limit)
        r = lo + (hi - lo) * y
        xs.append(r)
        ws.append(wy * (hi - lo) * (r**left_power if left_power else 1.0))
        lo = hi

    if stop is None:
        # algebraic tail: r = R / x on (0, 1], weight x**(p - lp - 2)
        R = lo
        q = tail.power - left_power - 2.0
        u, wu = _jacobi01(n, q, 0.0)
        r = R / u
        w = wu * R * u ** (-2.0 - q) * r**left_power
        order = np.argsort(r)
        xs.append(r[order])
        ws.append(w[order])

    return np.concatenate(xs), np.concatenate(ws)


def halfline_rule(tail: Tail, **kwargs) -> QuadRule:
    x, w = halfline_nodes(tail, **kwargs)
    upper = tail.end if tail.end is not None else math.inf
    return QuadRule(x, w, "half-line", lower=0.0, upper=upper)


def unit_jacobi_nodes(
    alpha: float,
    *,
    breaks: Sequence[float] = (),
    grade_left: int = 0,
    grade_right: int = 0,
    n: int = PIECE_NODES,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``int_0^1 (1-x)**(alpha-1) g(x) dx`` with kinks at ``breaks``."""
    cuts = sorted({float(b) for b in breaks if 0.0 < b < 1.0})
    edges = [0.0, *cuts, 1.0]
    xs, ws = [], []
    for k, (p, q) in enumerate(zip(edges[:-1], edges[1:])):
        last = k == len(edges) - 2
        x, w = interval_nodes(
            p,
            q,
            right_power=alpha - 1.0 if last else 0.0,
            grade_left=grade_left if k == 0 else 24,
            grade_right=grade_right if last else 24,
            n=n,
        )
        if not last:
            w = w * (1.0 - x) ** (alpha - 1.0)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def unit_jacobi_rule(alpha: float, **kwargs) -> QuadRule:
    x, w = unit_jacobi_nodes(alpha, **kwargs)
    rule = QuadRule(x, w, "jacobi", alpha=float(alpha))
    total = float(np.sum(rule.weights))
    if abs(total * alpha - 1.0) > 1e-12:
        raise ArithmeticError(f"composite Jacobi rule has mass {total!r}, expected {1 / alpha!r}")
    return rule


@dataclass(frozen=True)
class Estimate:
    """A value with an a-posteriori error bound."""

    value: float | complex | np.ndarray
    error: float | np.ndarray = field(default=0.0)

    def __iter__(self):
        yield self.value
        yield self.error


def with_error(compute: Callable[[int], np.ndarray]) -> Estimate:
    """Run ``compute(n)`` on the fine and the coarse composite rule.

    The difference bounds the coarse error and therefore, generously, the
    error of the fine result.
    """
    fine = np.asarray(compute(PIECE_NODES))
    coarse = np.asarray(compute(COARSE_NODES))
    err = np.abs(fine - coarse) + 8 * np.finfo(float).eps * np.abs(fine)
    if fine.ndim == 0:
        return Estimate(fine[()], float(err))
    return Estimate(fine, err)
