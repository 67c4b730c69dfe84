"""Seeded sampling of Riemann-Liouville fractional Brownian motion.

Paths are drawn as ``L @ Z`` with ``L`` the Cholesky factor of the
covariance on the grid:

* ``b-process``: ``b_alpha = n_{alpha+1}``, alpha >= 0 (alpha = 0 is Brownian motion);
* ``n-process``: ``n_alpha``, the alpha-times integrated white noise, alpha > 1/2.

Random numbers
--------------
Every path owns a disjoint counter range of a Philox-4x64 generator keyed by
the seed: path ``p`` starts from counter ``(0, 0, p, 0)``.  Raw 64-bit words
``r`` become uniforms ``((r >> 11) + 0.5) * 2**-53`` in (0, 1), and
consecutive uniform pairs ``(u1, u2)`` become two normals by Box-Muller,
``sqrt(-2 log u1) * (cos, sin)(2 pi u2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamples, InvalidArgument
from .functions import as_alpha
from .kernels import covariance_b, covariance_n
from .linalg import cholesky_spd

__all__ = [
    "MODES",
    "FbmConfig",
    "PathEnsemble",
    "CovarianceReport",
    "standard_normals",
    "covariance_matrix",
    "sample_paths",
    "empirical_covariance",
    "average_paths",
    "self_similarity_residual",
]

MODES = ("b-process", "n-process")

#: Minimum ensemble size for covariance estimation.
MIN_PATHS = 100

#: Entrywise tolerance in standard errors.
SE_MULTIPLE = 5.0


@dataclass(frozen=True, eq=False)
class FbmConfig:
    """Grid, order, ensemble size, seed and covariance family."""

    grid: np.ndarray
    order: float
    n_paths: int
    seed: int
    mode: str = "b-process"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or not 2 <= g.size <= 4096:
            raise InvalidArgument("grid must have between 2 and 4096 points")
        if np.any(~np.isfinite(g)) or np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise InvalidArgument("grid must be positive, finite and strictly increasing")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)
        if self.mode not in MODES:
            raise InvalidArgument(f"mode must be one of {MODES}")
        order = float(self.order)
        if self.mode == "b-process" and not order >= 0:
            raise InvalidArgument("b-process needs alpha >= 0")
        if self.mode == "n-process" and not order > 0.5:
            raise InvalidArgument("n-process needs alpha > 1/2")
        object.__setattr__(self, "order", order)
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise InvalidArgument("n_paths must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "n_paths", int(self.n_paths))
        object.__setattr__(self, "seed", int(self.seed))

    def covariance(self, t, s):
        if self.mode == "b-process":
            return covariance_b(self.order, t, s)
        return covariance_n(self.order, t, s)

    def as_dict(self) -> dict:
        return {
            "grid": [float(x) for x in self.grid],
            "order": self.order,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "mode": self.mode,
        }


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """Sampled paths, one per row, on ``config.grid``.

    ``discretization_error`` is set by :func:`average_paths`; it is the
    largest change of the average when every other grid point is dropped.
    """

    config: FbmConfig
    samples: np.ndarray
    jitter: float = 0.0
    discretization_error: float | None = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.samples, dtype=float)
        if X.shape != (self.config.n_paths, self.config.grid.size):
            raise InvalidArgument(
                f"samples have shape {X.shape}, expected "
                f"{(self.config.n_paths, self.config.grid.size)}"
            )
        X.setflags(write=False)
        object.__setattr__(self, "samples", X)


@dataclass(frozen=True, eq=False)
class CovarianceReport:
    """Empirical vs analytic covariance with entrywise ``5 SE`` tolerances."""

    empirical: np.ndarray
    analytic: np.ndarray
    standard_error: np.ndarray

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.empirical - self.analytic)

    @property
    def tolerance(self) -> np.ndarray:
        return SE_MULTIPLE * self.standard_error

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())

    @property
    def max_ratio(self) -> float:
        """Largest deviation in units of the entrywise tolerance."""
        tol = self.tolerance
        dev = self.deviation
        ratio = np.where(tol > 0, dev / np.where(tol > 0, tol, 1.0), np.where(dev > 0, np.inf, 0.0))
        return float(ratio.max())

    @property
    def passed(self) -> bool:
        return bool(np.all(self.deviation <= self.tolerance))

    def as_dict(self) -> dict:
        return {
            "empirical": self.empirical.tolist(),
            "analytic": self.analytic.tolist(),
            "standard_error": self.standard_error.tolist(),
            "max_deviation": self.max_deviation,
            "max_ratio": self.max_ratio,
            "passed": self.passed,
        }


def standard_normals(seed: int, path: int, size: int) -> np.ndarray:
    """``size`` standard normals from the counter range of ``path``."""
    bitgen = np.random.Philox(key=seed, counter=[0, 0, path, 0])
    pairs = (size + 1) // 2
    raw = bitgen.random_raw(2 * pairs)
    u = ((raw >> np.uint64(11)).astype(float) + 0.5) * 2.0**-53
    u1, u2 = u[0::2], u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(2.0 * math.pi * u2)
    z[1::2] = radius * np.sin(2.0 * math.pi * u2)
    return z[:size]


def covariance_matrix(config: FbmConfig) -> np.ndarray:
    """Analytic covariance on the grid, assembled from the upper triangle."""
    g = config.grid
    i, j = np.triu_indices(g.size)
    upper = config.covariance(g[i], g[j])
    C = np.empty((g.size, g.size))
    C[i, j] = upper
    C[j, i] = upper
    return C


def sample_paths(config: FbmConfig) -> PathEnsemble:
    """Draw ``config.n_paths`` paths with the configured covariance.

    Raises
    ------
    NotPositiveDefinite
        If the covariance fails to factor after the jitter ladder.
    """
    L, jitter = cholesky_spd(covariance_matrix(config))
    n = config.grid.size
    Z = np.stack([standard_normals(config.seed, p, n) for p in range(config.n_paths)])
    return PathEnsemble(config, Z @ L.T, jitter)


def empirical_covariance(ens: PathEnsemble) -> CovarianceReport:
    """Sample covariance of the ensemble against the analytic covariance.

    The standard error of each entry uses the Gaussian formula
    ``SE_ij**2 = (C_ii C_jj + C_ij**2) / N`` with the analytic ``C``.
    """
    N = ens.config.n_paths
    if N < MIN_PATHS:
        raise InsufficientSamples(f"need at least {MIN_PATHS} paths, got {N}")
    X = ens.samples
    emp = np.atleast_2d(np.cov(X, rowvar=False))
    C = covariance_matrix(ens.config)
    d = np.diag(C)
    se = np.sqrt((np.outer(d, d) + C**2) / N)
    return CovarianceReport(emp, C, se)


def _average_weights(grid: np.ndarray, alpha: float) -> np.ndarray:
    """Matrix ``W`` with ``(W @ x)_k = t_k**-alpha int_0^t_k (t_k - s)**(alpha-1) x(s) ds``.

    ``x`` is the piecewise-linear interpolant of the values at ``grid``,
    extended to ``s = 0`` along its first segment.  Each segment is
    integrated exactly against the weight.
    """
    n = grid.size
    knots = np.concatenate([[0.0], grid])
    W = np.zeros((n, n + 1))  # column 0 is the extrapolated value at s = 0
    for k in range(n):
        t = grid[k]
        a, b = knots[: k + 1], knots[1 : k + 2]
        A, B = t - a, t - b
        i0 = (A**alpha - B**alpha) / alpha
        # int_a^b (t - s)**(alpha-1) (s - a) ds
        i1 = A * i0 - (A ** (alpha + 1) - B ** (alpha + 1)) / (alpha + 1)
        slope = i1 / (b - a)
        W[k, : k + 1] += i0 - slope
        W[k, 1 : k + 2] += slope
    W /= grid[:, None] ** alpha
    # x(0) = x_1 - t_1 (x_2 - x_1) / (t_2 - t_1)
    r = grid[0] / (grid[1] - grid[0])
    out = W[:, 1:].copy()
    out[:, 0] += W[:, 0] * (1.0 + r)
    out[:, 1] -= W[:, 0] * r
    return out


def average_paths(ens: PathEnsemble, alpha) -> PathEnsemble:
    """Apply ``t**-alpha int_0^t (t-s)**(alpha-1) X_s ds`` to every path.

    Product integration on the piecewise-linear interpolant; exact for
    affine paths.  The grid must have at least 16 points.
    """
    try:
        alpha = as_alpha(alpha)
    except InvalidArgument:
        raise InvalidArgument("averaging order must be positive") from None
    g = ens.config.grid
    if g.size < 16:
        raise InvalidArgument("averaging needs a grid of at least 16 points")
    out = ens.samples @ _average_weights(g, alpha).T
    coarse = ens.samples[:, ::2] @ _average_weights(g[::2], alpha).T
    err = float(np.max(np.abs(coarse - out[:, ::2]))) if out.size else 0.0
    return PathEnsemble(ens.config, out, ens.jitter, discretization_error=err)


def self_similarity_residual(alpha, grid, lam: float) -> float:
    """Largest relative deviation of ``b_alpha(lam t, lam s)`` from ``lam**(2 alpha + 1) b_alpha(t, s)``."""
    alpha = float(alpha)
    if not alpha >= 0:
        raise InvalidArgument("fractional Brownian order must be nonnegative")
    g = np.asarray(grid, dtype=float)
    T, S = np.meshgrid(g, g, indexing="ij")
    base = covariance_b(alpha, T, S)
    scaled = covariance_b(alpha, lam * T, lam * S)
    expected = lam ** (2 * alpha + 1) * base
    return float(np.max(np.abs(scaled - expected) / np.abs(expected)))
