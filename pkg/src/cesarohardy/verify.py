"""Property suites, one per listed invariant of each module.

Every suite measures a worst-case residual and compares it with its
tolerance times a global ``scale`` (``scale < 1`` tightens every check).
Suites that count violations (positive-definiteness, bound sandwiches,
reproducibility) compare the count with zero and ignore ``scale``.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import fbm, kernels, laplace, operators, quadrature, special
from .errors import CesaroHardyError
from .functions import exponential, gaussian, laguerre, t_power_exp
from .linalg import cholesky_spd

__all__ = ["SuiteResult", "Suite", "SUITES", "run_suites", "suite_names", "as_records"]


@dataclass(frozen=True)
class SuiteResult:
    name: str
    module: str
    passed: bool
    worst: float
    tolerance: float
    seconds: float
    detail: str = ""

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.module:15s} {self.name:32s} worst={self.worst:.3e} tol={self.tolerance:.1e}"


@dataclass(frozen=True)
class Suite:
    name: str
    module: str
    tolerance: float
    measure: Callable[[], tuple[float, str]]
    scaled: bool = True

    def run(self, scale: float = 1.0) -> SuiteResult:
        tol = self.tolerance * scale if self.scaled else self.tolerance
        start = time.perf_counter()
        try:
            worst, detail = self.measure()
            passed = bool(worst <= tol)
        except CesaroHardyError as exc:
            worst, detail, passed = math.inf, f"{type(exc).__name__}: {exc}", False
        return SuiteResult(
            self.name, self.module, passed, float(worst), tol, time.perf_counter() - start, detail
        )


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


SMOOTH_FAMILY = (exponential(1.0), exponential(2.0), t_power_exp(2, 1.0), laguerre(3), gaussian())
EXP_FAMILY = (exponential(0.5), exponential(1.0), exponential(3.0))


# ---------------------------------------------------------------------------
# numerics-core


def _quadrature_exactness():
    worst = 0.0
    for n in (2, 4, 8, 16, 32):
        rule = quadrature.gauss_legendre(n)
        k = np.arange(2 * n)
        got = rule.integrate(rule.nodes[None, :] ** k[:, None])
        worst = max(worst, _rel(got, 1.0 / (k + 1)))
        for a in (0.3, 0.75, 1.5, 3.0):
            rule = quadrature.gauss_jacobi_endpoint(n, a)
            got = rule.integrate(rule.nodes[None, :] ** k[:, None])
            want = np.array([special.beta_fn(j + 1.0, a) for j in k])
            worst = max(worst, _rel(got, want))
    return worst, "moments x^k, k < 2n"


def _hyp2f1_oracle():
    worst = 0.0
    x = np.concatenate([np.linspace(0.0, 0.99, 34), 1.0 - np.geomspace(1e-2, 1e-6, 9)])
    for a in (0.6, 0.75, 1.0, 1.5, 2.0, 3.0):
        got = special.hyp2f1_kernel(a, x)
        want = a * kernels._euler_integral(a, 1.0 - x)
        worst = max(worst, _rel(got, want))
    return worst, "2F1(1-a,1;a+1;x) vs Euler integral on [0, 1-1e-6]"


def _laguerre_routes():
    t = np.array([0.1, 1.0, 10.0])
    worst = 0.0
    for m in range(11):
        j = np.arange(m + 1)
        # sum of absolute terms: the conditioning scale of the alternating sum
        size = np.exp(-t / 2) * np.array(
            [sum(math.comb(m, i) * ti**i / math.factorial(i) for i in j) for ti in t]
        )
        err = np.abs(special.laguerre_fn(m, t) - special.laguerre_sum(m, t)) / size
        worst = max(worst, float(err.max()))
    return worst, "m <= 10, t in {0.1, 1, 10}"


def _cholesky_reconstruction():
    rng = np.random.default_rng(12345)
    worst = 0.0
    mats = []
    for n in (5, 20, 60):
        A = rng.standard_normal((n, n))
        mats.append(A @ A.T + n * np.eye(n))
    mats.append(kernels.gram(1.0, np.geomspace(0.1, 10, 40)).entries)
    mats.append(fbm.covariance_matrix(fbm.FbmConfig(np.linspace(0.01, 1, 200), 0.0, 1, 0)))
    for G in mats:
        L, jitter = cholesky_spd(G)
        excess = np.abs(L @ L.T - G).max() - jitter
        worst = max(worst, excess / np.abs(G).max())
    return worst, "(max|LL^T - G| - jitter) / max|G|"


# ---------------------------------------------------------------------------
# fractional-ops


def _commutation():
    f = exponential(1.0)
    t = np.array([0.5, 1.0, 3.0])
    worst = 0.0
    for a, b in ((1.0, 1.0), (0.7, 1.3), (2.0, 0.5)):
        one = operators.cesaro_star(operators.cesaro_plus_fn(f, b), a, t)
        two = operators.cesaro_plus(operators.cesaro_star_fn(f, a), b, t)
        worst = max(worst, float(np.max(np.abs(one - two))))
    return worst, "C*_a C_b = C_b C*_a on exp(-t)"


def _subordination():
    t = np.array([0.3, 1.0, 4.0])
    worst = 0.0
    for f in SMOOTH_FAMILY:
        for a in (0.5, 1.0, 2.5):
            direct = operators.cesaro_star(f, a, t)
            sub = operators.cesaro_star_subordinated(f, a, t)
            worst = max(worst, float(np.max(np.abs(direct - sub))))
    return worst, "smooth family, alpha in {0.5, 1, 2.5}"


def _weyl_round_trip():
    t = np.array([0.5, 1.0, 2.0])
    worst = 0.0
    for f in EXP_FAMILY:
        for a in (0.5, 1.0, 1.5):
            back = operators.weyl_derivative(operators.weyl_integral_fn(f, a), a, t)
            worst = max(worst, float(np.max(np.abs(back - f(t)))))
    return worst, "W^a W^-a f = f"


def _homogeneity():
    t = np.array([0.5, 1.0, 2.0])
    f = exponential(1.0)
    worst = 0.0
    for a in (0.5, 1.5):
        for lam in (0.5, 2.0):
            scaled = exponential(lam)
            left = operators.weyl_derivative(scaled, a, t)
            right = lam**a * operators.weyl_derivative(f, a, lam * t)
            worst = max(worst, float(np.max(np.abs(left - right))))
    return worst, "W^a f(lam .) = lam^a (W^a f)(lam .)"


def _pointwise_bound():
    t = np.geomspace(0.1, 10.0, 9)
    worst = 0.0
    for a in (0.5, 1.5):
        C = operators.pointwise_constant(a, a + 1.0)
        for f in (exponential(1.0), t_power_exp(2, 1.0)):
            norm = operators.sobolev_norm(f, a + 1.0).value
            ratio = np.abs(operators.weyl_derivative(f, a, t)) * t ** (a + 0.5) / norm
            worst = max(worst, float(ratio.max()) / C)
    return worst, "max ratio / C(alpha, alpha+1)"


def _theta_embedding():
    worst = 0.0
    for f in (exponential(1.0), t_power_exp(2, 1.0), laguerre(2)):
        for a in (0.5, 1.0, 1.5):
            phi = operators.theta_isometry(f, a)
            lhs = operators.l2_norm(phi, weight_power=-2.0 * a)[0]
            rhs = operators.l2_norm(f)[0]
            worst = max(worst, abs(lhs**2 - rhs**2))
    return worst, "int |Theta f|^2 x^-2a = ||f||^2"


# ---------------------------------------------------------------------------
# kernels


def _strategy_agreement():
    g = np.geomspace(0.1, 10.0, 5)
    S, T = np.meshgrid(g, g)
    worst = 0.0
    for a in (0.75, 1.0, 1.5, 2.0, 3.0):
        hyp = kernels.kernel_k(kernels.KernelSpec(a, "hypergeometric"), S, T)
        quad = kernels.kernel_k(kernels.KernelSpec(a, "quadrature-oracle"), S, T)
        worst = max(worst, _rel(quad, hyp))
        if float(a).is_integer():
            ints = kernels.kernel_k(kernels.KernelSpec(a, "integer-sum"), S, T)
            worst = max(worst, _rel(ints, hyp))
    return worst, "5x5 log grid on [0.1, 10]^2"


def _reproducing():
    worst = 0.0
    for f in SMOOTH_FAMILY:
        for a in (1.0, 1.5, 2.0):
            for t in (0.5, 1.0, 2.0):
                value, _ = kernels.reproducing_pairing(f, a, t)
                worst = max(worst, abs(value - float(f(t))))
    return worst, "|<f, k_t> - f(t)|"


def _kernel_self_similarity():
    g = np.geomspace(0.1, 10.0, 6)
    S, T = np.meshgrid(g, g)
    worst = 0.0
    for a in (0.75, 1.0, 1.5, 2.0):
        base = kernels.kernel_k(a, S, T)
        for lam in (0.5, 2.0, 10.0):
            worst = max(worst, _rel(lam * kernels.kernel_k(a, lam * S, lam * T), base))
    return worst, "k(lam s, lam t) = k(s, t) / lam"


def _n_identity():
    g = np.geomspace(0.2, 5.0, 5)
    S, T = np.meshgrid(g, g)
    worst = 0.0
    for a in (0.75, 1.0, 1.5, 2.5):
        direct = kernels.covariance_n(a, S, T, route="direct")
        ident = kernels.covariance_n(a, S, T, route="identity")
        worst = max(worst, _rel(direct, ident))
    # off the diagonal the identity also holds for alpha <= 1/2
    direct = kernels.covariance_n(0.4, 1.0, 2.0, route="direct")
    worst = max(worst, _rel(direct, kernels.covariance_n(0.4, 1.0, 2.0)))
    return worst, "direct integral vs (ts)^a k_a"


def _gram_psd():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for a in (0.75, 1.0, 1.5, 2.0):
        for size in (8, 32, 64):
            grid = np.sort(np.exp(rng.uniform(np.log(0.05), np.log(20.0), size)))
            G = kernels.gram(a, np.unique(grid))
            worst = max(worst, -G.min_eigenvalue / np.max(np.diag(G.entries)))
    return worst, "-min eigenvalue / max diagonal"


# ---------------------------------------------------------------------------
# laplace-domain


def _half_plane_points(count=16, seed=7):
    rng = np.random.default_rng(seed)
    mod = np.exp(rng.uniform(np.log(0.2), np.log(5.0), count))
    arg = rng.uniform(-1.3, 1.3, count)
    return [laplace.HalfPlanePoint(float(r), float(th)) for r, th in zip(mod, arg)]


def _half_plane_gram():
    pts = _half_plane_points()
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        K = np.array([[laplace.kernel_K(a, z, w).value for w in pts] for z in pts])
        herm = np.abs(K - K.conj().T).max() / np.abs(K).max()
        lowest = np.linalg.eigvalsh(0.5 * (K + K.conj().T))[0]
        worst = max(worst, herm, -lowest / np.abs(np.diag(K)).max())
    return worst, "Hermitian residual and -min eigenvalue, 16 points"


def _radial_scaling():
    pts = _half_plane_points(6, seed=11)
    worst = 0.0
    for a in (0.5, 1.0, 2.0):
        for z in pts:
            for w in pts[:3]:
                base = laplace.kernel_K(a, z, w).value
                for lam in (0.5, 3.0):
                    scaled = laplace.kernel_K(a, z.scaled(lam), w.scaled(lam)).value
                    worst = max(worst, abs(lam * scaled - base) / abs(base))
    return worst, "K(lam z, lam w) = K(z, w) / lam"


def _diagonal_imaginary():
    worst = 0.0
    for a, z in laplace.probe_lattice(alphas=(0.5, 1.0, 2.0)):
        worst = max(worst, abs(laplace.kernel_K(a, z, z).imag))
    return worst, "|Im K(z, z)| from the double integral"


def _laguerre_laplace():
    worst = 0.0
    for r in (0.1, 0.5, 1.0, 4.0):
        for th in (-1.2, -0.5, 0.0, 0.7, 1.4):
            z = laplace.HalfPlanePoint(r, th)
            for m in range(9):
                closed = laplace.laplace_laguerre(m, z).value
                quad = laplace.laplace(laguerre(m), z).value
                worst = max(worst, abs(closed - quad))
    return worst, "m <= 8 on a polar grid"


def _basis_routes():
    worst = 0.0
    for a in (0.3, 0.5, 1.0, 1.7):
        for r in (0.2, 1.0, 5.0):
            for th in (-1.0, 0.0, 1.3):
                z = laplace.HalfPlanePoint(r, th)
                for m in (0, 1, 4):
                    d = laplace.frak_basis(m, a, z, route="direct").value
                    e = laplace.frak_basis(m, a, z, route="reflected").value
                    worst = max(worst, abs(d - e))
    return worst, "direct vs 1/(4z) reflection"


def _estimation_bounds():
    reports = [laplace.check_estimation_bounds(a, z) for a, z in laplace.probe_lattice()]
    failed = [r for r in reports if not r.passed]
    return float(len(failed)), f"{len(reports)} lattice points, {len(failed)} violations"


# ---------------------------------------------------------------------------
# fbm-sim


def _fbm_reproducible():
    cfg = fbm.FbmConfig(np.linspace(0.1, 1.0, 10), 0.5, 50, 987654321)
    a, b = fbm.sample_paths(cfg), fbm.sample_paths(cfg)
    other = fbm.sample_paths(fbm.FbmConfig(cfg.grid, 0.5, 50, 987654322))
    mismatches = int(np.sum(a.samples != b.samples)) + int(np.array_equal(a.samples, other.samples))
    return float(mismatches), "identical config gives identical samples"


def _brownian_variance():
    grid = np.array([0.25, 0.5, 1.0, 2.0])
    ens = fbm.sample_paths(fbm.FbmConfig(grid, 0.0, 10_000, 20240601))
    report = fbm.empirical_covariance(ens)
    ratio = np.abs(np.diag(report.empirical) - grid) / np.diag(report.tolerance)
    return float(ratio.max()), "variance deviation in units of 5 SE"


def _covariance_self_similarity():
    grid = np.geomspace(0.1, 5.0, 8)
    worst = 0.0
    for a in (0.0, 0.3, 1.0, 2.5):
        for lam in (0.5, 3.0):
            worst = max(worst, fbm.self_similarity_residual(a, grid, lam))
    return worst, "b_a(lam t, lam s) = lam^(2a+1) b_a(t, s)"


# ---------------------------------------------------------------------------
# cli


def _json_round_trip():
    from . import cli

    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "paths.csv"
        code = cli.main(
            ["fbm", "--alpha", "0", "--grid", "0.25:1:4:lin", "--paths", "120", "--seed", "5",
             "--out", str(out)]
        )
        sidecar = out.with_suffix(".json")
        text = sidecar.read_text(encoding="utf-8")
        data = json.loads(text)
        bad += code != 0
        bad += cli.dump_json(data) != text
    return float(bad), "parse(emit(x)) = x for the fbm sidecar"


def _exit_codes():
    from . import cli

    wrong = 0
    # the config-error cases print diagnostics; keep them out of the report
    with tempfile.TemporaryDirectory() as tmp, contextlib.redirect_stderr(io.StringIO()):
        out = str(Path(tmp) / "t.csv")
        wrong += cli.main(["kernel-table", "--alpha", "1", "--grid", "1:3:3:lin", "--out", out]) != 0
        wrong += cli.main(["kernel-table", "--alpha", "1.5", "--strategy", "int", "--grid",
                           "1:3:3:lin", "--out", out]) != cli.EXIT_CONFIG
        wrong += cli.main(["fbm", "--mode", "n", "--alpha", "0.4", "--grid", "0.1:1:4:lin",
                           "--out", out]) != cli.EXIT_CONFIG
    return float(wrong), "0 success, 2 config error"


SUITES = (
    Suite("quadrature-exactness", "numerics-core", 1e-12, _quadrature_exactness),
    Suite("hyp2f1-euler-oracle", "numerics-core", 1e-9, _hyp2f1_oracle),
    Suite("laguerre-recurrence-vs-sum", "numerics-core", 1e-10, _laguerre_routes),
    Suite("cholesky-reconstruction", "numerics-core", 1e-12, _cholesky_reconstruction),
    Suite("commutation", "fractional-ops", 1e-7, _commutation),
    Suite("subordinated-vs-direct", "fractional-ops", 1e-8, _subordination),
    Suite("weyl-round-trip", "fractional-ops", 1e-6, _weyl_round_trip),
    Suite("homogeneity", "fractional-ops", 1e-6, _homogeneity),
    Suite("pointwise-bound", "fractional-ops", 1.0, _pointwise_bound, scaled=False),
    Suite("theta-embedding", "fractional-ops", 1e-8, _theta_embedding),
    Suite("strategy-agreement", "kernels", 1e-8, _strategy_agreement),
    Suite("reproducing-property", "kernels", 1e-5, _reproducing),
    Suite("kernel-self-similarity", "kernels", 1e-10, _kernel_self_similarity),
    Suite("n-identity", "kernels", 1e-8, _n_identity),
    Suite("gram-psd", "kernels", 1e-10, _gram_psd, scaled=False),
    Suite("half-plane-gram-psd", "laplace-domain", 1e-12, _half_plane_gram, scaled=False),
    Suite("radial-scaling", "laplace-domain", 1e-9, _radial_scaling),
    Suite("diagonal-imaginary-residual", "laplace-domain", 1e-9, _diagonal_imaginary),
    Suite("laguerre-laplace", "laplace-domain", 1e-8, _laguerre_laplace),
    Suite("basis-dual-route", "laplace-domain", 1e-8, _basis_routes),
    Suite("estimation-bounds", "laplace-domain", 0.0, _estimation_bounds, scaled=False),
    Suite("fbm-reproducibility", "fbm-sim", 0.0, _fbm_reproducible, scaled=False),
    Suite("brownian-variance", "fbm-sim", 1.0, _brownian_variance),
    Suite("covariance-self-similarity", "fbm-sim", 1e-10, _covariance_self_similarity),
    Suite("json-round-trip", "cli", 0.0, _json_round_trip, scaled=False),
    Suite("exit-codes", "cli", 0.0, _exit_codes, scaled=False),
)


def suite_names() -> list[str]:
    return [s.name for s in SUITES]


def run_suites(scale: float = 1.0, only=None, progress=None) -> list[SuiteResult]:
    """Run the suites (all, or those named in ``only``) with tolerances times ``scale``."""
    if not scale > 0:
        raise ValueError("tolerance scale must be positive")
    chosen = [s for s in SUITES if only is None or s.name in only]
    results = []
    for suite in chosen:
        result = suite.run(scale)
        if progress is not None:
            progress(result)
        results.append(result)
    return results


def as_records(results) -> list[dict]:
    return [asdict(r) for r in results]
