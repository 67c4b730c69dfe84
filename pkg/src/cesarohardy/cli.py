"""Command-line front end: kernel tables, bound sweeps, fBm sampling, verification.

Exit codes are a stable contract: 0 success, 1 verification failures,
2 configuration errors.  CSV output is comma separated with a header row,
LF line endings, UTF-8 and 17 significant digits per float.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CesaroHardyError, ConfigError
from .fbm import MIN_PATHS, FbmConfig, empirical_covariance, sample_paths
from .functions import as_alpha
from .kernels import KernelSpec, covariance_b, covariance_n, kernel_k
from .laplace import HalfPlanePoint, check_estimation_bounds, probe_lattice

__all__ = ["EXIT_OK", "EXIT_FAILED", "EXIT_CONFIG", "RunConfig", "parse_grid", "parse_polar", "main"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

EDGE = math.pi / 2 - 1e-3
STRATEGY_FLAGS = {"hyp": "hypergeometric", "int": "integer-sum", "quad": "quadrature-oracle"}
MODE_FLAGS = {"b": "b-process", "n": "n-process"}


# ---------------------------------------------------------------------------
# parsing


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so that ``main`` owns the exit code."""

    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:count:{lin|log}`` to a strictly increasing positive grid."""
    parts = spec.split(":")
    if len(parts) != 4:
        raise ConfigError(f"--grid {spec!r}: expected start:stop:count:lin|log")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"--grid {spec!r}: start and stop must be numbers, count an integer") from None
    spacing = parts[3]
    if count < 1:
        raise ConfigError(f"--grid {spec!r}: the grid is empty")
    if not (0 < start and math.isfinite(stop)) or (count > 1 and not stop > start):
        raise ConfigError(f"--grid {spec!r}: need 0 < start < stop")
    if spacing == "lin":
        return np.linspace(start, stop, count)
    if spacing == "log":
        return np.geomspace(start, stop, count)
    raise ConfigError(f"--grid {spec!r}: spacing must be lin or log")


def parse_polar(spec: str) -> tuple[np.ndarray, np.ndarray]:
    """``mod-start:mod-stop:count/theta-count`` to log-spaced moduli and angles.

    Angles are evenly spaced on ``[-(pi/2 - 1e-3), pi/2 - 1e-3]`` so that the
    boundary regime is always probed.
    """
    try:
        radial, angular = spec.split("/")
        lo, hi, count = radial.split(":")
        lo, hi, count, n_theta = float(lo), float(hi), int(count), int(angular)
    except ValueError:
        raise ConfigError(f"--polar {spec!r}: expected mod-start:mod-stop:count/theta-count") from None
    if count < 1 or n_theta < 1:
        raise ConfigError(f"--polar {spec!r}: counts must be positive")
    if not (0 < lo <= hi < math.inf):
        raise ConfigError(f"--polar {spec!r}: need 0 < mod-start <= mod-stop")
    moduli = np.geomspace(lo, hi, count)
    thetas = np.linspace(-EDGE, EDGE, n_theta) if n_theta > 1 else np.zeros(1)
    return moduli, thetas


def _strategies(values) -> list[str]:
    names = []
    for item in values or ["hyp"]:
        for flag in item.split(","):
            if flag not in STRATEGY_FLAGS:
                raise ConfigError(f"--strategy {flag!r}: choose from hyp, int, quad")
            if STRATEGY_FLAGS[flag] not in names:
                names.append(STRATEGY_FLAGS[flag])
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cesarohardy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("kernel-table", help="k_alpha, n_alpha and b_(alpha-1) over a grid product")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--grid", required=True, help="start:stop:count:lin|log")
    p.add_argument("--strategy", action="append", help="hyp, int or quad; repeat or comma-separate")
    common(p)

    p = sub.add_parser("bounds-sweep", help="K_alpha(z, z) against its bounds on a polar lattice")
    p.add_argument("--alpha", type=float, action="append", help="order; repeat for several")
    p.add_argument("--polar", help="mod-start:mod-stop:count/theta-count")
    common(p)

    p = sub.add_parser("fbm", help="sample fractional Brownian paths")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", choices=tuple(MODE_FLAGS), default="b")
    p.add_argument("--grid", required=True, help="start:stop:count:lin|log")
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("verify", help="run every property suite")
    p.add_argument("--tolerance", type=float, default=1.0, help="factor applied to every tolerance")
    p.add_argument("--only", action="append", help="run only the named suite; repeatable")
    common(p)
    return parser


@dataclass
class RunConfig:
    """Parsed and validated command line."""

    command: str
    alpha: list[float] = field(default_factory=list)
    grid: np.ndarray | None = None
    polar: tuple[np.ndarray, np.ndarray] | None = None
    strategies: list[str] = field(default_factory=list)
    mode: str = "b-process"
    paths: int = 0
    seed: int = 0
    out: Path | None = None
    format: str = "csv"
    tolerance: float = 1.0
    only: list[str] | None = None

    def echo(self) -> dict:
        out = {"command": self.command, "format": self.format}
        if self.alpha:
            out["alpha"] = self.alpha
        if self.grid is not None:
            out["grid"] = [float(x) for x in self.grid]
        if self.command == "fbm":
            out.update(mode=self.mode, paths=self.paths, seed=self.seed)
        if self.command == "verify":
            out["tolerance_scale"] = self.tolerance
        return out


def _config(args) -> RunConfig:
    """Check every precondition before any computation starts."""
    cfg = RunConfig(args.command, out=Path(args.out) if args.out else None, format=args.format)
    if args.command == "kernel-table":
        cfg.alpha = [as_alpha(args.alpha)]
        cfg.grid = parse_grid(args.grid)
        cfg.strategies = _strategies(args.strategy)
        for s in cfg.strategies:
            KernelSpec(cfg.alpha[0], s)
    elif args.command == "bounds-sweep":
        cfg.alpha = [as_alpha(a) for a in args.alpha] if args.alpha else []
        cfg.polar = parse_polar(args.polar) if args.polar else None
    elif args.command == "fbm":
        cfg.alpha = [float(args.alpha)]
        cfg.grid = parse_grid(args.grid)
        cfg.mode = MODE_FLAGS[args.mode]
        cfg.paths, cfg.seed = args.paths, args.seed
        FbmConfig(cfg.grid, cfg.alpha[0], cfg.paths, cfg.seed, cfg.mode)
        if cfg.out is None:
            raise ConfigError("fbm: --out is required (a JSON sidecar is written next to it)")
    elif args.command == "verify":
        if not (args.tolerance > 0 and math.isfinite(args.tolerance)):
            raise ConfigError("--tolerance must be a positive factor")
        cfg.tolerance = args.tolerance
        from .verify import suite_names

        unknown = set(args.only or ()) - set(suite_names())
        if unknown:
            raise ConfigError(f"--only: unknown suites {sorted(unknown)}")
        cfg.only = args.only
    return cfg


# ---------------------------------------------------------------------------
# emission


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def dump_csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def _table(cfg: RunConfig, header, rows) -> str:
    if cfg.format == "csv":
        return dump_csv(header, rows)
    records = [{h: _jsonable(v.item() if isinstance(v, np.generic) else v) for h, v in zip(header, r)}
               for r in rows]
    return dump_json({"config": cfg.echo(), "versions": versions(), "rows": records})


def _write(cfg: RunConfig, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        cfg.out.write_text(text, encoding="utf-8", newline="\n")


def versions() -> dict:
    out = {"numpy": np.__version__}
    for name in ("artifact", "scipy"):
        try:
            out[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            out[name] = "unknown"
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_kernel_table(cfg: RunConfig) -> int:
    alpha, grid = cfg.alpha[0], cfg.grid
    S, T = (a.ravel() for a in np.meshgrid(grid, grid, indexing="ij"))
    diagonal_diverges = alpha <= 0.5
    off = S != T if diagonal_diverges else np.ones(S.shape, bool)

    def column(fn):
        out = np.full(S.shape, math.inf)
        out[off] = fn(S[off], T[off])
        return out

    header = ["s", "t"] + [f"k_{s}(alpha={alpha:g})" for s in cfg.strategies] + [f"n(alpha={alpha:g})"]
    cols = [S, T] + [column(lambda s, t, st=st: kernel_k(KernelSpec(alpha, st), s, t)) for st in cfg.strategies]
    cols.append(column(lambda s, t: covariance_n(alpha, s, t)))
    if alpha >= 1:
        header.append(f"b(alpha={alpha - 1:g})")
        cols.append(column(lambda s, t: covariance_b(alpha - 1.0, s, t)))
    _write(cfg, _table(cfg, header, zip(*cols)))
    return EXIT_OK


def cmd_bounds_sweep(cfg: RunConfig) -> int:
    if cfg.polar is None and not cfg.alpha:
        points = probe_lattice()
    else:
        moduli, thetas = cfg.polar if cfg.polar is not None else parse_polar("0.1:10:5/7")
        alphas = cfg.alpha or [0.3, 0.5, 0.75, 1.0, 2.0]
        points = [(a, HalfPlanePoint(float(r), float(th))) for a in alphas for th in thetas for r in moduli]
    header = ["alpha", "modulus", "theta", "K_diag", "error", "lower", "upper", "regime", "pass"]
    rows, failures = [], 0
    for a, z in points:
        rep = check_estimation_bounds(a, z)
        failures += not rep.passed
        rows.append((rep.alpha, rep.modulus, rep.theta, rep.value, rep.error, rep.lower, rep.upper,
                     rep.regime, rep.passed))
    _write(cfg, _table(cfg, header, rows))
    if failures:
        print(f"bounds-sweep: {failures} of {len(rows)} rows violate the bounds", file=sys.stderr)
    return EXIT_FAILED if failures else EXIT_OK


def cmd_fbm(cfg: RunConfig) -> int:
    config = FbmConfig(cfg.grid, cfg.alpha[0], cfg.paths, cfg.seed, cfg.mode)
    ens = sample_paths(config)
    header = ["path"] + [fmt(t) for t in config.grid]
    rows = ([p] + list(row) for p, row in enumerate(ens.samples))
    if cfg.format == "csv":
        _write(cfg, dump_csv(header, rows))
    else:
        _write(cfg, dump_json({"grid": config.grid.tolist(), "samples": ens.samples.tolist()}))
    sidecar = {**cfg.echo(), **{f"version_{k}": v for k, v in versions().items()}, "jitter": ens.jitter}
    passed = True
    if config.n_paths >= MIN_PATHS:
        report = empirical_covariance(ens).as_dict()
        passed = report["passed"]
        sidecar.update({f"covariance_{k}": v for k, v in report.items()})
    cfg.out.with_suffix(".json").write_text(dump_json(sidecar), encoding="utf-8", newline="\n")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import as_records, run_suites

    quiet = cfg.format == "json" and cfg.out is None

    def progress(result):
        if not quiet:
            print(result.line(), flush=True)

    results = run_suites(cfg.tolerance, only=cfg.only, progress=progress)
    failed = [r.name for r in results if not r.passed]
    if not quiet:
        print(f"{len(results) - len(failed)}/{len(results)} suites passed"
              + (f"; failed: {', '.join(failed)}" if failed else ""))
    report = {**cfg.echo(), **{f"version_{k}": v for k, v in versions().items()},
              "suites": [{k: _jsonable(v) for k, v in rec.items()} for rec in as_records(results)],
              "failed": failed}
    if cfg.out is not None:
        cfg.out.write_text(dump_json(report), encoding="utf-8", newline="\n")
    elif quiet:
        sys.stdout.write(dump_json(report))
    return EXIT_FAILED if failed else EXIT_OK


COMMANDS = {
    "kernel-table": cmd_kernel_table,
    "bounds-sweep": cmd_bounds_sweep,
    "fbm": cmd_fbm,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CesaroHardyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CesaroHardyError as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[cfg.command](cfg)
    except CesaroHardyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
