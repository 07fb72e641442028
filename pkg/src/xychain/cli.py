"""Command-line interface.

Each subcommand writes one data table (CSV by default, or a JSON document)
to ``--output`` or stdout. With a CSV output file a JSON manifest with the
run parameters is written next to it as ``<output>.json``. Relative output
paths are resolved against ``$XYCHAIN_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 1 failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import version_string
from .circuits import (
    build_bog_layer,
    build_fourier,
    build_laplacian,
    build_rg,
    build_tfd,
    build_time_evolution,
    build_udis,
    kept_count,
)
from .experiments import (
    critical_fit,
    csv_text,
    manifest,
    oracle_expz_spacetime,
    run_entropy_curve,
    run_expz_coarse,
    run_expz_spacetime,
    run_tfd_entropy_vs_beta,
)
from .model import ModelParams, build_hamiltonian, exact_spectrum, ground_state
from .sim import basis_state
from . import verify as verify_suite

OUTPUT_DIR_ENV = "XYCHAIN_OUTPUT_DIR"
MAX_STATEVECTOR_SITES = 16
MAX_DENSE_SITES = 8

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line settings."""

    subcommand: str
    n: int = 8
    lam: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0
    cutoff: float | None = None
    times: tuple[float, ...] = ()
    output: str | None = None
    fmt: str = "csv"
    seed: int = 0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("lam", "gamma", "beta"):
            if not np.isfinite(getattr(self, name)):
                raise UsageError(f"--{'lambda' if name == 'lam' else name} must be finite")
        if not all(np.isfinite(self.times)):
            raise UsageError("times must be finite")
        if self.n < 2 or self.n % 2 or self.n > MAX_STATEVECTOR_SITES:
            raise UsageError(f"--n must be even and in [2, {MAX_STATEVECTOR_SITES}]")
        if self.beta < 0:
            raise UsageError("--beta must be >= 0")

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.n, self.lam, self.gamma, self.beta)

    @property
    def effective_cutoff(self) -> float:
        return 0.25 if self.cutoff is None else self.cutoff

    def record(self) -> dict:
        rec = asdict(self)
        rec["times"] = list(self.times)
        return rec


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=8, help="number of sites (power of two)")
    common.add_argument("--lambda", dest="lam", type=float, default=1.0, help="coupling ratio")
    common.add_argument("--gamma", type=float, default=1.0, help="anisotropy")
    common.add_argument("--beta", type=float, default=1.0, help="inverse temperature")
    common.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    timed = argparse.ArgumentParser(add_help=False)
    timed.add_argument("--times", type=_float_list, default=None, help="comma-separated times")
    timed.add_argument("--t-max", type=float, default=4.0)
    timed.add_argument("--steps", type=int, default=41)
    timed.add_argument("--site", type=int, default=0, help="initially excited site")

    parser = argparse.ArgumentParser(
        prog="xychain", description="Exact circuits for the periodic XY chain."
    )
    parser.add_argument("--version", action="version", version=version_string())
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="exact many-body spectrum")
    p.add_argument("--no-check", action="store_true", help="skip the dense diagonalization check")

    sub.add_parser("evolve", parents=[common, timed], help="<Z_i>(t) after a local excitation")

    p = sub.add_parser("rg", parents=[common, timed], help="coarse-grained <Z_i>(t)")
    p.add_argument("--cutoff", type=float, default=None, help="momentum cutoff (default keeps n/2 modes)")

    p = sub.add_parser("tfd", parents=[common], help="TFD entropy tables")
    p.add_argument("--betas", type=_float_list, default=(0.0, 0.5, 1.0, 2.0, 5.0, 10.0))

    p = sub.add_parser("entropy", parents=[common], help="block entropy curve and scaling fits")
    p.add_argument("--state", choices=("ground", "tfd"), default="ground")
    p.add_argument("--fit", action="store_true", help="emit the fit table instead of the curve")

    p = sub.add_parser("export-circuit", parents=[common], help="serialize a circuit")
    p.add_argument(
        "--circuit",
        choices=("fourier", "bog", "udis", "time", "rg", "laplacian", "tfd"),
        default="udis",
    )
    p.add_argument("--t", type=float, default=1.0, help="time for the evolution circuit")
    p.add_argument("--cutoff", type=float, default=None)

    sub.add_parser("verify", parents=[common], help="run the oracle suite")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    times: tuple[float, ...] = ()
    if hasattr(args, "times"):
        if args.times is not None:
            times = args.times
        else:
            if args.steps < 1:
                raise UsageError("--steps must be >= 1")
            times = tuple(np.linspace(0.0, args.t_max, args.steps).tolist())
    skip = {"subcommand", "n", "lam", "gamma", "beta", "output", "fmt", "seed", "times", "cutoff"}
    options = {k: v for k, v in vars(args).items() if k not in skip}
    if "betas" in options:
        options["betas"] = list(options["betas"])
    return RunConfig(
        subcommand=args.subcommand,
        n=args.n,
        lam=args.lam,
        gamma=args.gamma,
        beta=args.beta,
        cutoff=getattr(args, "cutoff", None),
        times=tuple(times),
        output=args.output,
        fmt=args.fmt,
        seed=args.seed,
        options=options,
    )


def _require_dense(cfg: RunConfig, limit: int = MAX_DENSE_SITES) -> None:
    if cfg.n > limit:
        raise UsageError(f"{cfg.subcommand} supports n <= {limit}")


def _require_circuit_size(cfg: RunConfig) -> None:
    if cfg.n & (cfg.n - 1):
        raise UsageError(f"{cfg.subcommand} builds circuits and needs --n a power of two")


class Table:
    def __init__(self, header, rows, **extra):
        self.header = list(header)
        self.rows = [tuple(r) for r in rows]
        self.extra = extra


def cmd_spectrum(cfg: RunConfig) -> tuple[Table, bool]:
    levels = exact_spectrum(cfg.params)
    ok = True
    extra = {}
    if not cfg.options.get("no_check") and cfg.n <= MAX_DENSE_SITES:
        dense = np.linalg.eigvalsh(build_hamiltonian(cfg.params))
        dev = float(np.max(np.abs(np.sort(dense) - levels)))
        ok = dev < 1e-8
        extra["dense_check_max_deviation"] = dev
    return Table(("index", "energy"), ((i, float(e)) for i, e in enumerate(levels)), **extra), ok


def cmd_evolve(cfg: RunConfig) -> tuple[Table, bool]:
    _require_circuit_size(cfg)
    _require_dense(cfg, MAX_STATEVECTOR_SITES)
    site = cfg.options["site"]
    if not 0 <= site < cfg.n:
        raise UsageError(f"--site must be in [0, {cfg.n})")
    grid = run_expz_spacetime(cfg.params, site, cfg.times)
    ok, extra = True, {}
    if cfg.n <= MAX_DENSE_SITES:
        ref = oracle_expz_spacetime(cfg.params, site, cfg.times)
        dev = float(np.max(np.abs(ref.values - grid.values), initial=0.0))
        ok = dev < 1e-8
        extra["dense_check_max_deviation"] = dev
    rows = ((float(t), s, float(v)) for t, s, v in grid.rows())
    return Table(("t", "site", "z"), rows, **extra), ok


def cmd_rg(cfg: RunConfig) -> tuple[Table, bool]:
    _require_circuit_size(cfg)
    site = cfg.options["site"]
    if not 0 <= site < cfg.n:
        raise UsageError(f"--site must be in [0, {cfg.n})")
    try:
        kept_count(cfg.n, cfg.effective_cutoff)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = run_expz_coarse(cfg.params, cfg.effective_cutoff, basis_state(cfg.n, [site]), cfg.times)
    rows = ((float(t), s, float(v)) for t, s, v in grid.rows())
    return Table(("t", "site", "z"), rows), True


def cmd_tfd(cfg: RunConfig) -> tuple[Table, bool]:
    _require_circuit_size(cfg)
    _require_dense(cfg)
    betas = cfg.options["betas"]
    if any(b < 0 or not np.isfinite(b) for b in betas):
        raise UsageError("--betas must be finite and >= 0")
    table = run_tfd_entropy_vs_beta(cfg.params, betas)
    rows = ((float(b), ell, float(s)) for b, ell, s in table.rows())
    return Table(("beta", "ell", "entropy"), rows, half_cut=table.half_cut), True


def cmd_entropy(cfg: RunConfig) -> tuple[Table, bool]:
    if cfg.options["state"] == "tfd":
        _require_circuit_size(cfg)
        _require_dense(cfg)
        curve = run_tfd_entropy_vs_beta(cfg.params, [cfg.beta]).curves[0]
    else:
        curve = run_entropy_curve(ground_state(cfg.params))
    if cfg.options.get("fit"):
        try:
            fit = critical_fit(curve)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        header = ("c_fit", "c1", "slope", "intercept", "r_squared_log", "r_squared_linear")
        rows = [tuple(getattr(fit, h) for h in header)]
        return Table(header, rows), True
    rows = ((int(ell), float(s)) for ell, s in zip(curve.lengths, curve.entropies))
    return Table(("ell", "entropy"), rows), True


def cmd_export(cfg: RunConfig) -> tuple[str, bool]:
    _require_circuit_size(cfg)
    kind = cfg.options["circuit"]
    p = cfg.params
    if kind in ("tfd",):
        _require_dense(cfg)
    try:
        builders: dict[str, Callable] = {
            "fourier": lambda: build_fourier(cfg.n),
            "bog": lambda: build_bog_layer(p),
            "udis": lambda: build_udis(p),
            "time": lambda: build_time_evolution(p, cfg.options["t"]),
            "rg": lambda: build_rg(p, cfg.effective_cutoff),
            "laplacian": lambda: build_laplacian(p),
            "tfd": lambda: build_tfd(p),
        }
        return builders[kind]().to_text(), True
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(cfg: RunConfig) -> tuple[Table, bool]:
    _require_circuit_size(cfg)
    _require_dense(cfg)
    results = verify_suite.run_all(cfg.params, seed=cfg.seed)
    rows = [(r.name, "PASS" if r.passed else "FAIL", r.value, r.threshold) for r in results]
    return Table(("check", "status", "value", "threshold"), rows), all(r.passed for r in results)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "rg": cmd_rg,
    "tfd": cmd_tfd,
    "entropy": cmd_entropy,
    "export-circuit": cmd_export,
    "verify": cmd_verify,
}


def _resolve_output(path: str) -> Path:
    out = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def _render(cfg: RunConfig, result) -> str:
    if isinstance(result, str):
        if cfg.fmt == "json":
            return manifest(cfg.record(), circuit=result)
        return result
    if cfg.fmt == "json":
        data = {"header": result.header, "rows": [list(r) for r in result.rows]}
        return manifest(cfg.record(), data=data, **result.extra)
    return csv_text(result.header, result.rows)


def dispatch(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Run the CLI and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        old_err, sys.stderr = sys.stderr, stderr
        try:
            args = parser.parse_args(argv)
        finally:
            sys.stderr = old_err
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = _config(args)
        result, ok = COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"xychain {args.subcommand}: error: {exc}", file=stderr)
        parser.print_usage(stderr)
        return EXIT_USAGE
    text = _render(cfg, result)
    if cfg.output and cfg.output != "-":
        path = _resolve_output(cfg.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        if cfg.fmt == "csv":
            extra = {} if isinstance(result, str) else result.extra
            Path(str(path) + ".json").write_text(manifest(cfg.record(), **extra))
    else:
        stdout.write(text)
    if not ok:
        print(f"xychain {cfg.subcommand}: verification failed", file=stderr)
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
