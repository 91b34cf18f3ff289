"""Command-line front end: capacity points, sweeps, bounds and validation.

Exit codes: 0 success, 1 invalid flags or config values, 2 optimizer
non-convergence (capacity command), 3 I/O failure. Numbers in tabular
output carry 12 significant digits with lowercase exponents so repeated
runs diff byte-for-byte.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, validate
from .fock import DephasingParams
from .optimize import (
    CapacityResult,
    OptimizerConfig,
    asymptotic_capacity,
    capacity_sweep,
    maximize_coherent_information,
    maximize_over_ansatz,
    two_point_lower_bound,
)

THREADS_ENV_VAR = "DEPHCAP_THREADS"


def fmt(x: float) -> str:
    """12 significant digits, lowercase exponent, locale independent."""
    return format(float(x), ".12g")


def _config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _provenance(payload: dict, timestamp: bool) -> dict:
    prov = {"version": __version__, "config_hash": _config_hash(payload)}
    if timestamp:
        prov["timestamp"] = datetime.now(timezone.utc).isoformat()
    return prov


@dataclass(frozen=True)
class ResultRecord:
    """Flattened result fields plus provenance, printable as key=value lines.

    Values round-trip losslessly at the printed precision; timestamps are
    attached to interactive stdout records only, never to sweep files.
    """

    fields: dict

    @classmethod
    def build(cls, fields: dict, inputs: dict, timestamp: bool = True) -> "ResultRecord":
        merged = dict(fields)
        merged.update(_provenance(inputs, timestamp))
        return cls(merged)

    def to_kv_text(self) -> str:
        lines = []
        for key, value in self.fields.items():
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = fmt(value)
            else:
                text = str(value)
            lines.append(f"{key}={text}")
        return "\n".join(lines)


def _print_record(record: ResultRecord) -> None:
    print(record.to_kv_text())


def _capacity_record(result: CapacityResult, inputs: dict) -> ResultRecord:
    rec: dict = {
        "gamma": result.gamma,
        "N": result.n_max,
        "q_bits": result.q_bits,
        "converged": result.converged,
        "iterations": result.iterations,
        "gradient_residual": result.gradient_residual,
        "mean_energy": result.mean_energy(),
    }
    if result.p_opt is not None:
        for m, pm in enumerate(result.p_opt.p):
            rec[f"p_{m}"] = float(pm)
    return ResultRecord.build(rec, inputs)


# ---------------------------------------------------------------------------
# sweep configuration

@dataclass
class SweepConfig:
    gamma_grid: list[float]
    n_grid: list[int]
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    output_path: str = "sweep.csv"
    format: str = "csv"

    def __post_init__(self):
        if not self.gamma_grid or not self.n_grid:
            raise ValueError("gamma and N grids must be nonempty")
        if any(g < 0 for g in self.gamma_grid):
            raise ValueError("gamma values must be >= 0")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("N values must be >= 1")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be 'csv' or 'json'")

    def canonical(self) -> dict:
        payload = {
            "gamma_grid": self.gamma_grid,
            "n_grid": self.n_grid,
            "optimizer": asdict(self.optimizer),
            "format": self.format,
        }
        return payload


def _parse_float_list(text: str) -> list[float]:
    items = text.replace(",", " ").split()
    if not items:
        raise ValueError("empty list")
    return [float(tok) for tok in items]


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def load_sweep_config(path: str) -> SweepConfig:
    """Flat key-value file with [grid], [optimizer] and [output] sections."""
    parser = configparser.ConfigParser()
    with open(path, "r", encoding="utf-8") as handle:
        parser.read_file(handle)
    grid = parser["grid"] if parser.has_section("grid") else {}
    gammas: list[float] = []
    if "gamma" in grid:
        gammas = _parse_float_list(grid["gamma"])
    elif "gamma_start" in grid:
        count = int(grid["gamma_count"])
        gammas = list(
            np.linspace(float(grid["gamma_start"]), float(grid["gamma_stop"]), count)
        )
    ns = _parse_int_list(grid["n"]) if "n" in grid else []
    opt_kwargs = {}
    if parser.has_section("optimizer"):
        sec = parser["optimizer"]
        if "objective_tolerance" in sec:
            opt_kwargs["objective_tolerance"] = float(sec["objective_tolerance"])
        if "max_iterations" in sec:
            opt_kwargs["max_iterations"] = int(sec["max_iterations"])
        if "restarts" in sec:
            opt_kwargs["restarts"] = int(sec["restarts"])
        if "gradient_mode" in sec:
            opt_kwargs["gradient_mode"] = sec["gradient_mode"]
        if "seed" in sec:
            opt_kwargs["seed"] = int(sec["seed"])
    out_path = "sweep.csv"
    out_format = "csv"
    if parser.has_section("output"):
        out_path = parser["output"].get("path", out_path)
        out_format = parser["output"].get("format", out_format)
    return SweepConfig(gammas, ns, OptimizerConfig(**opt_kwargs), out_path, out_format)


def _sweep_rows(results: list[CapacityResult], n_cols: int) -> list[list[str]]:
    rows = []
    for res in results:
        row = [
            fmt(res.gamma),
            str(res.n_max),
            fmt(res.q_bits),
            "true" if res.converged else "false",
            str(res.iterations),
            fmt(res.mean_energy()) if res.p_opt is not None else "",
        ]
        probs = ["" for _ in range(n_cols)]
        if res.p_opt is not None:
            for m, pm in enumerate(res.p_opt.p):
                probs[m] = fmt(pm)
        rows.append(row + probs)
    return rows


def write_sweep_csv(results: list[CapacityResult], path: str) -> None:
    n_cols = max(res.n_max for res in results) + 1
    header = ["gamma", "N", "q_bits", "converged", "iterations", "mean_energy"]
    header += [f"p_{m}" for m in range(n_cols)]
    lines = [",".join(header)]
    lines += [",".join(row) for row in _sweep_rows(results, n_cols)]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def write_sweep_json(results: list[CapacityResult], path: str, config: SweepConfig) -> None:
    body = {
        "provenance": _provenance(config.canonical(), timestamp=False),
        "results": [
            {
                "gamma": res.gamma,
                "N": res.n_max,
                "q_bits": res.q_bits,
                "converged": res.converged,
                "iterations": res.iterations,
                "gradient_residual": res.gradient_residual,
                "mean_energy": res.mean_energy() if res.p_opt is not None else None,
                "p": list(map(float, res.p_opt.p)) if res.p_opt is not None else None,
            }
            for res in results
        ],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(body, handle, indent=1, allow_nan=True)
        handle.write("\n")


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    """argparse flavor whose usage errors exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _nonneg_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value >= 0.0):
        raise argparse.ArgumentTypeError(f"must be a finite value >= 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _add_optimizer_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None, help="optimizer seed")
    sub.add_argument("--restarts", type=_positive_int, default=None)
    sub.add_argument("--max-iterations", type=_positive_int, default=None)
    sub.add_argument("--objective-tolerance", type=float, default=None)
    sub.add_argument(
        "--gradient-mode", choices=("analytic", "finite_difference"), default=None
    )


def _optimizer_from_flags(args, base: OptimizerConfig | None = None) -> OptimizerConfig:
    cfg = base if base is not None else OptimizerConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.restarts is not None:
        overrides["restarts"] = args.restarts
    if args.max_iterations is not None:
        overrides["max_iterations"] = args.max_iterations
    if args.objective_tolerance is not None:
        overrides["objective_tolerance"] = args.objective_tolerance
    if args.gradient_mode is not None:
        overrides["gradient_mode"] = args.gradient_mode
    if not overrides:
        return cfg
    merged = asdict(cfg)
    merged.update(overrides)
    return OptimizerConfig(**merged)


def build_parser() -> _Parser:
    parser = _Parser(prog="dephcap", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dephcap {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    cap = subs.add_parser("capacity", parents=[], help="optimize one (N, gamma) point")
    cap.add_argument("--n", type=_positive_int, required=True, help="truncation level N")
    cap.add_argument("--gamma", type=_nonneg_float, required=True)
    _add_optimizer_flags(cap)

    swp = subs.add_parser("sweep", help="optimize a (gamma, N) grid to a table file")
    swp.add_argument("--config", help="INI-style sweep configuration file")
    swp.add_argument("--gammas", help="comma/space separated gamma grid (overrides file)")
    swp.add_argument("--gamma-start", type=_nonneg_float)
    swp.add_argument("--gamma-stop", type=_nonneg_float)
    swp.add_argument("--gamma-count", type=_positive_int)
    swp.add_argument("--ns", help="comma/space separated N grid (overrides file)")
    swp.add_argument("--output", help="output table path (overrides file)")
    swp.add_argument("--format", choices=("csv", "json"), default=None)
    swp.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help=f"worker threads (default: ${THREADS_ENV_VAR} or machine parallelism)",
    )
    _add_optimizer_flags(swp)

    low = subs.add_parser("lower-bound", help="two-point coherent-information bound")
    low.add_argument("--gamma", type=_nonneg_float, required=True)
    low.add_argument("--j", type=_positive_int, default=1, help="level separation")

    ans = subs.add_parser("ansatz", help="discrete-Gaussian width search")
    ans.add_argument("--n", type=_positive_int, required=True)
    ans.add_argument("--gamma", type=_nonneg_float, required=True)

    asy = subs.add_parser("asymptotic", help="large-gamma formula at the optimal input")
    asy.add_argument("--n", type=_positive_int, required=True)
    asy.add_argument("--gamma", type=_nonneg_float, required=True)
    _add_optimizer_flags(asy)

    val = subs.add_parser("validate", help="run the cross-oracle suites")
    val.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


# ---------------------------------------------------------------------------
# commands

def cmd_capacity(args) -> int:
    cfg = _optimizer_from_flags(args)
    result = maximize_coherent_information(args.n, DephasingParams(args.gamma), cfg)
    inputs = {"command": "capacity", "n": args.n, "gamma": args.gamma, "optimizer": asdict(cfg)}
    _print_record(_capacity_record(result, inputs))
    return 0 if result.converged else 2


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            print(f"ignoring non-integer {THREADS_ENV_VAR}={env!r}", file=sys.stderr)
    return os.cpu_count() or 1


def cmd_sweep(args) -> int:
    if args.config:
        try:
            config = load_sweep_config(args.config)
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return 3
        except (configparser.Error, KeyError, ValueError) as exc:
            print(f"invalid config: {exc}", file=sys.stderr)
            return 1
    else:
        config = None

    gammas = config.gamma_grid if config else []
    ns = config.n_grid if config else []
    if args.gammas:
        gammas = _parse_float_list(args.gammas)
    elif args.gamma_start is not None:
        if args.gamma_stop is None or args.gamma_count is None:
            print("--gamma-start requires --gamma-stop and --gamma-count", file=sys.stderr)
            return 1
        gammas = list(np.linspace(args.gamma_start, args.gamma_stop, args.gamma_count))
    if args.ns:
        ns = _parse_int_list(args.ns)
    base = config.optimizer if config else OptimizerConfig()
    optimizer = _optimizer_from_flags(args, base)
    out_path = args.output or (config.output_path if config else "sweep.csv")
    out_format = args.format or (config.format if config else "csv")
    try:
        merged = SweepConfig(gammas, ns, optimizer, out_path, out_format)
    except ValueError as exc:
        print(f"invalid sweep configuration: {exc}", file=sys.stderr)
        return 1

    results = capacity_sweep(
        merged.gamma_grid, merged.n_grid, merged.optimizer, max_workers=_resolve_threads(args)
    )
    try:
        if merged.format == "csv":
            write_sweep_csv(results, merged.output_path)
        else:
            write_sweep_json(results, merged.output_path, merged)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(results)} rows to {merged.output_path}")
    return 0


def cmd_lower_bound(args) -> int:
    bound = two_point_lower_bound(DephasingParams(args.gamma), args.j)
    inputs = {"command": "lower-bound", "gamma": args.gamma, "j": args.j}
    record = ResultRecord.build(
        {
            "gamma": bound.gamma,
            "j": bound.j,
            "q_plus": bound.q_plus,
            "q_minus": bound.q_minus,
            "value_bits": bound.value_bits,
        },
        inputs,
    )
    _print_record(record)
    return 0


def cmd_ansatz(args) -> int:
    sigma_opt, q_bits = maximize_over_ansatz(args.n, DephasingParams(args.gamma))
    inputs = {"command": "ansatz", "n": args.n, "gamma": args.gamma}
    record = ResultRecord.build(
        {"gamma": args.gamma, "N": args.n, "sigma_opt": sigma_opt, "q_bits": q_bits}, inputs
    )
    _print_record(record)
    return 0


def cmd_asymptotic(args) -> int:
    cfg = _optimizer_from_flags(args)
    result = maximize_coherent_information(args.n, DephasingParams(args.gamma), cfg)
    value = asymptotic_capacity(result.p_opt, DephasingParams(args.gamma))
    inputs = {"command": "asymptotic", "n": args.n, "gamma": args.gamma, "optimizer": asdict(cfg)}
    record = ResultRecord.build(
        {
            "gamma": args.gamma,
            "N": args.n,
            "q_asymptotic_bits": value,
            "q_optimizer_bits": result.q_bits,
        },
        inputs,
    )
    _print_record(record)
    return 0


def cmd_validate(args) -> int:
    outcomes = validate.run_validation(args.level)
    for res in outcomes:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
    return 0 if all(res.passed for res in outcomes) else 1


_DISPATCH = {
    "capacity": cmd_capacity,
    "sweep": cmd_sweep,
    "lower-bound": cmd_lower_bound,
    "ansatz": cmd_ansatz,
    "asymptotic": cmd_asymptotic,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _DISPATCH[args.command](args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
