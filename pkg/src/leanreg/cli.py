"""Command line front end: fit, test, bootstrap, simulate, check.

Input data is CSV with a header row, comma separators and '.' decimals; the
response column is named, every remaining numeric column becomes a covariate
in header order, and an explicit flag prepends an intercept column (the
library never adds one silently). Reports are JSON with the full config
echoed, so any stochastic command can be replayed bit-exactly from its own
output; coverage tables are additionally written as CSV for plotting.

Exit codes: 0 success, 2 usage or config error, 3 data error, 4 numerical
error (singular design and friends).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .bootstrap import region_ellipsoid, region_rectangle, run_bootstrap
from .diagnostics import det_inequality_check, influence_remainder
from .exceptions import (
    EmptyData,
    LeanRegError,
    MissingColumn,
    NonNumericCell,
)
from .inference import max_t_test, t_test
from .ols import Dataset, fit_ols
from .simlab import COVERAGE_METHODS, Dgp, population_targets, run_coverage, sample
from .variance import classical_avar, sandwich_avar

SEED_ENV_VAR = "LEANREG_SEED"

_DATA_ERRORS = (MissingColumn, NonNumericCell, EmptyData, FileNotFoundError)

_REFERENCE_FLAG = {"normal": "std_normal", "t": "student_t", "bootstrap": "bootstrap"}

_FINITE_SAMPLE_WARNING = (
    "asymptotically conservative tests can exceed nominal size in finite "
    "samples; the guarantee is an asymptotic one"
)


def read_csv(path: str, response_column: str, add_intercept: bool = False) -> Dataset:
    """Load a header-prefixed CSV into a Dataset.

    The response column becomes y; all other columns become x in header
    order, optionally behind a prepended ones column. Cells must parse as
    finite numbers; the offending row and column are reported otherwise.
    """
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyData(f"{path} is empty") from None
        header = [h.strip() for h in header]
        if response_column not in header:
            raise MissingColumn(f"response column {response_column!r} not in header {header}")
        y_idx = header.index(response_column)
        rows = []
        for r, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            parsed = []
            for c, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise NonNumericCell(
                        f"{path}: cell {cell!r} at row {r}, column {header[c]!r} is not numeric"
                    ) from None
                if not math.isfinite(value):
                    raise NonNumericCell(
                        f"{path}: non-finite value at row {r}, column {header[c]!r}"
                    )
                parsed.append(value)
            if len(parsed) != len(header):
                raise NonNumericCell(f"{path}: row {r} has {len(parsed)} cells, expected {len(header)}")
            rows.append(parsed)
    if not rows:
        raise EmptyData(f"{path} has a header but no data rows")
    table = np.asarray(rows, dtype=float)
    y = table[:, y_idx]
    x = np.delete(table, y_idx, axis=1)
    if add_intercept:
        x = np.column_stack([np.ones(x.shape[0]), x])
    return Dataset(x=x, y=y)


def write_csv(dataset: Dataset, path: str, response_column: str = "y", feature_names=None) -> None:
    """Write a Dataset back to CSV with shortest round-trip float formatting."""
    names = feature_names or [f"x{j}" for j in range(dataset.p)]
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(names) + [response_column])
        for xi, yi in zip(dataset.x, dataset.y):
            writer.writerow([repr(float(v)) for v in xi] + [repr(float(yi))])


@dataclass
class RunConfig:
    """One resolved CLI invocation; the echo of this is what replay uses."""

    command: str
    data: str | None = None
    response: str | None = None
    add_intercept: bool = False
    variance: str = "hc0"
    weights: str = "gaussian"
    b: int = 1000
    m: int | None = None
    alpha: float = 0.05
    reference: str = "normal"
    coef: int | None = None
    null: str | None = None
    dgp: str | None = None
    noise_scale: float | None = None
    n: int | None = None
    reps: int | None = None
    methods: str | None = None
    seed: int | None = None
    out: str | None = None
    threads: int = 1

    def validate(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.seed is not None and self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        stochastic = self.command in ("bootstrap", "simulate", "check") or (
            self.command == "test" and self.reference == "bootstrap"
        )
        if stochastic and self.seed is None:
            raise ValueError(
                f"command {self.command!r} is stochastic; pass --seed or set {SEED_ENV_VAR}"
            )


@dataclass
class Report:
    command: str
    config: dict
    results: dict
    warnings: list


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):  # bool first: Python bools are ints
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def report_json(report: Report) -> str:
    payload = {
        "command": report.command,
        "config": _jsonable(report.config),
        "results": _jsonable(report.results),
        "warnings": list(report.warnings),
    }
    return json.dumps(payload, sort_keys=True, indent=2)


def _variance_for(fit, kind: str):
    if kind == "classical":
        return classical_avar(fit)
    return sandwich_avar(fit, dof_correct=(kind == "hc1"))


def _load_dataset(config: RunConfig) -> Dataset:
    if config.data is None or config.response is None:
        raise ValueError(f"command {config.command!r} requires --data and --response")
    return read_csv(config.data, config.response, config.add_intercept)


def _make_dgp(config: RunConfig) -> Dgp:
    if config.dgp is None:
        raise ValueError(f"command {config.command!r} requires --dgp")
    return Dgp(kind=config.dgp, noise_scale=config.noise_scale)


def _parse_null(config: RunConfig, p: int) -> np.ndarray:
    if config.null is None:
        return np.zeros(p)
    parts = [float(v) for v in str(config.null).split(",")]
    if len(parts) == 1:
        return np.full(p, parts[0])
    if len(parts) != p:
        raise ValueError(f"--null has {len(parts)} entries, expected 1 or {p}")
    return np.asarray(parts)


def _cmd_fit(config: RunConfig) -> Report:
    data = _load_dataset(config)
    fit = fit_ols(data)
    sand = sandwich_avar(fit)
    results = {
        "n": fit.n,
        "p": fit.p,
        "beta_hat": fit.beta_hat,
        "se_sandwich_hc0": sand.se,
        "avar_sandwich_hc0": sand.avar,
        "k_check": sand.meat,
        "sigma_hat": fit.sigma_hat,
    }
    warnings = []
    if fit.n > fit.p:
        classical = classical_avar(fit)
        results["se_classical"] = classical.se
        results["sigma2_classical"] = float(classical.meat[0, 0] / fit.sigma_hat[0, 0])
        results["se_sandwich_hc1"] = sandwich_avar(fit, dof_correct=True).se
    else:
        results["se_classical"] = None
        warnings.append("n == p: classical and HC1 standard errors are undefined")
    return Report("fit", dataclasses.asdict(config), results, warnings)


def _cmd_test(config: RunConfig) -> Report:
    data = _load_dataset(config)
    fit = fit_ols(data)
    var = _variance_for(fit, config.variance)
    reference = _REFERENCE_FLAG[config.reference]
    draws = None
    if reference == "bootstrap":
        draws = run_bootstrap(
            fit, "multiplier", b=config.b, dist=config.weights,
            seed=config.seed, threads=config.threads,
        )
    null = _parse_null(config, fit.p)
    warnings = [_FINITE_SAMPLE_WARNING]
    if config.coef is not None:
        res = t_test(fit, var, config.coef, float(null[config.coef]), reference, draws=draws)
    else:
        res = max_t_test(fit, var, null, reference, draws=draws)
        if reference != "bootstrap":
            warnings.append(
                "max-|t| with a normal/t reference uses a Bonferroni bound; "
                "the bootstrap reference is recommended"
            )
    results = {
        "statistic": res.statistic,
        "p_value": res.p_value,
        "reference": res.reference,
        "conservative": res.conservative,
        "target_coord": res.target_coord,
        "null_value": res.null_value,
        "df": res.df,
        "b": res.b,
        "variance_method": var.method,
    }
    return Report("test", dataclasses.asdict(config), results, warnings)


def _cmd_bootstrap(config: RunConfig) -> Report:
    data = _load_dataset(config)
    fit = fit_ols(data)
    if config.variance == "classical":
        raise ValueError("bootstrap regions studentize with a sandwich variance; use hc0 or hc1")
    var = _variance_for(fit, config.variance)
    method = "resample_m_of_n" if config.m is not None else "multiplier"
    draws = run_bootstrap(
        fit, method, b=config.b, m=config.m, dist=config.weights,
        seed=config.seed, threads=config.threads,
    )
    rect = region_rectangle(fit, draws, var, config.alpha)
    ellip = region_ellipsoid(fit, draws, config.alpha)
    results = {
        "beta_hat": fit.beta_hat,
        "method": draws.method,
        "b": draws.b,
        "m": draws.m,
        "weight_dist": draws.dist,
        "level": 1.0 - config.alpha,
        "rectangle_half_widths": rect.half_widths,
        "ellipsoid_quad_form": ellip.quad_form,
        "ellipsoid_radius": ellip.radius,
        "draws_mean": draws.draws_t.mean(axis=0),
        "draws_cov": np.cov(draws.draws_t.T, bias=True),
        "k_check": var.meat,
        "se_used": var.se,
    }
    return Report("bootstrap", dataclasses.asdict(config), results, [])


def _cmd_simulate(config: RunConfig) -> Report:
    dgp = _make_dgp(config)
    if config.n is None or config.reps is None:
        raise ValueError("simulate requires --n and --reps")
    methods = (
        tuple(m.strip() for m in config.methods.split(","))
        if config.methods
        else tuple(m for m in COVERAGE_METHODS if m != "max_t_bootstrap")
    )
    report = run_coverage(
        dgp,
        n=config.n,
        replications=config.reps,
        methods=methods,
        alpha=config.alpha,
        seed=config.seed,
        b=config.b,
        weight_dist=config.weights,
        threads=config.threads,
    )
    results = {
        "scenario": report.scenario,
        "n": report.n,
        "replications": report.replications,
        "alpha": report.alpha,
        "methods": list(report.methods),
        "coverage": report.coverage,
        "coverage_se": report.coverage_se,
        "mean_width": report.mean_width,
        "rejection_rate": report.rejection_rate,
        "rejection_se": report.rejection_se,
        "excluded": report.excluded,
    }
    warnings = []
    if report.excluded:
        warnings.append(f"{report.excluded} replication(s) excluded for singular designs")
    return Report("simulate", dataclasses.asdict(config), results, warnings)


def _coverage_csv_rows(results: dict):
    rows = [("method", "metric", "coordinate", "value")]
    for method, values in sorted(results["coverage"].items()):
        for j, v in enumerate(values):
            rows.append((method, "coverage", j, repr(float(v))))
        for j, v in enumerate(results["coverage_se"][method]):
            rows.append((method, "coverage_se", j, repr(float(v))))
    for method, values in sorted(results["mean_width"].items()):
        for j, v in enumerate(values):
            rows.append((method, "mean_width", j, repr(float(v))))
    for method, v in sorted(results["rejection_rate"].items()):
        rows.append((method, "rejection_rate", "", repr(float(v))))
        rows.append((method, "rejection_se", "", repr(float(results["rejection_se"][method]))))
    return rows


def _cmd_check(config: RunConfig) -> Report:
    dgp = _make_dgp(config)
    if config.n is None:
        raise ValueError("check requires --n")
    pop = population_targets(dgp, config.n)
    data = sample(dgp, config.n, np.random.default_rng(np.random.SeedSequence(config.seed)))
    fit = fit_ols(data)
    det = det_inequality_check(fit.sigma_hat, fit.gamma_hat, pop.sigma_n, pop.gamma_n)
    remainder = influence_remainder(fit, pop.sigma_n, pop.beta_n, pop.score_means)
    results = {
        "beta_hat": fit.beta_hat,
        "beta_n": pop.beta_n,
        "deterministic_inequality": dataclasses.asdict(det),
        "influence_remainder": remainder,
        "estimation_error_norm": float(np.linalg.norm(fit.beta_hat - pop.beta_n)),
    }
    warnings = []
    if det.precondition_holds and not (det.sandwich_ok and det.remainder_ok):
        warnings.append("deterministic inequality violated beyond slack; this indicates a bug")
    return Report("check", dataclasses.asdict(config), results, warnings)


_COMMANDS = {
    "fit": _cmd_fit,
    "test": _cmd_test,
    "bootstrap": _cmd_bootstrap,
    "simulate": _cmd_simulate,
    "check": _cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leanreg",
        description="Assumption-lean least squares: estimation, conservative inference, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data_flags(p):
        p.add_argument("--data", help="input CSV path (header row required)")
        p.add_argument("--response", help="name of the response column")
        p.add_argument("--add-intercept", action="store_true", help="prepend a ones column")

    def add_common_flags(p):
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (or {SEED_ENV_VAR})")
        p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
        p.add_argument("--threads", type=int, default=1, help="worker cap; never changes results")

    p_fit = sub.add_parser("fit", help="fit OLS and report classical vs sandwich SEs")
    add_data_flags(p_fit)
    add_common_flags(p_fit)

    p_test = sub.add_parser("test", help="conservative t or max-|t| test")
    add_data_flags(p_test)
    p_test.add_argument("--coef", type=int, default=None, help="coordinate to test; omit for max-|t|")
    p_test.add_argument("--null", default=None, help="null value(s), comma separated or scalar")
    p_test.add_argument("--variance", choices=("classical", "hc0", "hc1"), default="hc0")
    p_test.add_argument("--reference", choices=("normal", "t", "bootstrap"), default="normal")
    p_test.add_argument("--weights", choices=("gaussian", "rademacher"), default="gaussian")
    p_test.add_argument("--B", dest="b", type=int, default=1000, help="bootstrap replicates")
    add_common_flags(p_test)

    p_boot = sub.add_parser("bootstrap", help="score bootstrap and confidence regions")
    add_data_flags(p_boot)
    p_boot.add_argument("--variance", choices=("hc0", "hc1"), default="hc0")
    p_boot.add_argument("--weights", choices=("gaussian", "rademacher"), default="gaussian")
    p_boot.add_argument("--B", dest="b", type=int, default=1000)
    p_boot.add_argument(
        "--m", type=int, default=None,
        help="resample size; passing it switches to the m-of-n resampling bootstrap",
    )
    p_boot.add_argument("--alpha", type=float, default=0.05)
    add_common_flags(p_boot)

    p_sim = sub.add_parser("simulate", help="Monte Carlo coverage / type-I error study")
    p_sim.add_argument("--dgp", required=True, help="scenario kind")
    p_sim.add_argument("--noise-scale", dest="noise_scale", type=float, default=None)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--reps", type=int, required=True)
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--B", dest="b", type=int, default=1000)
    p_sim.add_argument("--weights", choices=("gaussian", "rademacher"), default="gaussian")
    p_sim.add_argument("--methods", default=None, help="comma list; default all interval/region methods")
    add_common_flags(p_sim)

    p_check = sub.add_parser("check", help="deterministic inequality and linear-representation check")
    p_check.add_argument("--dgp", required=True)
    p_check.add_argument("--noise-scale", dest="noise_scale", type=float, default=None)
    p_check.add_argument("--n", type=int, required=True)
    add_common_flags(p_check)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {f.name for f in dataclasses.fields(RunConfig)}
    values = {k: v for k, v in vars(args).items() if k in fields}
    config = RunConfig(**values)
    if config.seed is None and os.environ.get(SEED_ENV_VAR):
        config.seed = int(os.environ[SEED_ENV_VAR])
    return config


def run_command(config: RunConfig) -> Report:
    """Dispatch a validated config to its command implementation."""
    config.validate()
    return _COMMANDS[config.command](config)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    try:
        report = run_command(config)
    except ValueError as exc:
        parser.exit(2, f"leanreg: config error: {exc}\n")
    except _DATA_ERRORS as exc:
        payload = {
            "command": config.command,
            "config": _jsonable(dataclasses.asdict(config)),
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2), config.out)
        return 3
    except LeanRegError as exc:
        payload = {
            "command": config.command,
            "config": _jsonable(dataclasses.asdict(config)),
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2), config.out)
        return 4
    text = report_json(report)
    _emit(text, config.out)
    if config.command == "simulate" and config.out:
        base = config.out[:-5] if config.out.endswith(".json") else config.out
        with open(base + ".csv", "w", newline="", encoding="utf-8") as handle:
            csv.writer(handle).writerows(_coverage_csv_rows(report.results))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
