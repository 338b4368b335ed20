"""
Command-line interface.

    lqrecover solve     --design X.csv --observation y.csv --penalty lq --q 0.5 --lambda auto --sigma 0.01
    lqrecover certify   --design X.csv --q 0.5 --s 1 --t 1 --a 1
    lqrecover bounds    --q 1 --a 3 --sigma 0.01 --m 100 --n 1024
    lqrecover sweep     --preset paper --trials 2 --methods l1 --out-dir results
    lqrecover example1  --draws 500 --out-dir results
    lqrecover tables    --input results/aggregated.csv --out-dir results

Exit codes: 0 success, 1 usage or data error, 2 solver did not converge.
"""

import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, List, Optional

import click
import numpy as np
import pandas as pd

from lqrecover import __version__
from lqrecover.bounds import TuningParams, UniversalConstants, bounds_report, epsilon_default, lambda_default
from lqrecover.config import (
    LADDER_FACTORS,
    ExperimentConfig,
    MethodSpec,
    SearchConfig,
    SolverOptions,
    config_digest,
    sample_size_ladder,
)
from lqrecover.core import check_problem
from lqrecover.exceptions import ConfigurationError, LqRecoverError
from lqrecover.experiments import example1_lambda_grid, run_sweep, tables_layout, verify_example1, write_sweep_outputs
from lqrecover.experiments.sweep import CSV_FLOAT_FORMAT
from lqrecover.logging import cli_level, configure_logging
from lqrecover.matrix_files import RunManifest, read_matrix, read_vector
from lqrecover.penalties import PenaltyKind, PenaltySpec
from lqrecover.regularity import RecParams, certify as certify_design
from lqrecover.solvers import irl1_constrained_solve, prox_gradient_solve


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2
JOBS_ENVVAR = "LQRECOVER_JOBS"


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _emit_json(data: Any, output: Optional[str]) -> None:
    text = json.dumps(data, indent=2, default=_json_default)
    if output:
        Path(output).write_text(text + "\n", encoding="utf-8")
        logger.info("Wrote %s", output)
    else:
        click.echo(text)


def _parse_auto(value: str, name: str) -> Optional[float]:
    """None for 'auto', otherwise a positive float."""
    if value.strip().lower() == "auto":
        return None
    try:
        number = float(value)
    except ValueError as e:
        raise click.BadParameter(f"expected a number or 'auto', got {value!r}", param_hint=name) from e
    if not number > 0:
        raise click.BadParameter(f"must be positive, got {number}", param_hint=name)
    return number


def _split_list(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
@click.option("--quiet", "-q", is_flag=True, help="Log warnings and errors only.")
@click.option("--log-file", type=click.Path(dir_okay=False), default=None, help="Also log to this file.")
@click.version_option(__version__, prog_name="lqrecover")
def cli(verbose: bool, quiet: bool, log_file: Optional[str]) -> None:
    """Sparse recovery with ℓq penalties: solvers, regularity certificates, bounds and experiments."""
    configure_logging(level=cli_level(verbose, quiet), log_file=log_file, export=True)


@cli.command()
@click.option("--design", required=True, type=click.Path(exists=True, dir_okay=False), help="Matrix file with X.")
@click.option("--observation", required=True, type=click.Path(exists=True, dir_okay=False), help="Matrix file with y.")
@click.option("--problem", type=click.Choice(["regularized", "constrained"]), default="regularized", show_default=True)
@click.option("--penalty", type=click.Choice([k.value for k in PenaltyKind]), default="l1", show_default=True)
@click.option("--q", "q", type=float, default=None, help="Exponent for lq (and for constrained problems).")
@click.option("--lambda", "lam", default="auto", show_default=True, help="λ, or 'auto' for the theory rule.")
@click.option("--epsilon", default="auto", show_default=True, help="ε of a constrained problem, or 'auto' for σ√(5m).")
@click.option("--sigma", type=float, default=None, help="Noise level used by the 'auto' rules.")
@click.option("--a", "a", type=float, default=3.0, show_default=True)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--b", "b", type=float, default=0.0, show_default=True)
@click.option("--r", "r", type=float, default=1.0, show_default=True, help="Radius r ≥ ‖β*‖_q of the λ rule.")
@click.option("--max-iters", type=int, default=1000, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--step", default="auto", show_default=True, help="Step size or 'auto' for 1/L.")
@click.option("--trace-tail", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized solver starts.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout.")
@click.pass_context
def solve(ctx: click.Context, design: str, observation: str, problem: str, penalty: str, q: Optional[float],
          lam: str, epsilon: str, sigma: Optional[float], a: float, theta: float, b: float, r: float,
          max_iters: int, tol: float, step: str, trace_tail: int, seed: int, output: Optional[str]) -> None:
    """Solve one regularized or constrained problem."""
    X, y = check_problem(read_matrix(design), read_vector(observation))
    m, n = X.shape
    opts = SolverOptions(max_iters=max_iters, tol=tol, step=_parse_auto(step, "--step"), seed=seed)
    kind = PenaltyKind(penalty)
    exponent = {PenaltyKind.L1: 1.0, PenaltyKind.L0: 0.0}.get(kind, q)

    def need_sigma(what: str) -> float:
        if sigma is None:
            raise ConfigurationError(f"--sigma is required for --{what} auto")
        return sigma

    payload: dict = {"problem": problem, "seed": seed}
    if problem == "constrained":
        if kind not in (PenaltyKind.LQ, PenaltyKind.L1):
            raise ConfigurationError("Constrained problems take --penalty lq or l1")
        if exponent is None:
            raise ConfigurationError("--q is required for --penalty lq")
        eps = _parse_auto(epsilon, "--epsilon")
        if eps is None:
            eps = epsilon_default(need_sigma("epsilon"), m)
        result = irl1_constrained_solve(X, y, eps, exponent, opts)
        payload["epsilon"] = eps
        payload["q"] = exponent
    else:
        value = _parse_auto(lam, "--lambda")
        if value is None:
            if kind not in (PenaltyKind.LQ, PenaltyKind.L1) or exponent is None:
                raise ConfigurationError("--lambda auto is defined for --penalty lq (with --q) or l1")
            p = TuningParams(sigma=need_sigma("lambda"), m=m, n=n, a=a, theta=theta, b=b, r=r, q=exponent)
            value = lambda_default(p).lam
        pen = PenaltySpec(kind, value, q=q if kind is PenaltyKind.LQ else None)
        result = prox_gradient_solve(X, y, pen, opts)
        payload["penalty"] = pen.to_dict()
    payload["lambda"] = payload.get("penalty", {}).get("lambda")
    payload.update(result.to_dict(trace_tail=trace_tail))
    _emit_json(payload, output)
    if not result.converged:
        logger.warning("Solver stopped at the iteration cap without converging")
        ctx.exit(EXIT_NOT_CONVERGED)


@cli.command()
@click.option("--design", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--q", "q", type=float, required=True)
@click.option("--s", "s", type=int, required=True)
@click.option("--t", "t", type=int, default=None, help="Defaults to s.")
@click.option("--a", "a", type=float, default=1.0, show_default=True)
@click.option("--num-starts", type=int, default=200, show_default=True)
@click.option("--max-iters", type=int, default=500, show_default=True)
@click.option("--budget", type=int, default=10 ** 6, show_default=True, help="Largest subset enumeration.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def certify(design: str, q: float, s: int, t: Optional[int], a: float, num_starts: int, max_iters: int,
            budget: int, seed: int, output: Optional[str]) -> None:
    """Estimate φ_q(s, t, a, X) and check the sufficient conditions."""
    X = read_matrix(design)
    rec = RecParams(q, s, s if t is None else t, a)
    search = SearchConfig(num_starts=num_starts, max_iters=max_iters, seed=seed, budget=budget)
    _emit_json(certify_design(X, rec, search).to_dict(), output)


@cli.command()
@click.option("--q", "q", type=float, default=1.0, show_default=True)
@click.option("--a", "a", type=float, default=3.0, show_default=True)
@click.option("--sigma", type=float, required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--b", "b", type=float, default=0.0, show_default=True)
@click.option("--r", "r", type=float, default=1.0, show_default=True)
@click.option("--s", "s", type=int, default=1, show_default=True)
@click.option("--t", "t", type=int, default=None, help="Defaults to s.")
@click.option("--phi", type=float, default=None, help="φ_q(s, t, a, X) of a fixed design.")
@click.option("--phi-sigma-half", type=float, default=None, help="φ_q(s, t, a, Σ^{1/2}) of a random design.")
@click.option("--zeta", type=float, default=1.0, show_default=True, help="ζ(Σ) = max_j Σ_jj.")
@click.option("--c1", type=float, default=1.0)
@click.option("--c2", type=float, default=1.0)
@click.option("--c3", type=float, default=1.0)
@click.option("--c4", type=float, default=1.0)
@click.option("--tau", type=float, default=1.0)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
def bounds(q: float, a: float, sigma: float, m: int, n: int, theta: float, b: float, r: float, s: int,
           t: Optional[int], phi: Optional[float], phi_sigma_half: Optional[float], zeta: float,
           c1: float, c2: float, c3: float, c4: float, tau: float, output: Optional[str]) -> None:
    """Print the tuning values, bounds, probability floors and sample sizes."""
    p = TuningParams(sigma=sigma, m=m, n=n, a=a, theta=theta, b=b, r=r, q=q)
    constants = UniversalConstants(c1, c2, c3, c4, tau)
    _emit_json(bounds_report(p, s, t, phi, phi_sigma_half, zeta, constants), output)


def _sweep_config(config_file: Optional[str], preset: str, trials: Optional[int], n: Optional[int], s: Optional[int],
                  sigma: Optional[float], methods: Optional[str], sample_sizes: Optional[str],
                  seed: Optional[int]) -> ExperimentConfig:
    config = ExperimentConfig.from_file(config_file) if config_file else ExperimentConfig.from_dict({"preset": preset})
    changes: dict = {}
    if n is not None:
        changes["n"] = n
        if s is None:
            changes["s"] = max(1, round(0.1 * n))
    if s is not None:
        changes["s"] = s
    if trials is not None:
        changes["num_trials"] = trials
    if sigma is not None:
        changes["sigma"] = sigma
    if seed is not None:
        changes["master_seed"] = seed
    names = _split_list(methods)
    if names:
        changes["methods"] = [MethodSpec.from_name(name) for name in names]
    sizes = _split_list(sample_sizes)
    if sizes:
        try:
            changes["sample_sizes"] = [int(v) for v in sizes]
        except ValueError as e:
            raise click.BadParameter(f"expected comma-separated integers, got {sample_sizes!r}",
                                     param_hint="--sample-sizes") from e
    elif n is not None:
        changes["sample_sizes"] = sample_size_ladder(changes.get("s", config.s), n, LADDER_FACTORS)
    return config.replace(**changes) if changes else config


@cli.command()
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="YAML/JSON configuration or a previous run manifest.")
@click.option("--preset", type=click.Choice(["paper"]), default="paper", show_default=True)
@click.option("--trials", type=int, default=None, help="Trials per cell.")
@click.option("--n", "n", type=int, default=None, help="Number of features (rescales s and the m ladder).")
@click.option("--s", "s", type=int, default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--methods", default=None, help="Comma-separated method names, e.g. 'l1,l1/2,cp-l1'.")
@click.option("--sample-sizes", default=None, help="Comma-separated values of m.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--jobs", type=int, default=-1, envvar=JOBS_ENVVAR, show_default=True,
              help=f"Worker processes (-1: all cores). Falls back to ${JOBS_ENVVAR}.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
def sweep(config_file: Optional[str], preset: str, trials: Optional[int], n: Optional[int], s: Optional[int],
          sigma: Optional[float], methods: Optional[str], sample_sizes: Optional[str], seed: Optional[int],
          jobs: int, out_dir: str) -> None:
    """Run the sample-size sweep and write per-trial and aggregated CSVs."""
    config = _sweep_config(config_file, preset, trials, n, s, sigma, methods, sample_sizes, seed)
    manifest = RunManifest(tool_version=__version__, command="sweep", config=config.to_dict(),
                           config_hash=config.config_hash(), master_seed=config.master_seed)
    result = run_sweep(config, n_jobs=jobs)
    for role, path in write_sweep_outputs(result, out_dir).items():
        manifest.add_output(role, path)
    manifest.finish()
    manifest.write(Path(out_dir) / "manifest.json")
    for metric in ("sensitivity", "specificity"):
        click.echo(f"{metric}:")
        click.echo(tables_layout(result.aggregated, metric).to_string(float_format=lambda v: f"{v:.4f}"))


@cli.command()
@click.option("--draws", type=int, default=500, show_default=True, help="Noise draws per λ.")
@click.option("--num-lambdas", type=int, default=25, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-std", is_flag=True, help="Read the noise level 0.01 as a standard deviation.")
@click.option("--a", "a", type=float, default=1.0, show_default=True)
@click.option("--jobs", type=int, default=-1, envvar=JOBS_ENVVAR, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="results", show_default=True)
def example1(draws: int, num_lambdas: int, seed: int, noise_std: bool, a: float, jobs: int, out_dir: str) -> None:
    """Bound coverage of ℓ1/2 and ℓ1 regularization on X = [[2,3,1],[2,1,3]]."""
    settings = {"draws": draws, "num_lambdas": num_lambdas, "seed": seed, "noise_std": noise_std, "a": a}
    manifest = RunManifest(tool_version=__version__, command="example1", config=settings,
                           config_hash=config_digest(settings), master_seed=seed)
    report = verify_example1(example1_lambda_grid(num_lambdas), draws, seed, noise_std, a, n_jobs=jobs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    coverage_path = out / "example1_coverage.csv"
    report.table.to_csv(coverage_path, index=False, float_format=CSV_FLOAT_FORMAT)
    summary_path = out / "example1_summary.json"
    summary_path.write_text(json.dumps(report.summary(), indent=2, default=_json_default), encoding="utf-8")
    manifest.add_output("coverage", coverage_path)
    manifest.add_output("summary", summary_path)
    manifest.finish()
    manifest.write(out / "example1_manifest.json")
    click.echo(report.table.to_string(index=False))


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="aggregated.csv written by 'sweep'.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Defaults to the input's folder.")
def tables(input_path: str, out_dir: Optional[str]) -> None:
    """Rewrite an aggregated sweep table as method × m tables."""
    aggregated = pd.read_csv(input_path)
    out = Path(out_dir) if out_dir else Path(input_path).parent
    out.mkdir(parents=True, exist_ok=True)
    for metric in ("sensitivity", "specificity"):
        try:
            table = tables_layout(aggregated, metric)
        except KeyError as e:
            raise ConfigurationError(f"{input_path} is not an aggregated sweep table: {e}") from e
        path = out / f"{metric}_table.csv"
        table.to_csv(path, index_label="method", float_format=CSV_FLOAT_FORMAT)
        click.echo(f"{metric}:")
        click.echo(table.to_string(float_format=lambda v: "nan" if math.isnan(v) else f"{v:.4f}"))
        logger.info("Wrote %s", path)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point returning the process exit code."""
    try:
        code = cli.main(args=argv, prog_name="lqrecover", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_ERROR
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except LqRecoverError as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
