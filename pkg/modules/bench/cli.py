"""
Benchmark command line: ``run`` an experiment, ``demo`` one trial, ``gen`` a
dataset dump, ``tune`` the TV weights.

Exit codes: 0 success, 2 bad input/config, 3 solver non-convergence,
4 internal numerical failure.
"""
from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
import numpy as np

from core.config import settings
from core.exceptions import BizError
from modules.signal_gen import TrialData, dictionary_seed, dump_trial, generate_trial, trial_seed

from .aggregate import aggregate
from .config_file import build_config, load_experiment_config
from .csv_io import emit_csv
from .metrics import f1_score, nmse
from .runner import run_experiment, solve_trial
from .schemas import AlgorithmSpec, ExperimentConfig
from .tuning import BETA_GRID, EPSILON_GRID, tune

logger = logging.getLogger(__name__)


def _fail(exc: BizError) -> None:
    click.echo(f"error: {exc.message}", err=True)
    if exc.payload:
        click.echo(f"detail: {exc.payload}", err=True)
    sys.exit(exc.exit_code)


def _preset(quick: bool, full: bool) -> str:
    if quick and full:
        raise click.UsageError("--quick and --full are mutually exclusive")
    return "quick" if quick else "full" if full else "default"


def _pick_algorithms(config: ExperimentConfig, names: Tuple[str, ...]) -> Optional[list]:
    if not names:
        return None
    known = {a.name: a for a in config.algorithms}
    picked = []
    for name in names:
        if name in known:
            picked.append(known[name])
        elif name in ("msbl", "linear-tv", "log-tv", "none"):
            picked.append(AlgorithmSpec(name=name, regularizer=name))
        else:
            raise click.BadParameter(f"unknown algorithm {name!r}; known: {sorted(known)}", param_hint="--algo")
    return [a.model_dump() for a in picked]


def _load(
    config_path: Optional[str],
    quick: bool,
    full: bool,
    overrides: Dict[str, Any],
    algos: Tuple[str, ...] = (),
) -> ExperimentConfig:
    config = load_experiment_config(config_path, preset=_preset(quick, full), overrides=overrides)
    picked = _pick_algorithms(config, algos)
    if picked is not None:
        config = build_config({**config.model_dump(), "algorithms": picked}, source=config_path)
    return config


def _single_trial(config: ExperimentConfig, sparsity_class: str, snr_db: float, trial: int) -> TrialData:
    seed = trial_seed(config.master_seed, sparsity_class, trial)
    a_seed = dictionary_seed(config.master_seed, sparsity_class, seed, config.fix_dictionary)
    return generate_trial(sparsity_class, snr_db, config.N, config.M, config.L, config.K, seed, a_seed)


@click.group()
@click.option("--log-level", default=None, help="Override LOG_LEVEL for this invocation.")
def cli(log_level: Optional[str]) -> None:
    """TV-SBL benchmark harness."""
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
    )


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="YAML experiment config.")
@click.option("--snr", "snr", type=float, multiple=True, help="SNR grid in dB (repeatable).")
@click.option("--trials", type=int, default=None)
@click.option("--class", "classes", multiple=True, help="Sparsity class (repeatable).")
@click.option("--algo", "algos", multiple=True, help="Algorithm name from the config, or msbl/linear-tv/log-tv.")
@click.option("--seed", type=int, default=None, help="Master seed.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Records CSV path.")
@click.option("--quick", is_flag=True, help="50 trials, SNR {0, 10, 20}.")
@click.option("--full", is_flag=True, help="200 trials, SNR 0:5:20.")
@click.option("--workers", type=int, default=None)
@click.option("--executor", type=click.Choice(["process", "thread"]), default=None)
@click.option("--fix-dictionary", is_flag=True, default=None, help="One dictionary per class for the whole sweep.")
@click.option("--timing", is_flag=True, help="Add wall_time_seconds to the records CSV.")
def run(config_path, snr, trials, classes, algos, seed, out, quick, full, workers, executor, fix_dictionary, timing) -> None:
    """Run an SNR sweep and write records plus aggregate CSVs."""
    try:
        config = _load(
            config_path,
            quick,
            full,
            {
                "snr_grid_db": list(snr) or None,
                "trials": trials,
                "classes": list(classes) or None,
                "master_seed": seed,
                "output_path": out,
                "workers": workers,
                "executor": executor,
                "fix_dictionary": fix_dictionary or None,
            },
            algos,
        )
        with click.progressbar(length=len(config.classes) * config.trials, label="trials", file=sys.stderr) as bar:
            records = run_experiment(config, progress=lambda done, total: bar.update(1))
        records_path = emit_csv(records, config.resolved_output_path(), kind="records", timing=timing)
        rows = aggregate(records)
        aggregate_path = emit_csv(rows, config.resolved_aggregate_path(), kind="aggregate")
    except BizError as exc:
        _fail(exc)
        return
    failures = sum(1 for r in records if r.failed)
    click.echo(f"records:   {records_path} ({len(records)} rows, {failures} failed)")
    click.echo(f"aggregate: {aggregate_path} ({len(rows)} rows)")


@cli.command()
@click.option("--class", "sparsity_class", default="homogeneous", show_default=True)
@click.option("--snr", type=float, default=20.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trial", type=int, default=0, show_default=True)
@click.option("--algo", "algos", multiple=True, help="Algorithms to run (default: all configured).")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
def demo(sparsity_class, snr, seed, trial, algos, config_path) -> None:
    """Solve one trial and print gamma profiles and supports."""
    try:
        config = _load(config_path, False, False, {"master_seed": seed}, algos)
        data = _single_trial(config, sparsity_class, snr, trial)
        click.echo(f"class={data.sparsity_class} snr={data.snr_db:g} dB seed={data.seed} lambda={data.noise_variance:.6g}")
        click.echo(f"blocks={list(data.truth.pattern.blocks)}")
        click.echo(f"true support={list(data.truth.support)}")
        for algorithm in config.algorithms:
            report = solve_trial(algorithm, data)
            support = report.support(data.truth.pattern.K)
            click.echo(f"--- {algorithm.name}")
            click.echo(f"outer_iters={report.outer_iters_used} converged={report.converged}")
            click.echo(f"nmse={nmse(report.posterior.means, data.truth.X):.6g} f1={f1_score(support, data.truth.support):.3f}")
            click.echo(f"support={support}")
            profile = np.array2string(np.asarray(report.gamma_profile()), precision=4, max_line_width=120, threshold=10_000)
            click.echo(f"gamma={profile}")
    except BizError as exc:
        _fail(exc)


@cli.command()
@click.option("--class", "sparsity_class", default="homogeneous", show_default=True)
@click.option("--snr", type=float, default=20.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trial", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True, help="Output directory.")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
def gen(sparsity_class, snr, seed, trial, out_dir, config_path) -> None:
    """Dump one generated trial (A, X, Y, pattern, lambda)."""
    try:
        config = _load(config_path, False, False, {"master_seed": seed})
        data = _single_trial(config, sparsity_class, snr, trial)
        written = dump_trial(data, Path(out_dir))
    except BizError as exc:
        _fail(exc)
        return
    for path in written:
        click.echo(str(path))


@cli.command(name="tune")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None)
@click.option("--class", "sparsity_class", default="homogeneous", show_default=True)
@click.option("--snr", type=float, default=20.0, show_default=True)
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--beta", "betas", type=float, multiple=True, help=f"Beta grid (default {list(BETA_GRID)}).")
@click.option("--epsilon", "epsilons", type=float, multiple=True, help=f"Epsilon grid for log-tv (default {list(EPSILON_GRID)}).")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Grid CSV path.")
@click.option("--workers", type=int, default=None)
def tune_command(config_path, sparsity_class, snr, trials, seed, betas, epsilons, out, workers) -> None:
    """Grid-search beta (and epsilon for log-tv) by median NMSE."""
    try:
        config = _load(config_path, False, False, {"master_seed": seed, "workers": workers})
        result = tune(config, sparsity_class, snr, betas or BETA_GRID, epsilons or EPSILON_GRID, trials)
        target = Path(out) if out else Path(settings.results_dir) / "tune.csv"
        emit_csv(result.rows, target, kind="aggregate")
    except BizError as exc:
        _fail(exc)
        return
    click.echo(f"grid: {target}")
    for kind, spec in result.winners.items():
        detail = f"beta={spec.beta:g}" + (f" epsilon={spec.epsilon:g}" if spec.epsilon is not None else "")
        click.echo(f"{kind}: {spec.name} ({detail})")
