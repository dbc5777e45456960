"""
Monte Carlo driver: one work item per (class, trial) cell.

A cell draws its trial seed from the master seed, generates A, pattern and X
once, and sweeps the SNR grid (only the noise stream depends on the SNR).
Every algorithm of the cell sees identical (A, X, Y). Cells share nothing and
results are sorted before they are returned, so the output does not depend
on worker count or completion order.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional

from core.config import settings
from core.exceptions import BizError
from modules.sbl import SolveReport, msbl_em, tv_sbl
from modules.signal_gen import TrialData, dictionary_seed, generate_trial, trial_seed

from .metrics import nmse, support_score, top_k_support
from .schemas import AlgorithmSpec, ExperimentConfig, TrialRecord

logger = logging.getLogger(__name__)


def solve_trial(algorithm: AlgorithmSpec, data: TrialData) -> SolveReport:
    opts = algorithm.solver_options()
    if algorithm.is_baseline:
        return msbl_em(data.dictionary, data.measurements, opts=opts)
    return tv_sbl(data.dictionary, data.measurements, algorithm.to_regularizer(), opts)


def score_trial(
    algorithm: AlgorithmSpec,
    data: TrialData,
    trial: int,
    report: SolveReport,
    elapsed: float,
) -> TrialRecord:
    K = data.truth.pattern.K
    estimate = report.posterior.means
    score = support_score(top_k_support(estimate, K), data.truth.support)
    return TrialRecord(
        sparsity_class=data.sparsity_class,
        snr_db=data.snr_db,
        algorithm=algorithm.name,
        trial=trial,
        seed=data.seed,
        nmse=nmse(estimate, data.truth.X),
        f1=score.f1,
        tp=score.tp,
        fa=score.fa,
        mis=score.mis,
        outer_iters=report.outer_iters_used,
        converged=report.converged,
        wall_time_seconds=elapsed,
    )


def _failed_record(algorithm: AlgorithmSpec, data: TrialData, trial: int, exc: Exception, elapsed: float) -> TrialRecord:
    message = exc.message if isinstance(exc, BizError) else f"{type(exc).__name__}: {exc}"
    return TrialRecord(
        sparsity_class=data.sparsity_class,
        snr_db=data.snr_db,
        algorithm=algorithm.name,
        trial=trial,
        seed=data.seed,
        failed=True,
        error=" ".join(str(message).split()),
        wall_time_seconds=elapsed,
    )


def run_algorithm(algorithm: AlgorithmSpec, data: TrialData, trial: int) -> TrialRecord:
    started = time.perf_counter()
    try:
        report = solve_trial(algorithm, data)
        return score_trial(algorithm, data, trial, report, time.perf_counter() - started)
    except Exception as exc:
        logger.warning(
            "trial failed: class=%s snr=%g algo=%s trial=%d seed=%d: %s",
            data.sparsity_class, data.snr_db, algorithm.name, trial, data.seed, exc,
        )
        return _failed_record(algorithm, data, trial, exc, time.perf_counter() - started)


def run_cell(config: ExperimentConfig, sparsity_class: str, trial: int) -> List[TrialRecord]:
    seed = trial_seed(config.master_seed, sparsity_class, trial)
    a_seed = dictionary_seed(config.master_seed, sparsity_class, seed, config.fix_dictionary)
    records: List[TrialRecord] = []
    for snr_db in config.snr_grid_db:
        data = generate_trial(sparsity_class, snr_db, config.N, config.M, config.L, config.K, seed, a_seed)
        for algorithm in config.algorithms:
            records.append(run_algorithm(algorithm, data, trial))
    return records


def _make_executor(kind: str, workers: int) -> Executor:
    if kind == "thread":
        return ThreadPoolExecutor(max_workers=workers)
    return ProcessPoolExecutor(max_workers=workers)


def run_experiment(
    config: ExperimentConfig,
    progress: Optional[Callable[[int, int], None]] = None,
) -> List[TrialRecord]:
    cells = [(cls, trial) for cls in config.classes for trial in range(config.trials)]
    workers = config.workers or settings.bench_workers
    kind = config.executor or settings.bench_executor
    logger.info(
        "experiment: %d cells x %d snr x %d algorithms, workers=%d (%s)",
        len(cells), len(config.snr_grid_db), len(config.algorithms), workers, kind,
    )
    started = time.perf_counter()
    records: List[TrialRecord] = []

    if workers <= 1 or len(cells) <= 1:
        for done, (cls, trial) in enumerate(cells, start=1):
            records.extend(run_cell(config, cls, trial))
            if progress:
                progress(done, len(cells))
    else:
        with _make_executor(kind, min(workers, len(cells))) as pool:
            futures = {pool.submit(run_cell, config, cls, trial): (cls, trial) for cls, trial in cells}
            for done, future in enumerate(as_completed(futures), start=1):
                records.extend(future.result())
                if progress:
                    progress(done, len(cells))

    records.sort(key=TrialRecord.sort_key)
    failures = sum(1 for r in records if r.failed)
    logger.info("experiment finished: %d records, %d failed (%.1fs)", len(records), failures, time.perf_counter() - started)
    return records
