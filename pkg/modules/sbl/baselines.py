"""Unregularized M-SBL reference, fitted by EM."""
from __future__ import annotations

import logging
import time
from typing import Any, Optional

import numpy as np

from .mm_outer import finalize_report, resolve_lambda
from .model import (
    check_dimensions,
    cost_from_factor,
    dictionary_entries,
    factor_covariance,
    measurement_values,
)
from .regularizers import TVRegularizer
from .types import SolveReport, SolverOptions

logger = logging.getLogger(__name__)


def em_update(A: np.ndarray, Y: np.ndarray, gamma: np.ndarray, lam: float) -> np.ndarray:
    """gamma_i <- (1/L) sum_l mu_{l,i}^2 + [Sigma_x]_ii"""
    chol = factor_covariance(A, gamma, lam)
    means = gamma[:, None] * (A.T @ chol.solve(Y))
    gram_diag = np.sum(A * chol.solve(A), axis=0)
    variances = np.maximum(gamma - gamma ** 2 * gram_diag, 0.0)
    return np.mean(means ** 2, axis=1) + variances


def msbl_em(
    A: Any,
    Y: Any,
    lam: Optional[float] = None,
    opts: Optional[SolverOptions] = None,
) -> SolveReport:
    entries = dictionary_entries(A)
    values = measurement_values(Y)
    lam = resolve_lambda(Y, lam)
    opts = opts or SolverOptions.from_settings()
    n = entries.shape[1]
    check_dimensions(entries, np.zeros(n), values)

    started = time.perf_counter()
    none = TVRegularizer.none()
    gamma = opts.initial_gamma(n)
    cost_trace = [cost_from_factor(values, gamma, factor_covariance(entries, gamma, lam), none)]
    converged = False
    used = 0

    for j in range(1, opts.max_outer_iters + 1):
        used = j
        nxt = np.maximum(em_update(entries, values, gamma, lam), opts.gamma_floor)
        change = float(np.linalg.norm(nxt - gamma)) / max(float(np.linalg.norm(gamma)), 1e-12)
        gamma = nxt
        cost_trace.append(cost_from_factor(values, gamma, factor_covariance(entries, gamma, lam), none))
        logger.debug("em %d: cost=%.10g change=%.3e", j, cost_trace[-1], change)
        if change < opts.outer_tol:
            converged = True
            break

    logger.info(
        "msbl_em finished: iters=%d converged=%s cost=%.6g (%.2fs)",
        used, converged, cost_trace[-1], time.perf_counter() - started,
    )
    return finalize_report(entries, values, lam, gamma, opts.gamma_floor, cost_trace, used, converged)
