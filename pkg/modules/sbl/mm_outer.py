"""
Outer majorization-minimization loop of TV-SBL.

Each outer step linearizes L*log det Sigma_y at the current gamma, refreshes
the TV edge weights (all ones for linear TV, reweighted for log TV) and hands
the convex subproblem to ``inner_solver.solve_subproblem``.
"""
from __future__ import annotations

import logging
import time
from dataclasses import replace
from typing import Any, Optional

import numpy as np

from core.exceptions import ConvergenceError, InputError

from .inner_solver import solve_subproblem
from .model import (
    CovarianceFactor,
    check_dimensions,
    check_lambda,
    cost_from_factor,
    datafit_term,
    dictionary_entries,
    factor_covariance,
    gamma_values,
    measurement_values,
    posterior_from_factor,
)
from .regularizers import TVRegularizer
from .types import MeasurementSet, SolveReport, SolverOptions, SubproblemDiagnostics

logger = logging.getLogger(__name__)


def resolve_lambda(Y: Any, lam: Optional[float]) -> float:
    if lam is not None:
        return check_lambda(lam)
    if isinstance(Y, MeasurementSet):
        return Y.noise_variance
    raise InputError("noise variance required when Y is a raw array")


def _weights_from_factor(A: np.ndarray, chol: CovarianceFactor) -> np.ndarray:
    return np.sum(A * chol.solve(A), axis=0)


def logdet_majorizer_weights(A: Any, gamma_j: Any, lam: float) -> np.ndarray:
    """w_i = a_i^T Sigma_y(gamma_j)^{-1} a_i, the gradient of log det Sigma_y at gamma_j."""
    entries = dictionary_entries(A)
    g = gamma_values(gamma_j)
    check_dimensions(entries, g)
    chol = factor_covariance(entries, g, check_lambda(lam))
    return _weights_from_factor(entries, chol)


def majorized_cost(
    A: Any,
    Y: Any,
    gamma: Any,
    w: Any,
    u: Any,
    reg: Optional[TVRegularizer] = None,
    lam: Optional[float] = None,
) -> float:
    """L * w^T gamma + sum_l y_l^T Sigma_y(gamma)^{-1} y_l + beta * sum_i u_i |gamma_{i+1} - gamma_i|."""
    entries = dictionary_entries(A)
    values = measurement_values(Y)
    g = gamma_values(gamma)
    check_dimensions(entries, g, values)
    n = g.shape[0]
    w_arr = np.asarray(w, dtype=np.float64).ravel()
    u_arr = np.asarray(u, dtype=np.float64).ravel()
    if w_arr.shape != (n,) or u_arr.shape != (max(n - 1, 0),):
        raise InputError(f"w must have length {n} and u length {max(n - 1, 0)}")
    beta = (reg or TVRegularizer.none()).effective_beta
    chol = factor_covariance(entries, g, resolve_lambda(Y, lam))
    tv = beta * float(np.sum(u_arr * np.abs(np.diff(g)))) if n > 1 else 0.0
    return float(values.shape[1] * np.dot(w_arr, g) + datafit_term(values, chol) + tv)


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    return float(np.linalg.norm(new - old)) / max(float(np.linalg.norm(old)), 1e-12)


def _outer_step(
    entries: np.ndarray,
    values: np.ndarray,
    lam: float,
    w: np.ndarray,
    u: np.ndarray,
    beta: float,
    gamma: np.ndarray,
    opts: SolverOptions,
    outer_iter: int,
) -> tuple[np.ndarray, SubproblemDiagnostics]:
    nxt, diag = solve_subproblem(
        entries, values, lam, w, u, beta, gamma,
        opts=opts.inner, gamma_floor=opts.gamma_floor, raise_on_failure=False,
    )
    if diag.converged:
        return nxt, diag

    logger.warning(
        "outer iteration %d: subproblem KKT residual %.3e > %.3e, retrying with %dx mid iterations",
        outer_iter, diag.kkt_residual, diag.kkt_threshold, opts.inner_retry_factor,
    )
    retry_inner = replace(opts.inner, max_mid_iters=opts.inner.max_mid_iters * opts.inner_retry_factor)
    nxt, retry = solve_subproblem(
        entries, values, lam, w, u, beta, nxt,
        opts=retry_inner, gamma_floor=opts.gamma_floor, raise_on_failure=False,
    )
    if not retry.converged:
        raise ConvergenceError(
            f"subproblem of outer iteration {outer_iter} not certified: "
            f"KKT residual {retry.kkt_residual:.3e} above {retry.kkt_threshold:.3e}",
            diagnostics={"outer_iter": outer_iter, **retry.as_dict()},
        )
    merged = replace(
        retry,
        objective_trace=diag.objective_trace + retry.objective_trace[1:],
        admm_iters_total=diag.admm_iters_total + retry.admm_iters_total,
        mid_iters_used=diag.mid_iters_used + retry.mid_iters_used,
        admm_failures=diag.admm_failures + retry.admm_failures,
        newton_steps=diag.newton_steps + retry.newton_steps,
    )
    return nxt, merged


def finalize_report(
    entries: np.ndarray,
    values: np.ndarray,
    lam: float,
    gamma: np.ndarray,
    floor: float,
    cost_trace: list[float],
    outer_iters_used: int,
    converged: bool,
    diagnostics: tuple[SubproblemDiagnostics, ...] = (),
) -> SolveReport:
    """Report floor values as exact zeros and evaluate the posterior at the reported gamma."""
    reported = np.where(gamma <= floor, 0.0, gamma)
    chol = factor_covariance(entries, reported, lam)
    post = posterior_from_factor(entries, values, reported, chol)
    reported.setflags(write=False)
    return SolveReport(
        gamma_final=reported,
        posterior=post,
        cost_trace=tuple(cost_trace),
        outer_iters_used=outer_iters_used,
        converged=converged,
        diagnostics=diagnostics,
    )


def tv_sbl(
    A: Any,
    Y: Any,
    reg: Optional[TVRegularizer] = None,
    opts: Optional[SolverOptions] = None,
    lam: Optional[float] = None,
) -> SolveReport:
    """Type-II estimate of gamma under a TV hyperprior, followed by the posterior mean."""
    entries = dictionary_entries(A)
    values = measurement_values(Y)
    lam = resolve_lambda(Y, lam)
    reg = reg or TVRegularizer.none()
    opts = opts or SolverOptions.from_settings()
    n = entries.shape[1]
    check_dimensions(entries, np.zeros(n), values)
    if np.any(np.linalg.norm(entries, axis=0) == 0.0):
        raise InputError("dictionary has an all-zero column")

    started = time.perf_counter()
    gamma = opts.initial_gamma(n)
    chol = factor_covariance(entries, gamma, lam)
    cost_trace = [cost_from_factor(values, gamma, chol, reg)]
    diagnostics: list[SubproblemDiagnostics] = []
    converged = False
    used = 0

    for j in range(1, opts.max_outer_iters + 1):
        used = j
        w = _weights_from_factor(entries, chol)
        u = reg.edge_weights(gamma)
        nxt, diag = _outer_step(entries, values, lam, w, u, reg.effective_beta, gamma, opts, j)
        diagnostics.append(diag)
        change = _relative_change(nxt, gamma)
        gamma = nxt
        chol = factor_covariance(entries, gamma, lam)
        cost_trace.append(cost_from_factor(values, gamma, chol, reg))
        logger.debug("outer %d: cost=%.10g change=%.3e mid=%d", j, cost_trace[-1], change, diag.mid_iters_used)
        if change < opts.outer_tol:
            converged = True
            break

    logger.info(
        "tv_sbl[%s] finished: outer=%d converged=%s cost=%.6g (%.2fs)",
        reg.label(), used, converged, cost_trace[-1], time.perf_counter() - started,
    )
    return finalize_report(entries, values, lam, gamma, opts.gamma_floor, cost_trace, used, converged, tuple(diagnostics))
