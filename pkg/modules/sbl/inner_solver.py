"""
Convex subproblem of one outer MM step:

    F(gamma) = L * w^T gamma + sum_l y_l^T Sigma_y(gamma)^{-1} y_l + beta * sum_i u_i |gamma_{i+1} - gamma_i|

over gamma >= floor. The data-fit term is majorized by its variational bound
r + sum_i c_i / gamma_i (tight at the current point), which leaves a
separable-plus-weighted-TV problem solved by ADMM. That step moves the
iterate and sorts coordinates into fused groups; a projected Newton phase on
the exact F over the resulting group pattern then drives the iterate onto the
optimum, including coordinates that belong on the floor. Answers are
certified by the projected KKT residual of F.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solveh_banded
from scipy.optimize import lsq_linear

from core.config import settings
from core.exceptions import ContractError, ConvergenceError, InputError

from .model import (
    CovarianceFactor,
    check_lambda,
    dictionary_entries,
    factor_covariance,
    measurement_values,
)
from .types import InnerOptions, SubproblemDiagnostics

logger = logging.getLogger(__name__)

_NEWTON_MAX_ITERS = 50
_ARMIJO_SIGMA = 1e-4

# mid loop
_IDENTIFY_ADMM_ITERS = 500
_NEWTON_STEPS = 30
_NEWTON_STATIONARY = 0.1  # fraction of the KKT threshold
_FUSE_LEVELS = (1e-7, 1e-9)
_ACTIVE_RATIO = 1e-3
_MAX_STEP_RATIO = 10.0


# ==================== shared evaluations ====================

@dataclass(frozen=True)
class _Evaluation:
    chol: CovarianceFactor
    projections: np.ndarray  # A^T Sigma_y^{-1} Y, N x L

    @classmethod
    def at(cls, A: np.ndarray, Y: np.ndarray, gamma: np.ndarray, lam: float) -> "_Evaluation":
        chol = factor_covariance(A, gamma, lam)
        return cls(chol=chol, projections=A.T @ chol.solve(Y))

    def datafit(self, Y: np.ndarray) -> float:
        return float(np.sum(Y * self.chol.solve(Y)))

    def datafit_gradient(self) -> np.ndarray:
        return -np.sum(self.projections ** 2, axis=1)

    def datafit_hessian(self, A: np.ndarray) -> np.ndarray:
        """2 (A^T Sigma_y^{-1} A) * (P P^T), elementwise; P = A^T Sigma_y^{-1} Y."""
        gram = A.T @ self.chol.solve(A)
        return 2.0 * gram * (self.projections @ self.projections.T)


def _diff_transpose(v: np.ndarray) -> np.ndarray:
    """D^T v for the first-difference operator D (length n-1 -> n)."""
    padded = np.concatenate(([0.0], v, [0.0]))
    return -np.diff(padded)


def _tv(u: np.ndarray, beta: float, gamma: np.ndarray) -> float:
    if beta == 0.0 or u.size == 0:
        return 0.0
    return float(beta * np.sum(u * np.abs(np.diff(gamma))))


def _vector(value: Any, name: str, length: Optional[int] = None) -> np.ndarray:
    array = np.asarray(value, dtype=np.float64).ravel()
    if not np.all(np.isfinite(array)):
        raise InputError(f"{name} contains non-finite values")
    if length is not None and array.shape[0] != length:
        raise ContractError(f"{name} has length {array.shape[0]}, expected {length}")
    return array


def _check_beta(beta: float) -> float:
    value = float(beta)
    if not math.isfinite(value) or value < 0.0:
        raise InputError(f"beta must be >= 0, got {beta}")
    return value


# ==================== data-fit bound ====================

def _coefficients(A: np.ndarray, Y: np.ndarray, gamma: np.ndarray, lam: float, ev: _Evaluation) -> tuple[np.ndarray, float]:
    means = gamma[:, None] * ev.projections
    c = np.sum(means ** 2, axis=1)
    residual = Y - A @ means
    r = float(np.sum(residual ** 2) / lam)
    return c, r


def datafit_coefficients(A: Any, Y: Any, gamma_tilde: Any, lam: float) -> tuple[np.ndarray, float]:
    """
    Coefficients (c, r) of the bound sum_l y_l^T Sigma_y^{-1} y_l <= r + sum_i c_i / gamma_i,
    tight at ``gamma_tilde``.
    """
    entries = dictionary_entries(A)
    values = measurement_values(Y)
    gamma = _vector(gamma_tilde, "gamma_tilde", entries.shape[1])
    if np.any(gamma < 0.0):
        raise InputError("gamma_tilde must be nonnegative")
    if values.shape[0] != entries.shape[0]:
        raise ContractError(f"measurements have {values.shape[0]} rows, dictionary has M={entries.shape[0]}")
    lam = check_lambda(lam)
    ev = _Evaluation.at(entries, values, gamma, lam)
    return _coefficients(entries, values, gamma, lam, ev)


# ==================== separable + weighted TV (ADMM) ====================

@dataclass
class AdmmState:
    z: np.ndarray
    s: np.ndarray
    rho: float
    iters: int = 0
    primal_residual: float = 0.0
    dual_residual: float = 0.0
    converged: bool = True


def separable_objective(a: np.ndarray, c: np.ndarray, u: np.ndarray, beta: float, gamma: np.ndarray) -> float:
    return float(np.sum(a * gamma + _ratio(c, gamma)) + _tv(u, beta, gamma))


def _closed_form(a: np.ndarray, c: np.ndarray, floor: float) -> np.ndarray:
    return np.maximum(np.sqrt(c / a), floor)


def _ratio(c: np.ndarray, denom: np.ndarray) -> np.ndarray:
    """c / denom with 0 wherever c == 0."""
    with np.errstate(divide="ignore", over="ignore"):
        return np.divide(c, denom, out=np.zeros_like(c), where=c > 0.0)


def _xupdate_objective(a, c, gamma, v, rho) -> float:
    gap = np.diff(gamma) - v
    return float(np.sum(a * gamma + _ratio(c, gamma)) + 0.5 * rho * np.dot(gap, gap))


def _tridiagonal_solve(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    bands = np.zeros((2, diag.size))
    bands[0, 1:] = off
    bands[1, :] = diag
    return solveh_banded(bands, rhs, lower=False, check_finite=False)


def _newton_xupdate(
    a: np.ndarray,
    c: np.ndarray,
    gamma: np.ndarray,
    v: np.ndarray,
    rho: float,
    floor: float,
) -> np.ndarray:
    """Projected Newton for min sum(a*g + c/g) + rho/2 ||Dg - v||^2 over g >= floor."""
    n = gamma.size
    lower = max(floor, 1e-300)
    gamma = np.maximum(gamma, lower)
    dtd_diag = np.full(n, 2.0)
    dtd_diag[0] = dtd_diag[-1] = 1.0
    value = _xupdate_objective(a, c, gamma, v, rho)
    for _ in range(_NEWTON_MAX_ITERS):
        grad = a - _ratio(c, gamma ** 2) + rho * _diff_transpose(np.diff(gamma) - v)
        curvature = 2.0 * _ratio(c, gamma ** 3)
        projected = gamma - np.maximum(gamma - grad, lower)
        eps_active = min(1e-3 * float(np.max(gamma)), float(np.linalg.norm(projected)))
        active = (gamma - lower <= eps_active) & (grad > 0.0)
        free = np.flatnonzero(~active)

        hess_diag = curvature + rho * dtd_diag
        step = np.zeros(n)
        if free.size:
            diag_f = hess_diag[free]
            off_f = np.where(np.diff(free) == 1, -rho, 0.0)
            damping = 1e-14 * float(np.max(diag_f)) + 1e-300
            try:
                step[free] = _tridiagonal_solve(diag_f + damping, off_f, grad[free])
            except (LinAlgError, ValueError):
                step[free] = grad[free] / (diag_f + damping)
        if active.any():
            step[active] = grad[active] / np.maximum(hess_diag[active], 1e-300)

        decrement = float(np.dot(grad[free], step[free])) if free.size else 0.0
        if decrement <= 1e-14 * (1.0 + abs(value)) and np.all(gamma[active] <= lower):
            break

        t = 1.0
        accepted = False
        for _halving in range(60):
            candidate = np.maximum(gamma - t * step, lower)
            cand_value = _xupdate_objective(a, c, candidate, v, rho)
            expected = t * decrement
            if active.any():
                expected += float(np.dot(grad[active], (gamma - candidate)[active]))
            if math.isfinite(cand_value) and cand_value <= value - _ARMIJO_SIGMA * expected:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        moved = float(np.max(np.abs(candidate - gamma)))
        gamma, value = candidate, cand_value
        if moved <= 1e-15 * (1.0 + float(np.max(gamma))):
            break
    return gamma


def _soft_threshold(x: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - thresholds, 0.0)


def _polish(
    a: np.ndarray,
    c: np.ndarray,
    u: np.ndarray,
    beta: float,
    floor: float,
    z: np.ndarray,
) -> Optional[np.ndarray]:
    """Exact minimizer for the fused-group/sign pattern read off z, if consistent."""
    weights = beta * u
    fused = (z == 0.0) & (weights > 0.0)
    group_id = np.concatenate(([0], np.cumsum(~fused)))
    signs = np.where(fused, 0.0, np.sign(z))
    coef = a + _diff_transpose(weights * signs)
    alpha = np.bincount(group_id, weights=coef)
    total_c = np.bincount(group_id, weights=c)
    if np.any(alpha <= 0.0):
        return None
    values = np.maximum(np.sqrt(total_c / alpha), floor)
    gamma = values[group_id]
    steps = np.diff(gamma)
    boundary = ~fused & (weights > 0.0)
    if np.any(signs[boundary] * steps[boundary] < 0.0):
        return None
    return gamma


def solve_separable_tv(
    w: np.ndarray,
    c: np.ndarray,
    u: np.ndarray,
    beta: float,
    L: int,
    gamma_floor: float,
    opts: Optional[InnerOptions] = None,
    gamma_init: Optional[np.ndarray] = None,
    warm: Optional[AdmmState] = None,
    raise_on_failure: bool = True,
) -> tuple[np.ndarray, AdmmState]:
    """
    ADMM on the separable-plus-TV problem. When the iteration budget runs out
    the current iterate is returned with ``state.converged`` False, unless
    ``raise_on_failure`` asks for a ConvergenceError.
    """
    opts = opts or InnerOptions.from_settings()
    a = float(L) * w
    n = a.size
    floor = float(gamma_floor)
    closed = _closed_form(a, c, floor)
    if n == 1 or beta == 0.0 or not np.any(u > 0.0):
        return closed, AdmmState(z=np.diff(closed), s=np.zeros(max(n - 1, 0)), rho=opts.admm_rho)
    if not np.any(c > 0.0):
        flat = np.full(n, floor)
        return flat, AdmmState(z=np.zeros(n - 1), s=np.zeros(n - 1), rho=opts.admm_rho)

    start = closed if gamma_init is None else np.maximum(np.asarray(gamma_init, dtype=np.float64), floor)
    start_value = separable_objective(a, c, u, beta, start)
    gamma = start.copy()
    if warm is not None and warm.z.shape == (n - 1,):
        z, s, rho = warm.z.copy(), warm.s.copy(), float(warm.rho)
    else:
        z, s, rho = np.diff(gamma), np.zeros(n - 1), float(opts.admm_rho)

    thresholds = beta * u
    state = AdmmState(z=z, s=s, rho=rho, converged=False)
    for k in range(1, opts.max_admm_iters + 1):
        gamma = _newton_xupdate(a, c, gamma, z - s, rho, floor)
        dg = np.diff(gamma)
        z_old = z
        z = _soft_threshold(dg + s, thresholds / rho)
        s = s + dg - z

        primal = float(np.linalg.norm(dg - z))
        dual = float(rho * np.linalg.norm(_diff_transpose(z - z_old)))
        eps_pri = math.sqrt(n - 1) * opts.admm_tol_primal + opts.admm_tol_rel * max(
            float(np.linalg.norm(dg)), float(np.linalg.norm(z))
        )
        eps_dual = math.sqrt(n) * opts.admm_tol_dual + opts.admm_tol_rel * float(
            np.linalg.norm(rho * _diff_transpose(s))
        )
        state = AdmmState(z=z, s=s, rho=rho, iters=k, primal_residual=primal, dual_residual=dual, converged=False)
        if primal <= eps_pri and dual <= eps_dual:
            state.converged = True
            break
        # residual balancing
        if primal > 10.0 * dual:
            rho *= 2.0
            s = s / 2.0
        elif dual > 10.0 * primal:
            rho /= 2.0
            s = s * 2.0

    if not state.converged and raise_on_failure:
        raise ConvergenceError(
            "ADMM did not converge for the separable TV problem",
            diagnostics={
                "admm_iters": state.iters,
                "primal_residual": state.primal_residual,
                "dual_residual": state.dual_residual,
                "rho": state.rho,
            },
        )

    best = gamma
    best_value = separable_objective(a, c, u, beta, gamma)
    polished = _polish(a, c, u, beta, floor, z)
    if polished is not None:
        polished_value = separable_objective(a, c, u, beta, polished)
        if polished_value <= best_value:
            best, best_value = polished, polished_value
    if best_value > start_value:
        best = start
    state.s = s
    state.rho = rho
    return best, state


def separable_tv_min(
    w: Any,
    c: Any,
    u: Any,
    beta: float,
    L: int,
    gamma_floor: float,
    opts: Optional[InnerOptions] = None,
) -> np.ndarray:
    """argmin over gamma >= floor of sum_i (L w_i gamma_i + c_i / gamma_i) + beta sum_i u_i |gamma_{i+1} - gamma_i|."""
    w_arr = _vector(w, "w")
    if np.any(w_arr <= 0.0):
        raise InputError("w must be positive")
    c_arr = _vector(c, "c", w_arr.size)
    if np.any(c_arr < 0.0):
        raise InputError("c must be nonnegative")
    u_arr = _vector(u, "u", max(w_arr.size - 1, 0))
    if np.any(u_arr < 0.0):
        raise InputError("u must be nonnegative")
    if int(L) < 1:
        raise InputError("L must be >= 1")
    gamma, _ = solve_separable_tv(w_arr, c_arr, u_arr, _check_beta(beta), int(L), float(gamma_floor), opts)
    return gamma


# ==================== active-set Newton on the exact objective ====================

def _fused_groups(gamma: np.ndarray, weights: np.ndarray, rel_tol: float) -> np.ndarray:
    """Group id per coordinate; weighted edges closer than rel_tol * max(1, max gamma) are merged."""
    if gamma.size == 1:
        return np.zeros(1, dtype=np.int64)
    scale = max(1.0, float(np.max(gamma)))
    fused = (np.abs(np.diff(gamma)) <= rel_tol * scale) & (weights > 0.0)
    return np.concatenate(([0], np.cumsum(~fused))).astype(np.int64)


def _group_starts(group: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.concatenate(([True], np.diff(group) != 0)))


@dataclass
class _Iterate:
    gamma: np.ndarray
    ev: _Evaluation
    value: float


def _pattern(problem: "_Subproblem", it: _Iterate) -> tuple[np.ndarray, _Iterate]:
    """Fused-group pattern of the iterate; near-equal groups are snapped to their mean when that does not cost."""
    for rel_tol in _FUSE_LEVELS:
        group = _fused_groups(it.gamma, problem.weights, rel_tol)
        starts = _group_starts(group)
        low = np.minimum.reduceat(it.gamma, starts)
        high = np.maximum.reduceat(it.gamma, starts)
        # exactly constant groups keep their value
        theta = np.where(low == high, low, np.bincount(group, weights=it.gamma) / np.bincount(group))
        snapped = np.maximum(theta[group], problem.floor)
        if np.array_equal(snapped, it.gamma):
            return group, it
        candidate = problem.evaluate(snapped)
        if candidate.value <= it.value:
            return group, candidate
    return _fused_groups(it.gamma, problem.weights, 0.0), it


@dataclass(frozen=True)
class _Subproblem:
    A: np.ndarray
    Y: np.ndarray
    lam: float
    w: np.ndarray
    u: np.ndarray
    beta: float
    floor: float
    threshold: float

    @property
    def L(self) -> int:
        return self.Y.shape[1]

    @property
    def weights(self) -> np.ndarray:
        return self.beta * self.u if self.u.size else np.zeros(0)

    @property
    def grad_scale(self) -> float:
        return max(1.0, float(np.max(self.L * self.w)))

    def evaluate(self, gamma: np.ndarray) -> _Iterate:
        ev = _Evaluation.at(self.A, self.Y, gamma, self.lam)
        return _Iterate(gamma=gamma, ev=ev, value=_objective(self.L, self.w, self.u, self.beta, gamma, self.Y, ev))

    def residual(self, it: _Iterate) -> float:
        return _kkt_from_gradient(self.L * self.w + it.ev.datafit_gradient(), self.u, self.beta, it.gamma, self.floor)


def _newton_direction(hess: np.ndarray, grad: np.ndarray, damping: float) -> np.ndarray:
    system = hess + damping * np.eye(grad.size)
    try:
        return cho_solve(cho_factor(system, lower=True, check_finite=False), grad, check_finite=False)
    except LinAlgError:
        return grad / np.maximum(np.diag(system), damping)


def _newton_refine(problem: _Subproblem, it: _Iterate, max_steps: int) -> tuple[_Iterate, int, bool]:
    """
    Projected Newton on the exact objective with the fused groups held together.

    On a fixed pattern the TV term is linear, so the reduced objective is smooth
    with gradient B^T grad F and Hessian B^T H B (B the group indicator). Groups
    that sit near the floor with a positive reduced gradient are moved onto the
    floor. Returns the last iterate, the number of accepted steps and whether
    the reduced projected gradient vanished.
    """
    n = it.gamma.size
    weights = problem.weights
    steps = 0
    for _ in range(max_steps):
        group, it = _pattern(problem, it)
        starts = _group_starts(group)
        theta = it.gamma[starts]
        basis = np.zeros((n, starts.size))
        basis[np.arange(n), group] = 1.0

        grad_full = problem.L * problem.w + it.ev.datafit_gradient()
        if n > 1:
            grad_full = grad_full + _diff_transpose(weights * np.sign(np.diff(it.gamma)))
        grad = basis.T @ grad_full
        projected = theta - np.maximum(theta - grad, problem.floor)
        gap = float(np.linalg.norm(projected))
        if gap <= _NEWTON_STATIONARY * problem.threshold:
            return it, steps, True

        eps_active = min(_ACTIVE_RATIO * float(np.max(theta)), gap)
        active = (theta - problem.floor <= eps_active) & (grad > 0.0)
        free = np.flatnonzero(~active)
        direction = np.zeros(theta.size)
        direction[active] = theta[active] - problem.floor
        decrement = 0.0
        if free.size:
            hess = basis.T @ it.ev.datafit_hessian(problem.A) @ basis
            sub = hess[np.ix_(free, free)]
            diag = np.diag(sub)
            damping = (
                1e-12 * max(1.0, float(np.max(diag)))
                + float(np.mean(diag)) * min(1.0, gap / problem.grad_scale)
            )
            direction[free] = _newton_direction(sub, grad[free], damping)
            limit = _MAX_STEP_RATIO * max(1.0, float(np.max(theta)))
            largest = float(np.max(np.abs(direction[free])))
            if largest > limit:
                direction[free] *= limit / largest
            decrement = float(np.dot(grad[free], direction[free]))

        t = 1.0
        accepted: Optional[_Iterate] = None
        for _halving in range(60):
            cand_theta = np.maximum(theta - t * direction, problem.floor)
            candidate = problem.evaluate(cand_theta[group])
            expected = t * decrement + float(np.dot(grad[active], (theta - cand_theta)[active]))
            if math.isfinite(candidate.value) and candidate.value <= it.value - _ARMIJO_SIGMA * expected:
                accepted = candidate
                break
            t *= 0.5
        if accepted is None or np.array_equal(accepted.gamma, it.gamma):
            return it, steps, False
        it = accepted
        steps += 1
    return it, steps, False

# ==================== full subproblem ====================

def _objective(L: int, w: np.ndarray, u: np.ndarray, beta: float, gamma: np.ndarray, Y: np.ndarray, ev: _Evaluation) -> float:
    return float(L * np.dot(w, gamma) + ev.datafit(Y) + _tv(u, beta, gamma))


def _kkt_from_gradient(h: np.ndarray, u: np.ndarray, beta: float, gamma: np.ndarray, floor: float) -> float:
    n = gamma.size
    weights = beta * u if n > 1 else np.zeros(0)
    diffs = np.diff(gamma)
    fuse_tol = 1e-9 * max(1.0, float(np.max(np.abs(gamma))))
    fused = (np.abs(diffs) <= fuse_tol) & (weights > 0.0)
    fixed = np.where(fused, 0.0, weights * np.sign(diffs))
    base = h + _diff_transpose(fixed) if n > 1 else h.copy()
    active = np.flatnonzero(gamma <= floor * (1.0 + 1e-9))
    free_edges = np.flatnonzero(fused)
    if free_edges.size == 0 and active.size == 0:
        return float(np.linalg.norm(base))

    columns = []
    lower = []
    upper = []
    for edge in free_edges:
        col = np.zeros(n)
        col[edge] = -1.0
        col[edge + 1] = 1.0
        columns.append(col)
        lower.append(-weights[edge])
        upper.append(weights[edge])
    for idx in active:
        col = np.zeros(n)
        col[idx] = -1.0
        columns.append(col)
        lower.append(0.0)
        upper.append(np.inf)
    design = np.column_stack(columns)
    fit = lsq_linear(
        design,
        -base,
        bounds=(np.asarray(lower), np.asarray(upper)),
        method="trf",
        lsq_solver="exact",
        tol=1e-12,
        max_iter=500,
    )
    return float(np.linalg.norm(base + design @ fit.x))


def kkt_residual(
    A: Any,
    Y: Any,
    lam: float,
    w: Any,
    u: Any,
    beta: float,
    gamma: Any,
    gamma_floor: Optional[float] = None,
) -> float:
    """Norm of the minimal-norm element of the projected subdifferential of F at gamma."""
    entries = dictionary_entries(A)
    values = measurement_values(Y)
    n = entries.shape[1]
    g = _vector(gamma, "gamma", n)
    w_arr = _vector(w, "w", n)
    u_arr = _vector(u, "u", max(n - 1, 0))
    floor = settings.gamma_floor if gamma_floor is None else float(gamma_floor)
    ev = _Evaluation.at(entries, values, g, check_lambda(lam))
    h = values.shape[1] * w_arr + ev.datafit_gradient()
    return _kkt_from_gradient(h, u_arr, _check_beta(beta), g, floor)


def solve_subproblem(
    A: Any,
    Y: Any,
    lam: float,
    w: Any,
    u: Any,
    beta: float,
    gamma_init: Any,
    opts: Optional[InnerOptions] = None,
    gamma_floor: Optional[float] = None,
    raise_on_failure: bool = True,
) -> tuple[np.ndarray, SubproblemDiagnostics]:
    """
    Minimize F over gamma >= floor, warm-started at ``gamma_init``.

    Every mid iteration takes one majorization step (solved by ADMM) followed
    by an active-set Newton refinement on F itself. With
    ``raise_on_failure=False`` an uncertified answer, including one reached
    after an ADMM failure, is returned with ``diagnostics.converged`` False so
    the caller can continue from it.
    """
    opts = opts or InnerOptions.from_settings()
    entries = dictionary_entries(A)
    values = measurement_values(Y)
    n = entries.shape[1]
    L = values.shape[1]
    lam = check_lambda(lam)
    beta = _check_beta(beta)
    floor = settings.gamma_floor if gamma_floor is None else float(gamma_floor)
    w_arr = _vector(w, "w", n)
    if np.any(w_arr <= 0.0):
        raise InputError("w must be positive")
    u_arr = _vector(u, "u", max(n - 1, 0))
    if np.any(u_arr < 0.0):
        raise InputError("u must be nonnegative")
    if values.shape[0] != entries.shape[0]:
        raise ContractError(f"measurements have {values.shape[0]} rows, dictionary has M={entries.shape[0]}")

    problem = _Subproblem(
        A=entries,
        Y=values,
        lam=lam,
        w=w_arr,
        u=u_arr,
        beta=beta,
        floor=floor,
        threshold=opts.kkt_tol * max(1.0, float(np.max(L * w_arr))),
    )
    it = problem.evaluate(np.maximum(_vector(gamma_init, "gamma_init", n), floor))
    trace = [it.value]
    identify_opts = replace(opts, max_admm_iters=min(opts.max_admm_iters, _IDENTIFY_ADMM_ITERS))
    warm: Optional[AdmmState] = None
    admm_total = 0
    admm_failures = 0
    newton_total = 0
    mid_used = 0
    residual: Optional[float] = None

    for k in range(1, opts.max_mid_iters + 1):
        mid_used = k
        previous = it.gamma
        c, _ = _coefficients(entries, values, it.gamma, lam, it.ev)
        candidate, warm = solve_separable_tv(
            w_arr, c, u_arr, beta, L, floor, identify_opts,
            gamma_init=it.gamma, warm=warm, raise_on_failure=False,
        )
        admm_total += warm.iters
        if not warm.converged:
            admm_failures += 1
            logger.debug("mid step %d: ADMM stopped after %d iterations", k, warm.iters)
        majorized = problem.evaluate(candidate)
        if majorized.value <= it.value:
            it = majorized

        it, steps, stationary = _newton_refine(problem, it, _NEWTON_STEPS)
        newton_total += steps
        trace.append(it.value)

        change = float(np.linalg.norm(it.gamma - previous)) / max(float(np.linalg.norm(previous)), 1e-12)
        residual = None
        if change < opts.mid_tol or stationary:
            residual = problem.residual(it)
            if residual <= problem.threshold:
                break
        if change == 0.0:
            logger.debug("mid step %d: no progress", k)
            break

    if residual is None:
        residual = problem.residual(it)
    diagnostics = SubproblemDiagnostics(
        objective_trace=tuple(trace),
        kkt_residual=residual,
        kkt_threshold=problem.threshold,
        admm_iters_total=admm_total,
        mid_iters_used=mid_used,
        converged=residual <= problem.threshold,
        admm_failures=admm_failures,
        newton_steps=newton_total,
    )
    if not diagnostics.converged and raise_on_failure:
        raise ConvergenceError(
            f"subproblem KKT residual {residual:.3e} above tolerance {problem.threshold:.3e}",
            diagnostics=diagnostics.as_dict(),
        )
    return it.gamma, diagnostics
