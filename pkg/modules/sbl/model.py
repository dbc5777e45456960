"""
Gaussian MMV model: measurement covariance, posterior moments and the Type-II cost.

All Sigma_y inverses go through one Cholesky factor; the posterior is always
evaluated in the Gamma-multiplied form so that gamma_i = 0 is exact.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from core.exceptions import ContractError, InputError, InternalError

from .regularizers import TVRegularizer
from .types import Dictionary, Hyperparameters, MeasurementSet, Posterior

logger = logging.getLogger(__name__)


def dictionary_entries(A: Any) -> np.ndarray:
    if isinstance(A, Dictionary):
        return A.entries
    return Dictionary(A).entries


def gamma_values(gamma: Any) -> np.ndarray:
    if isinstance(gamma, Hyperparameters):
        return gamma.gamma
    return Hyperparameters(gamma).gamma


def measurement_values(Y: Any) -> np.ndarray:
    if isinstance(Y, MeasurementSet):
        return Y.Y
    values = np.asarray(Y, dtype=np.float64)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2 or not np.all(np.isfinite(values)):
        raise InputError("measurements must be a finite 2-D array")
    return values


def check_lambda(lam: float) -> float:
    value = float(lam)
    if not np.isfinite(value) or value <= 0.0:
        raise InputError(f"noise variance must be positive and finite, got {lam}")
    return value


def check_dimensions(A: np.ndarray, gamma: np.ndarray, Y: Optional[np.ndarray] = None) -> None:
    if gamma.shape[0] != A.shape[1]:
        raise ContractError(
            f"gamma has length {gamma.shape[0]}, dictionary has N={A.shape[1]}",
            payload={"N": int(A.shape[1]), "gamma_len": int(gamma.shape[0])},
        )
    if Y is not None and Y.shape[0] != A.shape[0]:
        raise ContractError(
            f"measurements have {Y.shape[0]} rows, dictionary has M={A.shape[0]}",
            payload={"M": int(A.shape[0]), "Y_rows": int(Y.shape[0])},
        )


@dataclass(frozen=True)
class CovarianceFactor:
    """Cholesky factor of Sigma_y = lam*I + A diag(gamma) A^T."""

    factor: tuple[np.ndarray, bool]
    matrix: np.ndarray

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self.factor, rhs, check_finite=False)

    def logdet(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.factor[0]))))


def _covariance(A: np.ndarray, gamma: np.ndarray, lam: float) -> np.ndarray:
    sigma = (A * gamma[None, :]) @ A.T
    sigma = 0.5 * (sigma + sigma.T)
    sigma[np.diag_indices_from(sigma)] += lam
    return sigma


def factor_covariance(A: np.ndarray, gamma: np.ndarray, lam: float) -> CovarianceFactor:
    """Raw-array fast path used by the solvers; callers validate inputs."""
    sigma = _covariance(A, gamma, lam)
    try:
        factor = cho_factor(sigma, lower=True, check_finite=False)
    except LinAlgError as exc:
        raise InternalError("measurement covariance is not positive definite", original_error=str(exc)) from exc
    return CovarianceFactor(factor=factor, matrix=sigma)


def measurement_covariance(A: Any, gamma: Any, lam: float) -> np.ndarray:
    entries = dictionary_entries(A)
    g = gamma_values(gamma)
    check_dimensions(entries, g)
    return _covariance(entries, g, check_lambda(lam))


def posterior_from_factor(A: np.ndarray, Y: np.ndarray, gamma: np.ndarray, chol: CovarianceFactor) -> Posterior:
    sigma_inv_A = chol.solve(A)
    gram = A.T @ sigma_inv_A
    covariance = np.diag(gamma) - (gamma[:, None] * gram) * gamma[None, :]
    covariance = 0.5 * (covariance + covariance.T)
    means = gamma[:, None] * (A.T @ chol.solve(Y))
    means.setflags(write=False)
    covariance.setflags(write=False)
    return Posterior(means=means, covariance=covariance)


def posterior(A: Any, Y: Any, gamma: Any, lam: Optional[float] = None) -> Posterior:
    """Posterior moments of X given Y; lam defaults to ``Y.noise_variance``."""
    entries = dictionary_entries(A)
    g = gamma_values(gamma)
    values = measurement_values(Y)
    if lam is None:
        if not isinstance(Y, MeasurementSet):
            raise InputError("noise variance required when Y is a raw array")
        lam = Y.noise_variance
    check_dimensions(entries, g, values)
    chol = factor_covariance(entries, g, check_lambda(lam))
    return posterior_from_factor(entries, values, g, chol)


def datafit_term(Y: np.ndarray, chol: CovarianceFactor) -> float:
    """sum_l y_l^T Sigma_y^{-1} y_l"""
    return float(np.sum(Y * chol.solve(Y)))


def sbl_cost(
    A: Any,
    Y: Any,
    gamma: Any,
    reg: Optional[TVRegularizer] = None,
    lam: Optional[float] = None,
) -> float:
    entries = dictionary_entries(A)
    g = gamma_values(gamma)
    values = measurement_values(Y)
    if lam is None:
        if not isinstance(Y, MeasurementSet):
            raise InputError("noise variance required when Y is a raw array")
        lam = Y.noise_variance
    check_dimensions(entries, g, values)
    chol = factor_covariance(entries, g, check_lambda(lam))
    penalty = (reg or TVRegularizer.none()).penalty(g)
    return values.shape[1] * chol.logdet() + datafit_term(values, chol) + penalty


def cost_from_factor(Y: np.ndarray, gamma: np.ndarray, chol: CovarianceFactor, reg: TVRegularizer) -> float:
    return Y.shape[1] * chol.logdet() + datafit_term(Y, chol) + reg.penalty(gamma)
