from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from core.config import settings
from core.exceptions import InputError
from core.matrix_io import read_matrix, write_matrix


def as_finite_array(value: Any, name: str, ndim: int) -> np.ndarray:
    """Read-only float64 copy of ``value``; rejects non-finite entries and wrong rank."""
    try:
        array = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{name} is not numeric: {exc}") from exc
    if ndim == 2 and array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != ndim:
        raise InputError(f"{name} must be {ndim}-D, got shape {array.shape}")
    if array.size == 0:
        raise InputError(f"{name} must not be empty")
    if not np.all(np.isfinite(array)):
        raise InputError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dictionary:
    entries: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", as_finite_array(self.entries, "dictionary", 2))

    @property
    def M(self) -> int:
        return int(self.entries.shape[0])

    @property
    def N(self) -> int:
        return int(self.entries.shape[1])

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=0)

    @classmethod
    def from_file(cls, path: str | Path) -> "Dictionary":
        return cls(read_matrix(path))

    def to_file(self, path: str | Path) -> Path:
        return write_matrix(path, self.entries)


@dataclass(frozen=True)
class MeasurementSet:
    Y: np.ndarray
    noise_variance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "Y", as_finite_array(self.Y, "measurements", 2))
        lam = float(self.noise_variance)
        if not np.isfinite(lam) or lam <= 0.0:
            raise InputError(f"noise_variance must be positive and finite, got {self.noise_variance}")
        object.__setattr__(self, "noise_variance", lam)

    @property
    def M(self) -> int:
        return int(self.Y.shape[0])

    @property
    def L(self) -> int:
        return int(self.Y.shape[1])

    @classmethod
    def from_file(cls, path: str | Path, noise_variance: float) -> "MeasurementSet":
        return cls(read_matrix(path), noise_variance)

    def to_file(self, path: str | Path) -> Path:
        return write_matrix(path, self.Y)


@dataclass(frozen=True)
class Hyperparameters:
    gamma: np.ndarray

    def __post_init__(self) -> None:
        gamma = as_finite_array(self.gamma, "gamma", 1)
        if np.any(gamma < 0.0):
            raise InputError("gamma must be nonnegative")
        object.__setattr__(self, "gamma", gamma)

    @property
    def N(self) -> int:
        return int(self.gamma.shape[0])


@dataclass(frozen=True)
class Posterior:
    means: np.ndarray
    covariance: np.ndarray


@dataclass(frozen=True)
class InnerOptions:
    max_mid_iters: int = 50
    mid_tol: float = 1e-6
    admm_rho: float = 1.0
    max_admm_iters: int = 5000
    admm_tol_primal: float = 1e-8
    admm_tol_dual: float = 1e-8
    admm_tol_rel: float = 1e-6
    kkt_tol: float = 1e-5

    def __post_init__(self) -> None:
        for name in ("max_mid_iters", "max_admm_iters"):
            if int(getattr(self, name)) < 1:
                raise InputError(f"{name} must be >= 1")
        for name in ("mid_tol", "admm_rho", "admm_tol_primal", "admm_tol_dual", "admm_tol_rel", "kkt_tol"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0.0:
                raise InputError(f"{name} must be positive, got {value}")

    @classmethod
    def from_settings(cls, **overrides: Any) -> "InnerOptions":
        values = {
            "max_mid_iters": settings.max_mid_iters,
            "mid_tol": settings.mid_tol,
            "admm_rho": settings.admm_rho,
            "max_admm_iters": settings.max_admm_iters,
            "admm_tol_primal": settings.admm_tol_primal,
            "admm_tol_dual": settings.admm_tol_dual,
            "admm_tol_rel": settings.admm_tol_rel,
            "kkt_tol": settings.kkt_tol,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class SolverOptions:
    max_outer_iters: int = 30
    outer_tol: float = 1e-4
    gamma_init: str | tuple[float, ...] = "ones"
    gamma_floor: float = 1e-10
    inner: InnerOptions = field(default_factory=InnerOptions)
    inner_retry_factor: int = 4

    def __post_init__(self) -> None:
        if int(self.max_outer_iters) < 1:
            raise InputError("max_outer_iters must be >= 1")
        if not np.isfinite(self.outer_tol) or self.outer_tol < 0.0:
            raise InputError("outer_tol must be >= 0")
        if not np.isfinite(self.gamma_floor) or self.gamma_floor < 0.0:
            raise InputError("gamma_floor must be >= 0")
        if isinstance(self.gamma_init, str):
            if self.gamma_init != "ones":
                raise InputError(f"gamma_init must be 'ones' or a vector, got {self.gamma_init!r}")
        else:
            init = as_finite_array(self.gamma_init, "gamma_init", 1)
            if np.any(init < 0.0):
                raise InputError("gamma_init must be nonnegative")
            object.__setattr__(self, "gamma_init", tuple(float(v) for v in init))
        if int(self.inner_retry_factor) < 1:
            raise InputError("inner_retry_factor must be >= 1")

    @classmethod
    def from_settings(cls, inner: InnerOptions | None = None, **overrides: Any) -> "SolverOptions":
        values: dict[str, Any] = {
            "max_outer_iters": settings.max_outer_iters,
            "outer_tol": settings.outer_tol,
            "gamma_floor": settings.gamma_floor,
            "inner_retry_factor": settings.inner_retry_factor,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(inner=inner or InnerOptions.from_settings(), **values)

    def initial_gamma(self, n: int) -> np.ndarray:
        if isinstance(self.gamma_init, str):
            gamma = np.ones(n, dtype=np.float64)
        else:
            gamma = np.asarray(self.gamma_init, dtype=np.float64)
            if gamma.shape != (n,):
                raise InputError(f"gamma_init has length {gamma.shape[0]}, dictionary has N={n}")
        return np.maximum(gamma, self.gamma_floor)


@dataclass(frozen=True)
class SubproblemDiagnostics:
    objective_trace: tuple[float, ...]
    kkt_residual: float
    kkt_threshold: float
    admm_iters_total: int
    mid_iters_used: int
    converged: bool
    admm_failures: int = 0
    newton_steps: int = 0

    def as_dict(self) -> dict[str, Any]:
        return {
            "objective_trace": list(self.objective_trace),
            "kkt_residual": self.kkt_residual,
            "kkt_threshold": self.kkt_threshold,
            "admm_iters_total": self.admm_iters_total,
            "mid_iters_used": self.mid_iters_used,
            "converged": self.converged,
            "admm_failures": self.admm_failures,
            "newton_steps": self.newton_steps,
        }


@dataclass(frozen=True)
class SolveReport:
    gamma_final: np.ndarray
    posterior: Posterior
    cost_trace: tuple[float, ...]
    outer_iters_used: int
    converged: bool
    diagnostics: tuple[SubproblemDiagnostics, ...] = ()

    def support(self, k: int) -> list[int]:
        """Indices of the ``k`` rows with largest posterior-mean norm (ties to lower index)."""
        norms = np.linalg.norm(self.posterior.means, axis=1)
        order = np.argsort(-norms, kind="stable")
        return sorted(int(i) for i in order[: int(k)])

    def gamma_profile(self) -> list[float]:
        return [float(v) for v in self.gamma_final]
