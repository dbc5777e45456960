"""TV-type hyperpriors on the SBL hyperparameters and the log-TV reweighting."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from core.config import settings
from core.exceptions import InputError

RegularizerKind = Literal["none", "linear-tv", "log-tv"]
REGULARIZER_KINDS: tuple[str, ...] = ("none", "linear-tv", "log-tv")


def _vector(gamma, name: str = "gamma") -> np.ndarray:
    values = np.asarray(gamma, dtype=np.float64).ravel()
    if values.size < 1:
        raise InputError(f"{name} must have length >= 1")
    if not np.all(np.isfinite(values)):
        raise InputError(f"{name} contains non-finite values")
    return values


def _check_epsilon(epsilon: float) -> float:
    eps = float(epsilon)
    if not np.isfinite(eps) or eps <= 0.0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    return eps


def linear_tv(gamma) -> float:
    values = _vector(gamma)
    return float(np.sum(np.abs(np.diff(values))))


def log_tv(gamma, epsilon: float) -> float:
    values = _vector(gamma)
    eps = _check_epsilon(epsilon)
    return float(np.sum(np.log(np.abs(np.diff(values)) + eps)))


def log_tv_reweights(gamma_prev, epsilon: float) -> np.ndarray:
    values = _vector(gamma_prev, "gamma_prev")
    if values.size < 2:
        raise InputError("gamma_prev must have length >= 2 for reweighting")
    eps = _check_epsilon(epsilon)
    return 1.0 / (np.abs(np.diff(values)) + eps)


@dataclass(frozen=True)
class TVRegularizer:
    kind: RegularizerKind = "none"
    beta: float = 0.0
    epsilon: float = 1e-2

    def __post_init__(self) -> None:
        if self.kind not in REGULARIZER_KINDS:
            raise InputError(f"unknown regularizer {self.kind!r}; expected one of {REGULARIZER_KINDS}")
        beta = float(self.beta)
        if not np.isfinite(beta) or beta < 0.0:
            raise InputError(f"beta must be >= 0, got {self.beta}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "epsilon", _check_epsilon(self.epsilon))

    @classmethod
    def none(cls) -> "TVRegularizer":
        return cls("none", 0.0)

    @classmethod
    def linear(cls, beta: float | None = None) -> "TVRegularizer":
        return cls("linear-tv", settings.default_beta_linear if beta is None else beta)

    @classmethod
    def log(cls, beta: float | None = None, epsilon: float | None = None) -> "TVRegularizer":
        return cls(
            "log-tv",
            settings.default_beta_log if beta is None else beta,
            settings.default_epsilon if epsilon is None else epsilon,
        )

    @classmethod
    def from_tag(cls, tag: str, beta: float | None = None, epsilon: float | None = None) -> "TVRegularizer":
        normalized = str(tag or "").strip().lower()
        if normalized == "none":
            return cls.none()
        if normalized == "linear-tv":
            return cls.linear(beta)
        if normalized == "log-tv":
            return cls.log(beta, epsilon)
        raise InputError(f"unknown regularizer tag {tag!r}; expected one of {REGULARIZER_KINDS}")

    @property
    def effective_beta(self) -> float:
        return 0.0 if self.kind == "none" else self.beta

    def penalty(self, gamma) -> float:
        """beta * T(gamma); zero for ``none``."""
        if self.kind == "none" or self.beta == 0.0:
            _vector(gamma)
            return 0.0
        if self.kind == "linear-tv":
            return self.beta * linear_tv(gamma)
        return self.beta * log_tv(gamma, self.epsilon)

    def edge_weights(self, gamma_prev) -> np.ndarray:
        """Per-difference weights u of the convex surrogate at ``gamma_prev``."""
        values = _vector(gamma_prev, "gamma_prev")
        if values.size < 2:
            return np.zeros(0, dtype=np.float64)
        if self.kind == "log-tv":
            return log_tv_reweights(values, self.epsilon)
        if self.kind == "linear-tv":
            return np.ones(values.size - 1, dtype=np.float64)
        return np.zeros(values.size - 1, dtype=np.float64)

    def label(self) -> str:
        if self.kind == "none":
            return "none"
        if self.kind == "linear-tv":
            return f"linear-tv(beta={self.beta:g})"
        return f"log-tv(beta={self.beta:g},eps={self.epsilon:g})"
