"""Recovery scores: NMSE and support F1 (top-K rule), plus a fixed-threshold support."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from core.exceptions import ContractError, InputError


def _matrix(value: Any, name: str) -> np.ndarray:
    array = np.asarray(value, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InputError(f"{name} contains non-finite values")
    return array


def nmse(X_hat: Any, X: Any) -> float:
    """||X_hat - X||_F^2 / ||X||_F^2"""
    estimate = _matrix(X_hat, "X_hat")
    truth = _matrix(X, "X")
    if estimate.shape != truth.shape:
        raise ContractError(f"X_hat has shape {estimate.shape}, X has {truth.shape}")
    energy = float(np.sum(truth ** 2))
    if energy == 0.0:
        raise InputError("ground truth is all zero; NMSE undefined")
    return float(np.sum((estimate - truth) ** 2)) / energy


def top_k_support(X_hat: Any, K: int) -> list[int]:
    """Rows with the K largest Euclidean norms; ties go to the lower index."""
    estimate = _matrix(X_hat, "X_hat")
    K = int(K)
    if K < 0 or K > estimate.shape[0]:
        raise InputError(f"K must be in [0, {estimate.shape[0]}], got {K}")
    norms = np.linalg.norm(estimate, axis=1)
    order = np.argsort(-norms, kind="stable")
    return sorted(int(i) for i in order[:K])


def threshold_support(X_hat: Any, threshold: float, relative: bool = True) -> list[int]:
    """
    Rows whose norm exceeds ``threshold``; with ``relative`` the threshold is a
    fraction of the largest row norm.
    """
    estimate = _matrix(X_hat, "X_hat")
    level = float(threshold)
    if not np.isfinite(level) or level < 0.0:
        raise InputError(f"threshold must be >= 0, got {threshold}")
    norms = np.linalg.norm(estimate, axis=1)
    if relative:
        level *= float(np.max(norms)) if norms.size else 0.0
    return [int(i) for i in np.flatnonzero(norms > level)]


@dataclass(frozen=True)
class SupportScore:
    tp: int
    fa: int
    mis: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fa) if self.tp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.mis) if self.tp else 0.0

    @property
    def f1(self) -> float:
        if self.tp == 0:
            return 0.0
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r)


def support_score(est_support: Iterable[int], true_support: Iterable[int]) -> SupportScore:
    est = {int(i) for i in est_support}
    true = {int(i) for i in true_support}
    if any(i < 0 for i in est | true):
        raise InputError("support indices must be nonnegative")
    tp = len(est & true)
    return SupportScore(tp=tp, fa=len(est - true), mis=len(true - est))


def f1_score(est_support: Iterable[int], true_support: Iterable[int]) -> float:
    return support_score(est_support, true_support).f1
