from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from core.exceptions import InputError
from modules.sbl.types import Dictionary, MeasurementSet

SparsityClass = Literal["homogeneous", "random", "hybrid"]
SPARSITY_CLASSES: tuple[str, ...] = ("homogeneous", "random", "hybrid")

# block lengths per class; every class places K = 10 nonzero rows
CLASS_BLOCK_LENGTHS: dict[str, tuple[int, ...]] = {
    "homogeneous": (5, 5),
    "random": (1,) * 10,
    "hybrid": (4, 3, 1, 1, 1),
}
CLASS_SUPPORT_SIZE = 10
MIN_SIGNAL_LENGTH = 20


def check_class(tag: str) -> str:
    normalized = str(tag or "").strip().lower()
    if normalized not in SPARSITY_CLASSES:
        raise InputError(f"unknown sparsity class {tag!r}; expected one of {SPARSITY_CLASSES}")
    return normalized


@dataclass(frozen=True)
class SparsityPattern:
    blocks: tuple[tuple[int, int], ...]
    N: int

    def __post_init__(self) -> None:
        blocks = tuple(sorted((int(s), int(n)) for s, n in self.blocks))
        end = -1
        for start, length in blocks:
            if length < 1 or start < 0 or start + length > self.N:
                raise InputError(f"block ({start}, {length}) out of range for N={self.N}")
            if start <= end:
                raise InputError(f"block ({start}, {length}) overlaps its predecessor")
            end = start + length - 1
        object.__setattr__(self, "blocks", blocks)

    @property
    def K(self) -> int:
        return sum(length for _, length in self.blocks)

    @property
    def lengths(self) -> list[int]:
        return [length for _, length in self.blocks]

    def support(self) -> tuple[int, ...]:
        return tuple(i for start, length in self.blocks for i in range(start, start + length))


@dataclass(frozen=True)
class GroundTruth:
    X: np.ndarray
    support: tuple[int, ...]
    pattern: SparsityPattern


@dataclass(frozen=True)
class TrialData:
    """One generated instance: everything every algorithm of a trial consumes."""

    sparsity_class: str
    snr_db: float
    seed: int
    dictionary: Dictionary
    truth: GroundTruth
    measurements: MeasurementSet

    @property
    def noise_variance(self) -> float:
        return self.measurements.noise_variance
