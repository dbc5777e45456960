from __future__ import annotations

import math
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.config import settings
from modules.sbl.regularizers import TVRegularizer
from modules.sbl.types import InnerOptions, SolverOptions
from modules.signal_gen.types import CLASS_SUPPORT_SIZE, MIN_SIGNAL_LENGTH, SPARSITY_CLASSES

AlgorithmKind = Literal["msbl", "none", "linear-tv", "log-tv"]

DEFAULT_SNR_GRID_DB: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0)


class AlgorithmSpec(BaseModel):
    """
    One benchmarked algorithm. ``msbl`` runs the EM baseline; every other
    regularizer runs TV-SBL with that hyperprior.
    """

    model_config = ConfigDict(extra="forbid")

    name: str
    regularizer: AlgorithmKind
    beta: Optional[float] = Field(default=None, ge=0.0)
    epsilon: Optional[float] = Field(default=None, gt=0.0)
    max_outer_iters: Optional[int] = Field(default=None, ge=1)
    outer_tol: Optional[float] = Field(default=None, ge=0.0)
    gamma_floor: Optional[float] = Field(default=None, ge=0.0)
    max_mid_iters: Optional[int] = Field(default=None, ge=1)
    kkt_tol: Optional[float] = Field(default=None, gt=0.0)

    @field_validator("name")
    @classmethod
    def _strip_name(cls, value: str) -> str:
        name = str(value or "").strip()
        if not name or "," in name:
            raise ValueError("algorithm name must be non-empty and contain no commas")
        return name

    @property
    def is_baseline(self) -> bool:
        return self.regularizer == "msbl"

    def to_regularizer(self) -> TVRegularizer:
        if self.is_baseline:
            return TVRegularizer.none()
        return TVRegularizer.from_tag(self.regularizer, self.beta, self.epsilon)

    def solver_options(self) -> SolverOptions:
        inner = InnerOptions.from_settings(max_mid_iters=self.max_mid_iters, kkt_tol=self.kkt_tol)
        return SolverOptions.from_settings(
            inner=inner,
            max_outer_iters=self.max_outer_iters,
            outer_tol=self.outer_tol,
            gamma_floor=self.gamma_floor,
        )


def default_algorithms() -> List[AlgorithmSpec]:
    return [
        AlgorithmSpec(name="M-SBL", regularizer="msbl"),
        AlgorithmSpec(name="TV-SBL-Linear", regularizer="linear-tv", beta=settings.default_beta_linear),
        AlgorithmSpec(
            name="TV-SBL-Log",
            regularizer="log-tv",
            beta=settings.default_beta_log,
            epsilon=settings.default_epsilon,
        ),
    ]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N: int = Field(default=150, ge=MIN_SIGNAL_LENGTH)
    M: int = Field(default=20, ge=1)
    L: int = Field(default=5, ge=1)
    K: int = CLASS_SUPPORT_SIZE
    snr_grid_db: List[float] = Field(default_factory=lambda: list(DEFAULT_SNR_GRID_DB))
    classes: List[str] = Field(default_factory=lambda: list(SPARSITY_CLASSES))
    algorithms: List[AlgorithmSpec] = Field(default_factory=default_algorithms)
    trials: int = Field(default=200, ge=1)
    master_seed: int = Field(default=0, ge=0)
    output_path: Optional[str] = None
    aggregate_path: Optional[str] = None
    fix_dictionary: bool = False
    workers: Optional[int] = Field(default=None, ge=1)
    executor: Optional[Literal["process", "thread"]] = None

    @field_validator("snr_grid_db")
    @classmethod
    def _finite_snr(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("snr_grid_db must not be empty")
        if not all(math.isfinite(v) for v in value):
            raise ValueError("snr values must be finite")
        return [float(v) for v in value]

    @field_validator("classes")
    @classmethod
    def _known_classes(cls, value: List[str]) -> List[str]:
        tags = [str(v).strip().lower() for v in value]
        if not tags:
            raise ValueError("classes must not be empty")
        unknown = [t for t in tags if t not in SPARSITY_CLASSES]
        if unknown:
            raise ValueError(f"unknown sparsity classes {unknown}; expected {list(SPARSITY_CLASSES)}")
        return tags

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentConfig":
        if self.K != CLASS_SUPPORT_SIZE:
            raise ValueError(f"K must be {CLASS_SUPPORT_SIZE}: every sparsity class places {CLASS_SUPPORT_SIZE} rows")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError(f"algorithm names must be unique, got {names}")
        return self

    def resolved_output_path(self) -> Path:
        if self.output_path:
            return Path(self.output_path)
        return Path(settings.results_dir) / "records.csv"

    def resolved_aggregate_path(self) -> Path:
        if self.aggregate_path:
            return Path(self.aggregate_path)
        records = self.resolved_output_path()
        return records.with_name(f"{records.stem}_aggregate{records.suffix or '.csv'}")


class TrialRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    sparsity_class: str
    snr_db: float
    algorithm: str
    trial: int = Field(ge=0)
    seed: int
    nmse: Optional[float] = Field(default=None, ge=0.0)
    f1: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    tp: Optional[int] = None
    fa: Optional[int] = None
    mis: Optional[int] = None
    outer_iters: Optional[int] = None
    converged: Optional[bool] = None
    failed: bool = False
    error: str = ""
    wall_time_seconds: Optional[float] = None

    def sort_key(self) -> tuple:
        return (self.sparsity_class, self.snr_db, self.algorithm, self.seed, self.trial)


class AggregateRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    sparsity_class: str
    snr_db: float
    algorithm: str
    trials: int
    failures: int
    mean_nmse: Optional[float] = None
    median_nmse: Optional[float] = None
    nmse_db: Optional[float] = None
    mean_f1: Optional[float] = None
    mean_outer_iters: Optional[float] = None
