from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class RegularizerPayload(BaseModel):
    model_config = ConfigDict(extra="ignore")

    kind: Literal["msbl", "none", "linear-tv", "log-tv"] = "log-tv"
    beta: Optional[float] = Field(default=None, ge=0.0)
    epsilon: Optional[float] = Field(default=None, gt=0.0)


class SolverOptionsPayload(BaseModel):
    model_config = ConfigDict(extra="ignore")

    max_outer_iters: Optional[int] = Field(default=None, ge=1)
    outer_tol: Optional[float] = Field(default=None, ge=0.0)
    gamma_floor: Optional[float] = Field(default=None, ge=0.0)
    gamma_init: Optional[List[float]] = None
    max_mid_iters: Optional[int] = Field(default=None, ge=1)
    kkt_tol: Optional[float] = Field(default=None, gt=0.0)


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="ignore")

    A: List[List[float]]
    Y: List[List[float]]
    noise_variance: float = Field(gt=0.0)
    regularizer: RegularizerPayload = Field(default_factory=RegularizerPayload)
    options: SolverOptionsPayload = Field(default_factory=SolverOptionsPayload)
    support_size: Optional[int] = Field(default=None, ge=0)


class SolveResponse(BaseModel):
    algorithm: str
    gamma: List[float]
    means: List[List[float]]
    cost_trace: List[float]
    outer_iters_used: int
    converged: bool
    support: Optional[List[int]] = None


class DemoRequest(BaseModel):
    model_config = ConfigDict(extra="ignore")

    sparsity_class: Literal["homogeneous", "random", "hybrid"] = "homogeneous"
    snr_db: float = 20.0
    seed: int = Field(default=0, ge=0)
    trial: int = Field(default=0, ge=0)
    regularizer: RegularizerPayload = Field(default_factory=RegularizerPayload)
    N: int = Field(default=150, ge=20)
    M: int = Field(default=20, ge=1)
    L: int = Field(default=5, ge=1)


class DemoResponse(BaseModel):
    algorithm: str
    sparsity_class: str
    snr_db: float
    seed: int
    noise_variance: float
    blocks: List[List[int]]
    true_support: List[int]
    estimated_support: List[int]
    gamma: List[float]
    nmse: float
    f1: float
    outer_iters_used: int
    converged: bool
