"""
配置管理模块
使用Pydantic Settings从环境变量加载求解器与基准测试的默认参数
"""

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    应用配置类
    从环境变量加载配置，支持类型转换和验证
    """

    model_config = SettingsConfigDict(
        env_file=str(Path(__file__).resolve().parent.parent / ".env"),
        env_file_encoding="utf-8",
        extra="ignore",  # 未声明的 env 变量忽略，不抛出校验错误
    )

    # 应用配置
    app_host: str = Field("0.0.0.0", validation_alias="APP_HOST")
    app_port: int = Field(8000, validation_alias="APP_PORT")
    log_level: str = Field(
        "INFO",
        validation_alias="LOG_LEVEL",
        description="Root logging level for the HTTP service and the bench CLI",
    )

    # 结果输出
    results_dir: str = Field(
        str(Path(__file__).resolve().parent.parent / "runtime" / "results"),
        validation_alias="RESULTS_DIR",
        description="Default directory for benchmark CSV outputs",
    )
    bench_workers: int = Field(
        4,
        validation_alias="BENCH_WORKERS",
        description="Worker pool size for Monte Carlo trials",
    )
    bench_executor: Literal["process", "thread"] = Field(
        "process",
        validation_alias="BENCH_EXECUTOR",
        description="Worker pool kind for Monte Carlo trials",
    )

    # 正则项默认值
    default_beta_linear: float = Field(
        1.0,
        validation_alias="DEFAULT_BETA_LINEAR",
        description="Default TV weight for the linear TV hyperprior",
    )
    default_beta_log: float = Field(
        1.0,
        validation_alias="DEFAULT_BETA_LOG",
        description="Default TV weight for the log TV hyperprior",
    )
    default_epsilon: float = Field(
        1e-2,
        validation_alias="DEFAULT_EPSILON",
        description="Stability offset of the log TV hyperprior; reweights saturate at 1/epsilon",
    )

    # 外层 MM 迭代
    max_outer_iters: int = Field(30, validation_alias="MAX_OUTER_ITERS")
    outer_tol: float = Field(
        1e-4,
        validation_alias="OUTER_TOL",
        description="Relative gamma change that stops the outer loop",
    )
    gamma_floor: float = Field(
        1e-10,
        validation_alias="GAMMA_FLOOR",
        description="Lower bound kept on gamma inside the solvers; values at the floor are reported as 0",
    )

    # 内层子问题（MM + ADMM）
    max_mid_iters: int = Field(50, validation_alias="MAX_MID_ITERS")
    mid_tol: float = Field(1e-6, validation_alias="MID_TOL")
    admm_rho: float = Field(1.0, validation_alias="ADMM_RHO")
    max_admm_iters: int = Field(5000, validation_alias="MAX_ADMM_ITERS")
    admm_tol_primal: float = Field(1e-8, validation_alias="ADMM_TOL_PRIMAL")
    admm_tol_dual: float = Field(1e-8, validation_alias="ADMM_TOL_DUAL")
    admm_tol_rel: float = Field(1e-6, validation_alias="ADMM_TOL_REL")
    kkt_tol: float = Field(
        1e-5,
        validation_alias="KKT_TOL",
        description="KKT residual tolerance, relative to max(1, max L*w)",
    )
    inner_retry_factor: int = Field(
        4,
        validation_alias="INNER_RETRY_FACTOR",
        description="Mid-iteration budget multiplier for the single retry of an uncertified subproblem",
    )

    # HTTP 接口限制
    api_max_dictionary_size: int = Field(
        200_000,
        validation_alias="API_MAX_DICTIONARY_SIZE",
        description="Maximum number of dictionary entries accepted by /api/v1/recovery/solve",
    )


settings = Settings()
