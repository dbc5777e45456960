"""Request-level wrappers around the solvers for the HTTP service."""
from __future__ import annotations

import logging

from core.config import settings
from core.exceptions import InputError
from modules.bench.metrics import f1_score, nmse
from modules.sbl import (
    Dictionary,
    InnerOptions,
    MeasurementSet,
    SolveReport,
    SolverOptions,
    TVRegularizer,
    msbl_em,
    tv_sbl,
)
from modules.signal_gen import CLASS_SUPPORT_SIZE, dictionary_seed, generate_trial, trial_seed

from .schemas import (
    DemoRequest,
    DemoResponse,
    RegularizerPayload,
    SolveRequest,
    SolveResponse,
    SolverOptionsPayload,
)

logger = logging.getLogger(__name__)


def _options(payload: SolverOptionsPayload) -> SolverOptions:
    inner = InnerOptions.from_settings(max_mid_iters=payload.max_mid_iters, kkt_tol=payload.kkt_tol)
    return SolverOptions.from_settings(
        inner=inner,
        max_outer_iters=payload.max_outer_iters,
        outer_tol=payload.outer_tol,
        gamma_floor=payload.gamma_floor,
        gamma_init=tuple(payload.gamma_init) if payload.gamma_init is not None else None,
    )


def _label(reg: RegularizerPayload) -> str:
    return "msbl" if reg.kind == "msbl" else TVRegularizer.from_tag(reg.kind, reg.beta, reg.epsilon).label()


def _run(A: Dictionary, Y: MeasurementSet, reg: RegularizerPayload, opts: SolverOptions) -> SolveReport:
    if reg.kind == "msbl":
        return msbl_em(A, Y, opts=opts)
    return tv_sbl(A, Y, TVRegularizer.from_tag(reg.kind, reg.beta, reg.epsilon), opts)


def solve_recovery(payload: SolveRequest) -> SolveResponse:
    size = sum(len(row) for row in payload.A)
    if size > settings.api_max_dictionary_size:
        raise InputError(
            f"dictionary has {size} entries, limit is {settings.api_max_dictionary_size}",
            payload={"limit": settings.api_max_dictionary_size},
        )
    A = Dictionary(payload.A)
    Y = MeasurementSet(payload.Y, payload.noise_variance)
    report = _run(A, Y, payload.regularizer, _options(payload.options))
    logger.info("solve: M=%d N=%d L=%d reg=%s outer=%d", A.M, A.N, Y.L, payload.regularizer.kind, report.outer_iters_used)
    return SolveResponse(
        algorithm=_label(payload.regularizer),
        gamma=report.gamma_profile(),
        means=report.posterior.means.tolist(),
        cost_trace=list(report.cost_trace),
        outer_iters_used=report.outer_iters_used,
        converged=report.converged,
        support=report.support(payload.support_size) if payload.support_size is not None else None,
    )


def run_demo(payload: DemoRequest) -> DemoResponse:
    seed = trial_seed(payload.seed, payload.sparsity_class, payload.trial)
    a_seed = dictionary_seed(payload.seed, payload.sparsity_class, seed, False)
    data = generate_trial(
        payload.sparsity_class, payload.snr_db, payload.N, payload.M, payload.L, CLASS_SUPPORT_SIZE, seed, a_seed
    )
    report = _run(data.dictionary, data.measurements, payload.regularizer, SolverOptions.from_settings())
    estimated = report.support(data.truth.pattern.K)
    return DemoResponse(
        algorithm=_label(payload.regularizer),
        sparsity_class=data.sparsity_class,
        snr_db=data.snr_db,
        seed=data.seed,
        noise_variance=data.noise_variance,
        blocks=[[start, length] for start, length in data.truth.pattern.blocks],
        true_support=list(data.truth.support),
        estimated_support=estimated,
        gamma=report.gamma_profile(),
        nmse=nmse(report.posterior.means, data.truth.X),
        f1=f1_score(estimated, data.truth.support),
        outer_iters_used=report.outer_iters_used,
        converged=report.converged,
    )
