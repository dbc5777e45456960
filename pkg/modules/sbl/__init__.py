from .baselines import em_update, msbl_em
from .inner_solver import (
    datafit_coefficients,
    kkt_residual,
    separable_tv_min,
    solve_subproblem,
)
from .mm_outer import logdet_majorizer_weights, majorized_cost, tv_sbl
from .model import measurement_covariance, posterior, sbl_cost
from .regularizers import (
    REGULARIZER_KINDS,
    TVRegularizer,
    linear_tv,
    log_tv,
    log_tv_reweights,
)
from .types import (
    Dictionary,
    Hyperparameters,
    InnerOptions,
    MeasurementSet,
    Posterior,
    SolveReport,
    SolverOptions,
    SubproblemDiagnostics,
)

__all__ = [
    "Dictionary",
    "MeasurementSet",
    "Hyperparameters",
    "Posterior",
    "InnerOptions",
    "SolverOptions",
    "SolveReport",
    "SubproblemDiagnostics",
    "TVRegularizer",
    "REGULARIZER_KINDS",
    "linear_tv",
    "log_tv",
    "log_tv_reweights",
    "measurement_covariance",
    "posterior",
    "sbl_cost",
    "datafit_coefficients",
    "separable_tv_min",
    "kkt_residual",
    "solve_subproblem",
    "logdet_majorizer_weights",
    "majorized_cost",
    "tv_sbl",
    "msbl_em",
    "em_update",
]
