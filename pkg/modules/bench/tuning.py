"""Grid search of the TV weights, scored by median NMSE."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .aggregate import aggregate
from .runner import run_experiment
from .schemas import AggregateRow, AlgorithmSpec, ExperimentConfig

logger = logging.getLogger(__name__)

BETA_GRID: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0)
EPSILON_GRID: tuple[float, ...] = (1e-2, 1e-1)


def grid_algorithms(
    betas: Sequence[float] = BETA_GRID,
    epsilons: Sequence[float] = EPSILON_GRID,
) -> List[AlgorithmSpec]:
    algorithms = [AlgorithmSpec(name="M-SBL", regularizer="msbl")]
    algorithms += [AlgorithmSpec(name=f"LinearTV-b{b:g}", regularizer="linear-tv", beta=b) for b in betas]
    algorithms += [
        AlgorithmSpec(name=f"LogTV-b{b:g}-e{e:g}", regularizer="log-tv", beta=b, epsilon=e)
        for b in betas
        for e in epsilons
    ]
    return algorithms


@dataclass
class TuneResult:
    rows: List[AggregateRow]
    winners: Dict[str, AlgorithmSpec] = field(default_factory=dict)


def tune(
    base: ExperimentConfig,
    sparsity_class: str = "homogeneous",
    snr_db: float = 20.0,
    betas: Sequence[float] = BETA_GRID,
    epsilons: Sequence[float] = EPSILON_GRID,
    trials: Optional[int] = None,
) -> TuneResult:
    algorithms = grid_algorithms(betas, epsilons)
    config = base.model_copy(
        update={
            "classes": [sparsity_class],
            "snr_grid_db": [float(snr_db)],
            "algorithms": algorithms,
            "trials": trials or base.trials,
        }
    )
    rows = aggregate(run_experiment(config))
    by_name = {a.name: a for a in algorithms}
    winners: Dict[str, AlgorithmSpec] = {}
    for kind in ("linear-tv", "log-tv"):
        scored = [
            row for row in rows
            if by_name[row.algorithm].regularizer == kind and row.median_nmse is not None
        ]
        if not scored:
            continue
        best = min(scored, key=lambda r: (r.median_nmse, r.algorithm))
        winners[kind] = by_name[best.algorithm]
        logger.info("tune %s: best %s median NMSE %.4g", kind, best.algorithm, best.median_nmse)
    return TuneResult(rows=rows, winners=winners)
