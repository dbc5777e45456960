from __future__ import annotations

import math
from itertools import groupby
from typing import Iterable, List

import numpy as np

from .schemas import AggregateRow, TrialRecord


def _group_key(record: TrialRecord) -> tuple:
    return (record.sparsity_class, record.snr_db, record.algorithm)


def aggregate(records: Iterable[TrialRecord]) -> List[AggregateRow]:
    """Per (class, snr, algorithm): statistics over non-failed trials plus failure counts."""
    ordered = sorted(records, key=TrialRecord.sort_key)
    rows: List[AggregateRow] = []
    for (cls, snr, algo), group in groupby(sorted(ordered, key=_group_key), key=_group_key):
        members = list(group)
        ok = [r for r in members if not r.failed and r.nmse is not None]
        row = AggregateRow(sparsity_class=cls, snr_db=snr, algorithm=algo, trials=len(members), failures=len(members) - len(ok))
        if ok:
            errors = np.array([r.nmse for r in ok], dtype=np.float64)
            mean_nmse = float(np.mean(errors))
            row = row.model_copy(
                update={
                    "mean_nmse": mean_nmse,
                    "median_nmse": float(np.median(errors)),
                    "nmse_db": 10.0 * math.log10(mean_nmse) if mean_nmse > 0.0 else None,
                    "mean_f1": float(np.mean([r.f1 for r in ok])),
                    "mean_outer_iters": float(np.mean([r.outer_iters for r in ok])),
                }
            )
        rows.append(row)
    return rows
