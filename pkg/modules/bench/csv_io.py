"""
CSV output of trial records and aggregates.

Column order is fixed (see README). Rows are written in (class, snr, algorithm,
seed) order, floats with ``repr`` so a file reads back exactly, empty cells
for missing values. ``wall_time_seconds`` is only written on request so that
two runs with the same master seed give identical bytes.
"""
from __future__ import annotations

import csv
import logging
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

from core.exceptions import InputError

from .schemas import AggregateRow, TrialRecord

logger = logging.getLogger(__name__)

RECORD_COLUMNS: List[str] = [
    "class",
    "snr_db",
    "algorithm",
    "trial",
    "seed",
    "nmse",
    "f1",
    "tp",
    "fa",
    "mis",
    "outer_iters",
    "converged",
    "failed",
    "error",
]
TIMING_COLUMN = "wall_time_seconds"

AGGREGATE_COLUMNS: List[str] = [
    "class",
    "snr_db",
    "algorithm",
    "trials",
    "failures",
    "mean_nmse",
    "median_nmse",
    "nmse_db",
    "mean_f1",
    "mean_outer_iters",
]

CsvKind = Literal["records", "aggregate"]
Row = Union[TrialRecord, AggregateRow]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_dict(row: Row) -> Dict[str, Any]:
    data = row.model_dump()
    data["class"] = data.pop("sparsity_class")
    return data


def build_csv_text(rows: Sequence[Row], kind: Optional[CsvKind] = None, timing: bool = False) -> str:
    if kind is None:
        kind = "aggregate" if rows and isinstance(rows[0], AggregateRow) else "records"
    if kind == "records":
        headers = RECORD_COLUMNS + ([TIMING_COLUMN] if timing else [])
        ordered = sorted(rows, key=TrialRecord.sort_key)
    else:
        headers = list(AGGREGATE_COLUMNS)
        ordered = sorted(rows, key=lambda r: (r.sparsity_class, r.snr_db, r.algorithm))
    stream = StringIO()
    writer = csv.DictWriter(stream, fieldnames=headers, lineterminator="\n")
    writer.writeheader()
    for row in ordered:
        data = _row_dict(row)
        writer.writerow({key: _cell(data.get(key)) for key in headers})
    return stream.getvalue()


def emit_csv(
    rows: Sequence[Row],
    path: str | Path,
    kind: Optional[CsvKind] = None,
    timing: bool = False,
) -> Path:
    target = Path(path)
    text = build_csv_text(list(rows), kind=kind, timing=timing)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise InputError(f"failed to write CSV: {exc}", payload={"path": str(target)}) from exc
    logger.info("wrote %d rows to %s", len(rows), target)
    return target


def _parse(value: str, kind: str) -> Any:
    if value == "":
        return None
    if kind == "bool":
        return value == "true"
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    return value


_RECORD_TYPES = {
    "snr_db": "float",
    "trial": "int",
    "seed": "int",
    "nmse": "float",
    "f1": "float",
    "tp": "int",
    "fa": "int",
    "mis": "int",
    "outer_iters": "int",
    "converged": "bool",
    "failed": "bool",
    TIMING_COLUMN: "float",
}


def read_records(path: str | Path) -> List[TrialRecord]:
    source = Path(path)
    try:
        with open(source, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            missing = [c for c in RECORD_COLUMNS if c not in (reader.fieldnames or [])]
            if missing:
                raise InputError(f"records CSV lacks columns {missing}", payload={"path": str(source)})
            records = []
            for raw in reader:
                values = {key: _parse(raw.get(key, ""), _RECORD_TYPES.get(key, "str")) for key in raw}
                values["sparsity_class"] = values.pop("class")
                values["error"] = values.get("error") or ""
                values["failed"] = bool(values.get("failed"))
                records.append(TrialRecord(**values))
    except OSError as exc:
        raise InputError(f"failed to read CSV: {exc}", payload={"path": str(source)}) from exc
    except (ValueError, TypeError) as exc:
        raise InputError(f"malformed records CSV: {exc}", payload={"path": str(source)}) from exc
    return records
