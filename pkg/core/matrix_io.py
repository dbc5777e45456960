"""
Plain-text matrix format shared by dictionaries, measurements and dumps.

    rows cols
    v11,v12,...,v1c
    ...
    vr1,vr2,...,vrc

Row-major, comma separated, one header line with the two dimensions.
Values are written with ``repr`` so a dump reads back bit-for-bit.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from core.exceptions import InputError


def write_matrix(path: str | Path, matrix: np.ndarray) -> Path:
    target = Path(path)
    values = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if values.ndim != 2:
        raise InputError(f"matrix must be 2-D, got ndim={values.ndim}", payload={"path": str(target)})
    rows, cols = values.shape
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(f"{rows} {cols}\n")
            writer = csv.writer(handle, lineterminator="\n")
            for row in values:
                writer.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise InputError(f"failed to write matrix: {exc}", payload={"path": str(target)}) from exc
    return target


def read_matrix(path: str | Path) -> np.ndarray:
    source = Path(path)
    try:
        lines = source.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"failed to read matrix: {exc}", payload={"path": str(source)}) from exc
    if not lines:
        raise InputError("matrix file is empty", payload={"path": str(source)})

    header = lines[0].split()
    try:
        rows, cols = int(header[0]), int(header[1])
    except (IndexError, ValueError) as exc:
        raise InputError(
            f"matrix header must be 'rows cols', got {lines[0]!r}",
            payload={"path": str(source)},
        ) from exc
    if rows < 1 or cols < 1:
        raise InputError(f"matrix dimensions must be positive, got {rows}x{cols}", payload={"path": str(source)})

    body = [line for line in lines[1:] if line.strip()]
    if len(body) != rows:
        raise InputError(
            f"expected {rows} data rows, found {len(body)}",
            payload={"path": str(source)},
        )
    values = np.empty((rows, cols), dtype=np.float64)
    for idx, record in enumerate(csv.reader(body)):
        if len(record) != cols:
            raise InputError(
                f"row {idx} has {len(record)} values, expected {cols}",
                payload={"path": str(source)},
            )
        try:
            values[idx] = [float(cell) for cell in record]
        except ValueError as exc:
            raise InputError(f"row {idx} is not numeric: {exc}", payload={"path": str(source)}) from exc
    if not np.all(np.isfinite(values)):
        raise InputError("matrix contains non-finite values", payload={"path": str(source)})
    return values
