"""Dump a generated trial as matrix files plus a YAML sidecar."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml

from core.exceptions import InputError
from core.matrix_io import write_matrix

from .types import TrialData

logger = logging.getLogger(__name__)

DUMP_FILES = ("A.csv", "X.csv", "Y.csv", "meta.yaml")


def trial_metadata(trial: TrialData) -> dict[str, Any]:
    return {
        "sparsity_class": trial.sparsity_class,
        "snr_db": trial.snr_db,
        "seed": trial.seed,
        "noise_variance": trial.noise_variance,
        "N": trial.truth.pattern.N,
        "M": trial.dictionary.M,
        "L": trial.measurements.L,
        "K": trial.truth.pattern.K,
        "blocks": [[start, length] for start, length in trial.truth.pattern.blocks],
    }


def dump_trial(trial: TrialData, directory: str | Path) -> list[Path]:
    target = Path(directory)
    written = [
        write_matrix(target / "A.csv", trial.dictionary.entries),
        write_matrix(target / "X.csv", trial.truth.X),
        write_matrix(target / "Y.csv", trial.measurements.Y),
    ]
    meta_path = target / "meta.yaml"
    try:
        with open(meta_path, "w", encoding="utf-8") as handle:
            yaml.safe_dump(trial_metadata(trial), handle, sort_keys=False)
    except OSError as exc:
        raise InputError(f"failed to write metadata: {exc}", payload={"path": str(meta_path)}) from exc
    written.append(meta_path)
    logger.info("dumped trial %s/%g seed=%d to %s", trial.sparsity_class, trial.snr_db, trial.seed, target)
    return written


def load_metadata(directory: str | Path) -> dict[str, Any]:
    meta_path = Path(directory) / "meta.yaml"
    try:
        with open(meta_path, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise InputError(f"failed to read metadata: {exc}", payload={"path": str(meta_path)}) from exc
    if not isinstance(data, dict):
        raise InputError("metadata must be a mapping", payload={"path": str(meta_path)})
    return data
