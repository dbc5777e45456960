"""
Experiment config loading.

Config files are YAML mappings whose keys are ``ExperimentConfig`` fields:

    N: 150
    snr_grid_db: [0, 5, 10, 15, 20]
    classes: [homogeneous, random, hybrid]
    trials: 200
    master_seed: 7
    algorithms:
      - {name: M-SBL, regularizer: msbl}
      - {name: TV-SBL-Log, regularizer: log-tv, beta: 1.0, epsilon: 0.01}

Resolution order: preset < file < command-line overrides.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import ValidationError

from core.exceptions import InputError

from .schemas import ExperimentConfig

logger = logging.getLogger(__name__)

PRESETS: Dict[str, Dict[str, Any]] = {
    "default": {},
    "quick": {"trials": 50, "snr_grid_db": [0.0, 10.0, 20.0]},
    "full": {"trials": 200},
}


def read_config_file(path: str | Path) -> Dict[str, Any]:
    source = Path(path)
    try:
        with open(source, "r", encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise InputError(f"failed to read config: {exc}", payload={"path": str(source)}) from exc
    except yaml.YAMLError as exc:
        raise InputError(f"config is not valid YAML: {exc}", payload={"path": str(source)}) from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InputError("config must be a key-value mapping", payload={"path": str(source)})
    return data


def build_config(values: Dict[str, Any], source: Optional[str] = None) -> ExperimentConfig:
    try:
        return ExperimentConfig(**values)
    except ValidationError as exc:
        errors = [
            {"loc": ".".join(str(p) for p in err.get("loc", ())), "msg": err.get("msg", "")}
            for err in exc.errors()
        ]
        summary = "; ".join(f"{e['loc']}: {e['msg']}" for e in errors)
        raise InputError(f"invalid experiment config: {summary}", payload={"path": source, "errors": errors}) from exc


def load_experiment_config(
    path: Optional[str | Path] = None,
    preset: str = "default",
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    if preset not in PRESETS:
        raise InputError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
    values: Dict[str, Any] = dict(PRESETS[preset])
    if path is not None:
        values.update(read_config_file(path))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    config = build_config(values, source=str(path) if path is not None else None)
    logger.debug("experiment config (preset=%s, file=%s): %s", preset, path, config.model_dump())
    return config


def dump_config(config: ExperimentConfig, path: str | Path) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as handle:
            yaml.safe_dump(config.model_dump(exclude_none=True), handle, sort_keys=False)
    except OSError as exc:
        raise InputError(f"failed to write config: {exc}", payload={"path": str(target)}) from exc
    return target
