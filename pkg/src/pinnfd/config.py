"""INI config files and their merge with command-line overrides.

Precedence, highest first: explicit CLI flag, config-file value,
``PINNFD_OUTDIR`` (for the output directory only), model default.
Empty-string values in a file mean "unset", which keeps the config echoes
written by the runner loadable as-is.
"""

from __future__ import annotations

import configparser
import os
from pathlib import Path
from typing import Optional, Union

from .service.schemas import (
    BenchRequest,
    FdmSettings,
    FipRequest,
    ProblemSettings,
    SolveFdmRequest,
    TrainPinnRequest,
    TrainSettings,
)

_KNOWN_SECTIONS = frozenset({"problem", "fdm", "sampling", "train", "fip", "output"})

# [sampling] and [train] both feed TrainSettings
_SAMPLING_KEYS = frozenset(
    {"n_collocation", "n_boundary_per_edge", "resample_each_epoch", "seed"}
)


def load_config_file(path: Union[str, Path]) -> dict[str, dict[str, str]]:
    """Parse an INI file into ``{section: {key: raw_string}}``."""
    parser = configparser.ConfigParser()
    loaded = parser.read(path)
    if not loaded:
        raise FileNotFoundError(f"config file not found: {path}")
    cfg = {name: dict(parser[name]) for name in parser.sections()}
    unknown = set(cfg) - _KNOWN_SECTIONS
    if unknown:
        known = ", ".join(sorted(_KNOWN_SECTIONS))
        raise ValueError(
            f"unknown config section(s) {sorted(unknown)}; known sections: {known}"
        )
    return cfg


def _clean(section: dict[str, str]) -> dict[str, str]:
    return {k: v for k, v in section.items() if v != ""}


def _merged(
    file_cfg: dict[str, dict[str, str]],
    section: str,
    overrides: Optional[dict] = None,
) -> dict:
    out: dict = _clean(file_cfg.get(section, {}))
    if overrides:
        out.update({k: v for k, v in overrides.items() if v is not None})
    return out


def _resolve_outdir(flag: Optional[str], file_cfg: dict) -> str:
    if flag:
        return flag
    from_file = _clean(file_cfg.get("output", {})).get("outdir")
    if from_file:
        return from_file
    return os.environ.get("PINNFD_OUTDIR") or "runs"


def _resolve_experiment_id(flag: Optional[str], file_cfg: dict) -> Optional[str]:
    if flag:
        return flag
    return _clean(file_cfg.get("output", {})).get("experiment_id")


def _file_seed(file_cfg: dict, *sections: str) -> Optional[str]:
    for section in sections:
        value = _clean(file_cfg.get(section, {})).get("seed")
        if value is not None:
            return value
    return None


def build_problem_settings(
    file_cfg: dict, overrides: Optional[dict] = None
) -> ProblemSettings:
    return ProblemSettings(**_merged(file_cfg, "problem", overrides))


def build_train_settings(
    file_cfg: dict, overrides: Optional[dict] = None, seed: Optional[int] = None
) -> TrainSettings:
    merged = _merged(file_cfg, "sampling")
    for key in merged:
        if key not in _SAMPLING_KEYS:
            raise ValueError(f"key {key!r} does not belong in [sampling]")
    merged.update(_merged(file_cfg, "train"))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    if seed is not None:
        merged["seed"] = seed
    elif "seed" not in merged:
        fallback = _file_seed(file_cfg, "output")
        if fallback is not None:
            merged["seed"] = fallback
    return TrainSettings(**merged)


def build_solve_fdm_request(
    file_cfg: dict,
    *,
    problem: Optional[dict] = None,
    fdm: Optional[dict] = None,
    seed: Optional[int] = None,
    outdir: Optional[str] = None,
    experiment_id: Optional[str] = None,
) -> SolveFdmRequest:
    if seed is None:
        file_value = _file_seed(file_cfg, "output", "sampling")
        seed = int(file_value) if file_value is not None else 0
    return SolveFdmRequest(
        problem=build_problem_settings(file_cfg, problem),
        fdm=FdmSettings(**_merged(file_cfg, "fdm", fdm)),
        seed=seed,
        outdir=_resolve_outdir(outdir, file_cfg),
        experiment_id=_resolve_experiment_id(experiment_id, file_cfg),
    )


def build_train_pinn_request(
    file_cfg: dict,
    *,
    problem: Optional[dict] = None,
    train: Optional[dict] = None,
    seed: Optional[int] = None,
    outdir: Optional[str] = None,
    experiment_id: Optional[str] = None,
) -> TrainPinnRequest:
    return TrainPinnRequest(
        problem=build_problem_settings(file_cfg, problem),
        train=build_train_settings(file_cfg, train, seed),
        outdir=_resolve_outdir(outdir, file_cfg),
        experiment_id=_resolve_experiment_id(experiment_id, file_cfg),
    )


def build_fip_request(
    file_cfg: dict,
    *,
    problem: Optional[dict] = None,
    fip: Optional[dict] = None,
    train: Optional[dict] = None,
    seed: Optional[int] = None,
    outdir: Optional[str] = None,
    experiment_id: Optional[str] = None,
) -> FipRequest:
    problem_settings = build_problem_settings(file_cfg, {**(problem or {}), "id": "fip"})
    fip_section = _merged(file_cfg, "fip", fip)
    return FipRequest(
        problem=problem_settings,
        train=build_train_settings(file_cfg, train, seed),
        outdir=_resolve_outdir(outdir, file_cfg),
        experiment_id=_resolve_experiment_id(experiment_id, file_cfg),
        **fip_section,
    )


def build_bench_request(
    file_cfg: dict,
    *,
    suite: str,
    seed: Optional[int] = None,
    outdir: Optional[str] = None,
) -> BenchRequest:
    if seed is None:
        file_value = _file_seed(file_cfg, "sampling", "output")
        seed = int(file_value) if file_value is not None else 0
    return BenchRequest(
        suite=suite, seed=seed, outdir=_resolve_outdir(outdir, file_cfg)
    )
