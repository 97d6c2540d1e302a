"""Experiment configuration: YAML files merged over materialized defaults.

Every subcommand reads one mapping.  Unknown keys are rejected so a typo
cannot silently fall back to a default, and the fully resolved mapping is
written next to every artifact.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any

import yaml

from .adapt import AdaptConfig
from .lattice import LatticeSpec
from .optimizer import OptimizerSettings
from .statevector import NeelSpec


class ConfigError(ValueError):
    pass


_LATTICE = {"kind": "chain", "shape": [3], "j_z": 1.0, "j_xy": 1.0}
_REFERENCE = {"convention": "index", "first_up": True}
_ADAPT = {
    "epsilon": 0.01,
    "max_steps": 400,
    "tie_tolerance": 1e-8,
    "criterion": "max_abs",
    "optimizer": OptimizerSettings().to_dict(),
}
# pool sources: full_pauli | explicit (operators) | tiles (path or labels + shape)
# | harvest (tile shape harvested on the fly at the target J_z)
_POOL = {"source": "full_pauli", "path": None, "labels": None, "shape": None,
         "operators": None, "trials": 50, "seed": None}
_SECTOR = {"stabilizer": "all_z", "require_commute": True, "y_parity": "odd"}

DEFAULTS: dict[str, dict[str, Any]] = {
    "harvest": {"lattice": _LATTICE, "reference": _REFERENCE, "adapt": _ADAPT, "seed": 0, "trials": 50},
    "solve": {"lattice": {**_LATTICE, "shape": [8]}, "reference": _REFERENCE, "adapt": _ADAPT,
              "pool": _POOL, "seed": 0, "trials": 1, "exact": True},
    "sweep": {"geometries": [], "j_z": [1.0], "j_xy": 1.0, "reference": _REFERENCE,
              "adapt": _ADAPT, "pool": {**_POOL, "source": "harvest"}, "seed": 0, "exact": True},
    "certify": {"tiles": {"path": None, "labels": None, "shape": None}, "targets": [4, 5, 6],
                "sector": _SECTOR},
    "exact": {"lattice": {**_LATTICE, "shape": [8]}, "method": "auto", "tolerance": 1e-10},
}


def _merge(base: dict, override: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown key {where}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}{key!r} must be a mapping")
            out[key] = _merge(base[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def resolve(command: str, raw: dict | None) -> dict:
    """Defaults for ``command`` overlaid with ``raw``."""
    if command not in DEFAULTS:
        raise ConfigError(f"unknown command {command!r}")
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at top level")
    return _merge(DEFAULTS[command], raw, "")


def load(command: str, path: str | Path | None) -> dict:
    if path is None:
        return resolve(command, {})
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"invalid YAML in {path}: {err}") from err
    return resolve(command, raw)


def lattice_from(section: dict) -> LatticeSpec:
    shape = section["shape"]
    if isinstance(shape, int):
        shape = [shape]
    try:
        if section["kind"] == "chain":
            if len(shape) != 1:
                raise ConfigError("chain shape must have one entry")
            return LatticeSpec.chain(int(shape[0]), float(section["j_z"]), float(section["j_xy"]))
        if section["kind"] == "grid":
            if len(shape) != 2:
                raise ConfigError("grid shape must be [Lx, Ly]")
            return LatticeSpec.grid(int(shape[0]), int(shape[1]), float(section["j_z"]), float(section["j_xy"]))
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad lattice: {err}") from err
    raise ConfigError(f"unknown lattice kind {section['kind']!r}")


def reference_from(section: dict, spec: LatticeSpec) -> NeelSpec:
    try:
        return NeelSpec(spec.shape, section["convention"], bool(section["first_up"]))
    except ValueError as err:
        raise ConfigError(f"bad reference: {err}") from err


def adapt_from(section: dict, seed: int) -> AdaptConfig:
    try:
        data = dict(section)
        data["optimizer"] = OptimizerSettings(**data["optimizer"])
        return AdaptConfig(seed=int(seed), **data)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad adapt settings: {err}") from err
