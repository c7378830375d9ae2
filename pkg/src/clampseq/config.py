"""Versioned JSON scenario configuration consumed by the command-line tools."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .heuristics import Scenario
from .model import (
    DEFAULT_EDGE_STIFFNESS,
    DEFAULT_GROUND_STIFFNESS,
    GRID_NX,
    GRID_NY,
    GRID_SPACING,
    ReducedModel,
    default_model,
)
from .assembly import DEFAULT_FASTENER_STIFFNESS

SCHEMA_VERSION = 1

# key -> (default, type). ``holes`` is the only required key besides the
# schema version.
_SCHEMA: dict[str, tuple[object, type]] = {
    "holes": (None, list),
    "start": (None, int),
    "max_actions": (200, int),
    "n_divisor": (2, int),
    "variance_weight": (0.6, float),
    "mean_tol": (0.01, float),
    "std_tol": (0.02, float),
    "force_floor": (990.0, float),
    "k_edge": (DEFAULT_EDGE_STIFFNESS, float),
    "k_ground": (DEFAULT_GROUND_STIFFNESS, float),
    "k_f": (DEFAULT_FASTENER_STIFFNESS, float),
    "grid_nx": (GRID_NX, int),
    "grid_ny": (GRID_NY, int),
    "grid_spacing": (GRID_SPACING, float),
    "out_dir": (None, str),
}


class ConfigError(ValueError):
    """Configuration file is missing, malformed, or invalid."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Parsed scenario file: run parameters plus model parameters."""

    holes: tuple[int, ...]
    start: int | None
    max_actions: int
    n_divisor: int
    variance_weight: float
    mean_tol: float
    std_tol: float
    force_floor: float
    k_edge: float
    k_ground: float
    k_f: float
    grid_nx: int
    grid_ny: int
    grid_spacing: float
    out_dir: str | None

    def scenario(self, start: int | None = None, max_actions: int | None = None) -> Scenario:
        """Build the Scenario, optionally overriding start / max_actions."""
        return Scenario(
            holes=self.holes,
            start=self.start if start is None else start,
            max_actions=self.max_actions if max_actions is None else max_actions,
            n_divisor=self.n_divisor,
            variance_weight=self.variance_weight,
            mean_tol=self.mean_tol,
            std_tol=self.std_tol,
            force_floor=self.force_floor,
        )

    def build_model(self) -> ReducedModel:
        return default_model(self.k_edge, self.k_ground)


def _coerce(key: str, value, expected: type):
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key!r} must be a number, got {value!r}")
        return float(value)
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key!r} must be an integer, got {value!r}")
        return value
    if not isinstance(value, expected):
        raise ConfigError(f"{key!r} must be a {expected.__name__}, got {value!r}")
    return value


def parse_config(raw: dict) -> ScenarioConfig:
    """Validate a decoded config dict; unknown keys are rejected."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    unknown = sorted(set(raw) - set(_SCHEMA) - {"schema_version"})
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "holes" not in raw:
        raise ConfigError("config must list the scenario 'holes'")

    values: dict[str, object] = {}
    for key, (default, expected) in _SCHEMA.items():
        if key not in raw or raw[key] is None:
            values[key] = default
        else:
            values[key] = _coerce(key, raw[key], expected)

    holes = values["holes"]
    if holes is None or not all(
        isinstance(h, int) and not isinstance(h, bool) for h in holes
    ):
        raise ConfigError("'holes' must be a list of integers")
    values["holes"] = tuple(holes)

    if (values["grid_nx"], values["grid_ny"], values["grid_spacing"]) != (
        GRID_NX,
        GRID_NY,
        GRID_SPACING,
    ):
        raise ConfigError(
            f"unsupported grid {values['grid_nx']}x{values['grid_ny']} at "
            f"{values['grid_spacing']} mm; this build supports "
            f"{GRID_NX}x{GRID_NY} at {GRID_SPACING} mm"
        )
    if values["k_edge"] <= 0 or values["k_ground"] <= 0 or values["k_f"] <= 0:
        raise ConfigError("stiffness parameters must be positive")

    config = ScenarioConfig(**values)
    try:
        config.scenario()  # eagerly surface scenario-level problems
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config


def load_config(path: str | Path) -> ScenarioConfig:
    """Read and validate a scenario config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw)
