"""Experiment configuration: documented schema, defaults, and validation.

The configuration file is a single JSON document. Every key is optional and
falls back to the defaults below, which describe a 25-mirror network observed
for 100 timesteps under the stable scenario S0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional

from .network import (
    DEFAULT_ALPHA,
    DEFAULT_BANDWIDTH_PER_LINK_RANGE,
    DEFAULT_MST_ACTIVE_LINKS_RANGE_PCT,
    DEFAULT_RT_ACTIVE_LINKS_RANGE_PCT,
    DEFAULT_UNIT_WRITE_TIME_RANGE,
    MirrorNetwork,
    TopologyRanges,
    build_network,
    topology_ranges_from_pct,
)
from .scenarios import FACTOR_NAMES, ScenarioId, scenario_profile

DEFAULT_NUM_MIRRORS = 25
DEFAULT_TIMESTEPS = 100
DEFAULT_SEED = 0
DEFAULT_MAX_BANDWIDTH_PCT = 40.0
DEFAULT_MAX_WRITE_TIME_PCT = 45.0
DEFAULT_MIN_ACTIVE_LINKS_PCT = 35.0

MAX_SEED = 2**64 - 1

CONFIG_PATH_ENV_VAR = "MIRRORSIM_CONFIG"


class ConfigError(Exception):
    """Base class for configuration problems."""


class ConfigSyntaxError(ConfigError):
    """The configuration file is not valid JSON."""


class ConfigSchemaError(ConfigError):
    """A field is unknown or has the wrong shape; carries the field path."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


class ConfigInvariantError(ConfigError):
    """Values parse but violate a domain invariant (e.g. fewer than 2 mirrors)."""


@dataclass(frozen=True)
class SatisfactionThresholds:
    """Per-objective bounds on the normalized monitorable means."""

    max_bandwidth_pct: float = DEFAULT_MAX_BANDWIDTH_PCT
    max_write_time_pct: float = DEFAULT_MAX_WRITE_TIME_PCT
    min_active_links_pct: float = DEFAULT_MIN_ACTIVE_LINKS_PCT

    def __post_init__(self) -> None:
        for name in ("max_bandwidth_pct", "max_write_time_pct", "min_active_links_pct"):
            value = getattr(self, name)
            if not 0 < value <= 100:
                raise ValueError(f"{name} must be in (0, 100], got {value}")


@dataclass(frozen=True)
class SimulationProperties:
    """Run-level knobs: length, scenario, seed, thresholds, window."""

    timesteps: int = DEFAULT_TIMESTEPS
    scenario: ScenarioId = ScenarioId.S0
    seed: int = DEFAULT_SEED
    thresholds: SatisfactionThresholds = SatisfactionThresholds()
    disturbance_window: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.timesteps < 1:
            raise ValueError(f"timesteps must be >= 1, got {self.timesteps}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.disturbance_window is not None:
            start, end = self.disturbance_window
            if not (0 <= start <= end < self.timesteps):
                raise ValueError(
                    f"disturbance_window [{start}, {end}] must lie within"
                    f" [0, {self.timesteps})"
                )


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs: network facts, link ranges, properties, overrides."""

    network: MirrorNetwork
    ranges: TopologyRanges
    properties: SimulationProperties
    scenario_overrides: Optional[Mapping] = None

    def with_updates(
        self,
        *,
        scenario: Optional[ScenarioId] = None,
        seed: Optional[int] = None,
        timesteps: Optional[int] = None,
    ) -> "ExperimentConfig":
        changes = {}
        if scenario is not None:
            changes["scenario"] = ScenarioId.parse(scenario)
        if seed is not None:
            changes["seed"] = seed
        if timesteps is not None:
            changes["timesteps"] = timesteps
        if not changes:
            return self
        return replace(self, properties=replace(self.properties, **changes))


def default_config_mapping() -> dict:
    """The full schema with its default values, as written by ``init-config``."""
    return {
        "number_of_mirrors": DEFAULT_NUM_MIRRORS,
        "timesteps": DEFAULT_TIMESTEPS,
        "scenario": "S0",
        "seed": DEFAULT_SEED,
        "alpha": DEFAULT_ALPHA,
        "bandwidth_per_link_range": list(DEFAULT_BANDWIDTH_PER_LINK_RANGE),
        "unit_write_time_range": list(DEFAULT_UNIT_WRITE_TIME_RANGE),
        "mst_active_links_range_pct": list(DEFAULT_MST_ACTIVE_LINKS_RANGE_PCT),
        "rt_active_links_range_pct": list(DEFAULT_RT_ACTIVE_LINKS_RANGE_PCT),
        "thresholds": {
            "bandwidth_pct": DEFAULT_MAX_BANDWIDTH_PCT,
            "write_time_pct": DEFAULT_MAX_WRITE_TIME_PCT,
            "active_links_pct": DEFAULT_MIN_ACTIVE_LINKS_PCT,
        },
        "disturbances": {},
        "disturbance_window": None,
    }


_TOP_LEVEL_KEYS = frozenset(default_config_mapping())
_THRESHOLD_KEYS = frozenset({"bandwidth_pct", "write_time_pct", "active_links_pct"})


def _as_int(value: object, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigSchemaError(path, f"expected an integer, got {value!r}")
    return value


def _as_number(value: object, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigSchemaError(path, f"expected a number, got {value!r}")
    return float(value)


def _as_number_pair(value: object, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigSchemaError(path, f"expected a [lower, upper] pair, got {value!r}")
    return (_as_number(value[0], f"{path}[0]"), _as_number(value[1], f"{path}[1]"))


def _as_int_pair(value: object, path: str) -> tuple[int, int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigSchemaError(path, f"expected a [start, end] pair, got {value!r}")
    return (_as_int(value[0], f"{path}[0]"), _as_int(value[1], f"{path}[1]"))


def _parse_scenario(value: object, path: str) -> ScenarioId:
    try:
        return ScenarioId.parse(value)
    except ValueError as exc:
        raise ConfigSchemaError(path, str(exc)) from None


def _parse_disturbances(raw: object) -> dict:
    if not isinstance(raw, dict):
        raise ConfigSchemaError("disturbances", f"expected an object, got {raw!r}")
    overrides: dict = {}
    for scenario_key, per_topology in raw.items():
        path = f"disturbances.{scenario_key}"
        scenario = _parse_scenario(scenario_key, path)
        if not isinstance(per_topology, dict):
            raise ConfigSchemaError(path, f"expected an object, got {per_topology!r}")
        parsed_sides: dict = {}
        for side, factors in per_topology.items():
            side_path = f"{path}.{side}"
            if side not in ("mst", "rt"):
                raise ConfigSchemaError(side_path, "expected 'mst' or 'rt'")
            if not isinstance(factors, dict):
                raise ConfigSchemaError(side_path, f"expected an object, got {factors!r}")
            parsed_factors = {}
            for name, bounds in factors.items():
                factor_path = f"{side_path}.{name}"
                if name not in FACTOR_NAMES:
                    raise ConfigSchemaError(
                        factor_path, f"expected one of {sorted(FACTOR_NAMES)}"
                    )
                parsed_factors[name] = _as_number_pair(bounds, factor_path)
            parsed_sides[side] = parsed_factors
        overrides[scenario.value] = parsed_sides
    return overrides


def config_from_mapping(raw: Mapping) -> ExperimentConfig:
    """Validate a parsed configuration mapping and build the domain objects."""
    if not isinstance(raw, Mapping):
        raise ConfigSchemaError("$", f"expected a JSON object, got {raw!r}")
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigSchemaError(sorted(unknown)[0], "unknown configuration key")

    num_mirrors = _as_int(raw.get("number_of_mirrors", DEFAULT_NUM_MIRRORS), "number_of_mirrors")
    timesteps = _as_int(raw.get("timesteps", DEFAULT_TIMESTEPS), "timesteps")
    scenario = _parse_scenario(raw.get("scenario", "S0"), "scenario")
    seed = _as_int(raw.get("seed", DEFAULT_SEED), "seed")
    alpha = _as_number(raw.get("alpha", DEFAULT_ALPHA), "alpha")
    bandwidth_range = _as_number_pair(
        raw.get("bandwidth_per_link_range", DEFAULT_BANDWIDTH_PER_LINK_RANGE),
        "bandwidth_per_link_range",
    )
    write_time_range = _as_number_pair(
        raw.get("unit_write_time_range", DEFAULT_UNIT_WRITE_TIME_RANGE),
        "unit_write_time_range",
    )
    mst_range_pct = _as_number_pair(
        raw.get("mst_active_links_range_pct", DEFAULT_MST_ACTIVE_LINKS_RANGE_PCT),
        "mst_active_links_range_pct",
    )
    rt_range_pct = _as_number_pair(
        raw.get("rt_active_links_range_pct", DEFAULT_RT_ACTIVE_LINKS_RANGE_PCT),
        "rt_active_links_range_pct",
    )

    thresholds_raw = raw.get("thresholds", {})
    if not isinstance(thresholds_raw, dict):
        raise ConfigSchemaError("thresholds", f"expected an object, got {thresholds_raw!r}")
    unknown = set(thresholds_raw) - _THRESHOLD_KEYS
    if unknown:
        raise ConfigSchemaError(f"thresholds.{sorted(unknown)[0]}", "unknown threshold key")
    max_bandwidth = _as_number(
        thresholds_raw.get("bandwidth_pct", DEFAULT_MAX_BANDWIDTH_PCT), "thresholds.bandwidth_pct"
    )
    max_write_time = _as_number(
        thresholds_raw.get("write_time_pct", DEFAULT_MAX_WRITE_TIME_PCT),
        "thresholds.write_time_pct",
    )
    min_active_links = _as_number(
        thresholds_raw.get("active_links_pct", DEFAULT_MIN_ACTIVE_LINKS_PCT),
        "thresholds.active_links_pct",
    )

    overrides = _parse_disturbances(raw.get("disturbances", {}))

    window_raw = raw.get("disturbance_window")
    window = None if window_raw is None else _as_int_pair(window_raw, "disturbance_window")

    try:
        network = build_network(
            num_mirrors,
            bandwidth_per_link_range=bandwidth_range,
            unit_write_time_range=write_time_range,
            alpha=alpha,
        )
        ranges = topology_ranges_from_pct(network, mst_range_pct, rt_range_pct)
        thresholds = SatisfactionThresholds(
            max_bandwidth_pct=max_bandwidth,
            max_write_time_pct=max_write_time,
            min_active_links_pct=min_active_links,
        )
        properties = SimulationProperties(
            timesteps=timesteps,
            scenario=scenario,
            seed=seed,
            thresholds=thresholds,
            disturbance_window=window,
        )
        # Surface bad override intervals at load time, not mid-run.
        for scenario_key, per_topology in overrides.items():
            scenario_profile(ScenarioId(scenario_key), per_topology)
    except ValueError as exc:
        raise ConfigInvariantError(str(exc)) from None

    return ExperimentConfig(
        network=network,
        ranges=ranges,
        properties=properties,
        scenario_overrides=overrides or None,
    )


def default_config() -> ExperimentConfig:
    return config_from_mapping({})


def load_config(path) -> ExperimentConfig:
    """Load and validate a configuration file.

    Raises ConfigError for a missing file, ConfigSyntaxError for invalid
    JSON, ConfigSchemaError for shape problems (with the field path), and
    ConfigInvariantError for values that violate domain invariants.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read configuration file {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"{path} is not valid JSON: {exc}") from None
    return config_from_mapping(raw)
