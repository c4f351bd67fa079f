"""Scenario catalogue, full run configuration, and deterministic seeding.

Every run is fully described by a ``RunConfig``; its seed is derived from the
(scenario, speed, altitude, rep) tuple with FNV-1a so that any grid point can
be reproduced in isolation. JSON configuration files mirror the RunConfig
field names; unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields, is_dataclass
from enum import Enum
from typing import Any, Mapping

from .backhaul import Backhaul, BackhaulConfig
from .detection import DetectionConfig
from .geometry import GnbSite, Position, WorldGeometry, ZoneRect, default_world, in_zone
from .handover import HandoverConfig
from .mobility import MobilityConfig, ingress_distance
from .radio import RadioConfig

__all__ = [
    "Backhaul",
    "ConfigError",
    "GnbSite",
    "Position",
    "RunConfig",
    "SCENARIOS",
    "ScenarioId",
    "ScenarioSpec",
    "WorldGeometry",
    "ZoneRect",
    "default_world",
    "derive_seed",
    "in_zone",
    "load_config_file",
    "make_run_config",
    "run_config_from_dict",
    "run_config_to_dict",
    "scenario_by_name",
]


class ConfigError(ValueError):
    """A configuration value violates an invariant or is unknown."""


class ScenarioId(str, Enum):
    TERRESTRIAL = "terrestrial"
    LEO_OUTAGE = "leo_outage"
    LEO_OUTAGE_FALLBACK = "leo_outage_fallback"
    STRESS_NO_FALLBACK = "stress_no_fallback"
    STRESS_FALLBACK = "stress_fallback"


@dataclass(frozen=True)
class ScenarioSpec:
    id: ScenarioId
    all_gnb_backhaul: Backhaul
    outage_rate_hz: float
    outage_duration_s: float
    fallback_enabled: bool
    fallback_deadline_s: float = 2.0

    def __post_init__(self):
        if self.id is ScenarioId.TERRESTRIAL and self.outage_rate_hz != 0.0:
            raise ConfigError("terrestrial scenario must have outage_rate_hz = 0")
        if self.id in (ScenarioId.STRESS_NO_FALLBACK, ScenarioId.STRESS_FALLBACK):
            if self.outage_duration_s != 10.0:
                raise ConfigError("stress scenarios use outage_duration_s = 10")
        if self.fallback_enabled and self.fallback_deadline_s != 2.0:
            raise ConfigError("fallback scenarios use fallback_deadline_s = 2")


SCENARIOS: dict[ScenarioId, ScenarioSpec] = {
    ScenarioId.TERRESTRIAL: ScenarioSpec(
        ScenarioId.TERRESTRIAL, Backhaul.TERRESTRIAL, 0.0, 5.0, False
    ),
    ScenarioId.LEO_OUTAGE: ScenarioSpec(
        ScenarioId.LEO_OUTAGE, Backhaul.LEO_SATELLITE, 0.02, 5.0, False
    ),
    ScenarioId.LEO_OUTAGE_FALLBACK: ScenarioSpec(
        ScenarioId.LEO_OUTAGE_FALLBACK, Backhaul.LEO_SATELLITE, 0.02, 5.0, True
    ),
    ScenarioId.STRESS_NO_FALLBACK: ScenarioSpec(
        ScenarioId.STRESS_NO_FALLBACK, Backhaul.LEO_SATELLITE, 0.05, 10.0, False
    ),
    ScenarioId.STRESS_FALLBACK: ScenarioSpec(
        ScenarioId.STRESS_FALLBACK, Backhaul.LEO_SATELLITE, 0.05, 10.0, True
    ),
}


def scenario_by_name(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[ScenarioId(name)]
    except ValueError:
        known = ", ".join(s.value for s in ScenarioId)
        raise ConfigError(f"unknown scenario '{name}' (known: {known})") from None


_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def _canonical_number(x: float | int) -> str:
    xf = float(x)
    return str(int(xf)) if xf.is_integer() else repr(xf)


def derive_seed(scenario_id: str, speed_mps, altitude_m, rep: int) -> int:
    """FNV-1a 64 hash of "<scenario>|<speed>|<altitude>|<rep>" (ASCII).

    Integral speeds and altitudes format without a decimal point.
    """
    key = f"{scenario_id}|{_canonical_number(speed_mps)}|{_canonical_number(altitude_m)}|{rep}"
    h = _FNV_OFFSET
    for byte in key.encode("ascii"):
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class RunConfig:
    """Everything one simulation run needs; immutable and picklable."""

    scenario: ScenarioSpec
    world: WorldGeometry
    uav_speed_mps: float
    uav_altitude_m: float
    rep: int
    seed: int
    sim_time_s: float = 200.0
    dt_s: float = 0.5
    carrier_hz: float = 3.5e9
    handover: HandoverConfig = field(default_factory=HandoverConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    backhaul: BackhaulConfig = field(default_factory=BackhaulConfig)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    radio: RadioConfig = field(default_factory=RadioConfig)
    scenario_label: str = ""

    def __post_init__(self):
        if self.uav_speed_mps <= 0:
            raise ConfigError("uav_speed_mps must be > 0")
        if self.uav_altitude_m <= 0:
            raise ConfigError("uav_altitude_m must be > 0")
        if self.rep < 0:
            raise ConfigError("rep must be >= 0")
        if self.dt_s <= 0 or self.sim_time_s <= 0:
            raise ConfigError("sim_time_s and dt_s must be > 0")
        if not _is_multiple(self.sim_time_s, self.dt_s):
            raise ConfigError("sim_time_s must be an exact multiple of dt_s")
        for name, value in (
            ("handover.ttt_s", self.handover.ttt_s),
            ("detection.window_s", self.detection.window_s),
            ("detection.persistence_s", self.detection.persistence_s),
        ):
            if not _is_multiple(value, self.dt_s):
                raise ConfigError(f"{name} must be an integer multiple of dt_s")
        if in_zone(self.mobility.uav_ingress_start, self.world.corridor):
            raise ConfigError("mobility.uav_ingress_start must lie outside the corridor")
        m = self.mobility
        c = m.uav_loiter_center
        for corner_x in (c.x - m.uav_loiter_half_length_m, c.x + m.uav_loiter_half_length_m):
            for corner_y in (c.y - m.uav_loiter_half_width_m, c.y + m.uav_loiter_half_width_m):
                if not in_zone(Position(corner_x, corner_y, 0.0), self.world.corridor):
                    raise ConfigError("loiter racetrack must lie fully inside the corridor")
        ingress_distance(m)  # raises if the ingress ray misses the racetrack

    @property
    def n_steps(self) -> int:
        return int(round(self.sim_time_s / self.dt_s))

    @property
    def label(self) -> str:
        return self.scenario_label or self.scenario.id.value


def _is_multiple(value: float, step: float) -> bool:
    ratio = value / step
    return abs(ratio - round(ratio)) < 1e-9


def make_run_config(
    scenario: ScenarioSpec,
    speed: float,
    altitude: float,
    rep: int,
    overrides: Mapping[str, Any] | None = None,
    label: str | None = None,
) -> RunConfig:
    """Resolve a full RunConfig from defaults, a scenario, and overrides.

    Overrides use the RunConfig field names (nested dicts for sub-configs) and
    are validated; the seed is derived after overrides so an overridden speed
    or altitude changes it consistently.
    """
    if speed <= 0:
        raise ConfigError("speed must be > 0")
    if altitude <= 0:
        raise ConfigError("altitude must be > 0")
    if rep < 0:
        raise ConfigError("rep must be >= 0")
    base_world = default_world()
    world = dataclasses.replace(
        base_world,
        gnbs=tuple(
            dataclasses.replace(g, backhaul=scenario.all_gnb_backhaul) for g in base_world.gnbs
        ),
    )
    cfg = RunConfig(
        scenario=scenario,
        world=world,
        uav_speed_mps=float(speed),
        uav_altitude_m=float(altitude),
        rep=int(rep),
        seed=0,
        backhaul=BackhaulConfig(
            kind=scenario.all_gnb_backhaul,
            outage_rate_hz=scenario.outage_rate_hz,
            outage_duration_s=scenario.outage_duration_s,
            fallback_enabled=scenario.fallback_enabled,
            fallback_deadline_s=scenario.fallback_deadline_s,
        ),
        scenario_label=label or scenario.id.value,
    )
    if overrides:
        cfg = _apply_overrides(cfg, overrides, "")
    seed = derive_seed(cfg.label, cfg.uav_speed_mps, cfg.uav_altitude_m, cfg.rep)
    return dataclasses.replace(cfg, seed=seed)


_RESERVED_KEYS = {
    "seed": "seed is derived from (scenario, speed, altitude, rep) and cannot be set",
    "scenario_label": "scenario_label is set by the sweep machinery and cannot be configured",
}


def _apply_overrides(obj: Any, data: Mapping[str, Any], path: str) -> Any:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{path or 'config'}: expected an object")
    known = {f.name: f for f in fields(obj)}
    updates: dict[str, Any] = {}
    for key, value in data.items():
        where = f"{path}{key}"
        if not path and key in _RESERVED_KEYS:
            raise ConfigError(_RESERVED_KEYS[key])
        if key not in known:
            raise ConfigError(f"unknown config key: {where}")
        current = getattr(obj, key)
        updates[key] = _coerce_field(current, value, where)
    try:
        return dataclasses.replace(obj, **updates)
    except ConfigError as exc:
        raise ConfigError(f"{path}{exc}" if path else str(exc)) from None
    except ValueError as exc:
        raise ConfigError(f"{path or ''}{exc}") from None


def _coerce_field(current: Any, value: Any, where: str) -> Any:
    if is_dataclass(current) and isinstance(value, Mapping):
        return _apply_overrides(current, value, f"{where}.")
    if isinstance(current, Enum):
        try:
            return type(current)(value)
        except ValueError:
            raise ConfigError(f"{where}: invalid value {value!r}") from None
    if isinstance(current, tuple) and isinstance(value, (list, tuple)):
        if current and is_dataclass(current[0]):
            return tuple(_build(type(current[0]), item, f"{where}[{i}]") for i, item in enumerate(value))
        return tuple(value)
    if isinstance(current, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false")
        return value
    if isinstance(current, (int, float)) and isinstance(value, (int, float)) and not isinstance(value, bool):
        return type(current)(value) if isinstance(current, float) else value
    if isinstance(current, str) and isinstance(value, str):
        return value
    if is_dataclass(current):
        raise ConfigError(f"{where}: expected an object")
    raise ConfigError(f"{where}: cannot assign {value!r}")


def _build(cls: type, data: Mapping[str, Any], where: str) -> Any:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{where}: expected an object")
    kwargs: dict[str, Any] = {}
    known = {f.name: f for f in fields(cls)}
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {where}.{key}")
        if key in _FIELD_TYPES and isinstance(value, Mapping):
            kwargs[key] = _build(_FIELD_TYPES[key], value, f"{where}.{key}")
        elif key in _ENUM_FIELDS:
            try:
                kwargs[key] = _ENUM_FIELDS[key](value)
            except ValueError:
                raise ConfigError(f"{where}.{key}: invalid value {value!r}") from None
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


_FIELD_TYPES: dict[str, type] = {
    "position": Position,
    "uav_ingress_start": Position,
    "uav_loiter_center": Position,
}
_ENUM_FIELDS = {"backhaul": Backhaul, "id": ScenarioId, "kind": Backhaul, "all_gnb_backhaul": Backhaul}


def run_config_to_dict(cfg: RunConfig) -> dict[str, Any]:
    """Serialize a RunConfig to plain JSON-compatible types."""

    def convert(value: Any) -> Any:
        if isinstance(value, Enum):
            return value.value
        if is_dataclass(value):
            return {f.name: convert(getattr(value, f.name)) for f in fields(value)}
        if isinstance(value, tuple):
            return [convert(v) for v in value]
        return value

    return convert(cfg)


def run_config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    """Inverse of run_config_to_dict (full fidelity, including the seed)."""
    d = dict(data)
    scenario = _build_scenario(d.pop("scenario"))
    world = _build_world(d.pop("world"))
    sub = {
        "handover": HandoverConfig,
        "detection": DetectionConfig,
        "backhaul": BackhaulConfig,
        "mobility": MobilityConfig,
        "radio": RadioConfig,
    }
    kwargs: dict[str, Any] = {"scenario": scenario, "world": world}
    for key, value in d.items():
        if key in sub:
            kwargs[key] = _build(sub[key], value, key)
        else:
            kwargs[key] = value
    return RunConfig(**kwargs)


def _build_scenario(data: Mapping[str, Any]) -> ScenarioSpec:
    d = dict(data)
    d["id"] = ScenarioId(d["id"])
    d["all_gnb_backhaul"] = Backhaul(d["all_gnb_backhaul"])
    return ScenarioSpec(**d)


def _build_world(data: Mapping[str, Any]) -> WorldGeometry:
    return WorldGeometry(
        corridor=ZoneRect(**data["corridor"]),
        nfzs=tuple(ZoneRect(**z) for z in data["nfzs"]),
        gnbs=tuple(
            GnbSite(
                id=g["id"],
                position=Position(**g["position"]),
                tx_power_dbm=g["tx_power_dbm"],
                backhaul=Backhaul(g["backhaul"]),
            )
            for g in data["gnbs"]
        ),
    )


def load_config_file(path: str) -> dict[str, Any]:
    """Read a JSON overrides file; top-level keys mirror RunConfig fields."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data
