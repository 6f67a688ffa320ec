"""Plant configuration: tanks, valves, pump, recipe and the engineering hierarchy.

The YAML schema mirrors the dataclasses below; see ``ontodm/data/project/plant.yaml``
for the bundled three-tank mixing module.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from ..kg.terms import parse_datetime_ms


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Tank:
    id: str
    capacity: float
    initial_level: float
    component: str = ""
    level_tag: str = ""
    transmitter: str = ""


@dataclass(frozen=True)
class Valve:
    id: str
    nominal_flow: float
    source: str
    targets: tuple[str, ...]
    via: str | None = None  # pump that must run for this path to carry flow
    component: str = ""
    tag: str = ""


@dataclass(frozen=True)
class Pump:
    id: str
    nominal_flow: float
    component: str = ""
    tag: str = ""


@dataclass(frozen=True)
class FullSwitch:
    tank: str
    threshold: float
    tag: str
    switch: str = ""


@dataclass(frozen=True)
class EndCondition:
    kind: str  # level | signal | duration
    tank: str | None = None
    threshold: float = 0.0
    rising: bool = True  # level >= threshold if rising, else level <= threshold
    signal: str | None = None
    seconds: float = 0.0


@dataclass(frozen=True)
class Phase:
    id: str
    active: frozenset
    end: EndCondition
    process: str = ""


@dataclass(frozen=True)
class PlantConfig:
    tanks: tuple[Tank, ...]
    valves: tuple[Valve, ...]
    pump: Pump | None
    full_switch: FullSwitch | None
    recipe: tuple[Phase, ...]
    dt: float = 0.1
    sample_period: float = 1.0
    jitter: float = 0.02
    phase_timeout: float = 600.0
    start: str = "2024-01-01T00:00:00.000Z"
    components: tuple[dict, ...] = ()
    processes: tuple[dict, ...] = ()

    def __post_init__(self):
        self.validate()

    def tank(self, tank_id: str) -> Tank:
        for t in self.tanks:
            if t.id == tank_id:
                return t
        raise ConfigError(f"unknown tank {tank_id!r}")

    def actuator_ids(self) -> list[str]:
        return [v.id for v in self.valves] + ([self.pump.id] if self.pump else [])

    def actuator_tag(self, actuator_id: str) -> str:
        for v in self.valves:
            if v.id == actuator_id:
                return v.tag
        return self.pump.tag

    @property
    def dt_ms(self) -> int:
        return round(self.dt * 1000)

    @property
    def sample_steps(self) -> int:
        return round(self.sample_period / self.dt)

    def validate(self):
        if not self.tanks:
            raise ConfigError("no tanks")
        tank_ids = [t.id for t in self.tanks]
        if len(set(tank_ids)) != len(tank_ids):
            raise ConfigError("duplicate tank ids")
        for t in self.tanks:
            if t.capacity <= 0 or not 0 <= t.initial_level <= t.capacity:
                raise ConfigError(f"tank {t.id}: need 0 <= initial_level <= capacity")
        acts = self.actuator_ids()
        if len(set(acts)) != len(acts):
            raise ConfigError("duplicate actuator ids")
        for v in self.valves:
            if v.nominal_flow <= 0:
                raise ConfigError(f"valve {v.id}: nominal_flow must be positive")
            for tid in (v.source, *v.targets):
                if tid not in tank_ids:
                    raise ConfigError(f"valve {v.id} connects unknown tank {tid!r}")
            if not v.targets:
                raise ConfigError(f"valve {v.id} has no target")
            if v.via is not None and (self.pump is None or v.via != self.pump.id):
                raise ConfigError(f"valve {v.id} references unknown pump {v.via!r}")
        if self.pump is not None and self.pump.nominal_flow <= 0:
            raise ConfigError("pump nominal_flow must be positive")
        if self.full_switch is not None and self.full_switch.tank not in tank_ids:
            raise ConfigError("full switch on unknown tank")
        if self.dt <= 0 or abs(self.dt * 1000 - self.dt_ms) > 1e-9:
            raise ConfigError("dt must be a positive whole number of milliseconds")
        if self.sample_period < self.dt or abs(self.sample_period / self.dt - self.sample_steps) > 1e-9:
            raise ConfigError("sample_period must be a multiple of dt and >= dt")
        if not 0 <= self.jitter < 1:
            raise ConfigError("jitter must lie in [0, 1)")
        if self.phase_timeout <= 0:
            raise ConfigError("phase_timeout must be positive")
        if not self.recipe:
            raise ConfigError("recipe must not be empty")
        for ph in self.recipe:
            unknown = set(ph.active) - set(acts)
            if unknown:
                raise ConfigError(f"phase {ph.id} activates unknown actuators {sorted(unknown)}")
            e = ph.end
            if e.kind == "level":
                self.tank(e.tank)
            elif e.kind == "signal":
                if self.full_switch is None or e.signal != self.full_switch.tag:
                    raise ConfigError(f"phase {ph.id} waits on unknown signal {e.signal!r}")
            elif e.kind == "duration":
                if e.seconds <= 0:
                    raise ConfigError(f"phase {ph.id}: duration must be positive")
            else:
                raise ConfigError(f"phase {ph.id}: unknown end condition {e.kind!r}")
        try:
            parse_datetime_ms(self.start)
        except ValueError as e:
            raise ConfigError(f"start: {e}") from None


def _end_condition(raw: dict, phase_id: str) -> EndCondition:
    if not isinstance(raw, dict):
        raise ConfigError(f"phase {phase_id}: end must be a mapping")
    if "duration" in raw:
        return EndCondition("duration", seconds=float(raw["duration"]))
    if "signal" in raw:
        return EndCondition("signal", signal=str(raw["signal"]))
    if "level" in raw:
        if "at_least" in raw:
            return EndCondition("level", tank=str(raw["level"]), threshold=float(raw["at_least"]))
        if "at_most" in raw:
            return EndCondition("level", tank=str(raw["level"]), threshold=float(raw["at_most"]),
                                rising=False)
    raise ConfigError(f"phase {phase_id}: end needs duration, signal or level with at_least/at_most")


def config_from_dict(data: dict) -> PlantConfig:
    try:
        tanks = tuple(Tank(str(t["id"]), float(t["capacity"]), float(t["initial_level"]),
                           t.get("component", ""), t.get("level_tag", f"{t['id']}.level"),
                           t.get("transmitter", ""))
                      for t in data["tanks"])
        valves = []
        for v in data.get("valves") or []:
            to = v["to"]
            valves.append(Valve(str(v["id"]), float(v["nominal_flow"]), str(v["from"]),
                                tuple(to) if isinstance(to, list) else (str(to),),
                                v.get("via"), v.get("component", ""), v.get("tag", f"{v['id']}.open")))
        p = data.get("pump")
        pump = Pump(str(p["id"]), float(p["nominal_flow"]), p.get("component", ""),
                    p.get("tag", f"{p['id']}.on")) if p else None
        fs = data.get("full_switch")
        full = FullSwitch(str(fs["tank"]), float(fs["threshold"]), str(fs["tag"]),
                          fs.get("switch", "")) if fs else None
        recipe = tuple(Phase(str(ph["id"]), frozenset(ph.get("active") or ()),
                             _end_condition(ph.get("end"), ph["id"]), ph.get("process", ""))
                       for ph in data["recipe"])
        return PlantConfig(tanks, tuple(valves), pump, full, recipe,
                           dt=float(data.get("dt", 0.1)),
                           sample_period=float(data.get("sample_period", 1.0)),
                           jitter=float(data.get("jitter", 0.02)),
                           phase_timeout=float(data.get("phase_timeout", 600)),
                           start=str(data.get("start", "2024-01-01T00:00:00.000Z")),
                           components=tuple(data.get("components") or ()),
                           processes=tuple(data.get("processes") or ()))
    except (KeyError, TypeError) as e:
        raise ConfigError(f"plant config: missing or malformed field {e}") from None


def load_config(path=None) -> PlantConfig:
    """Read a plant YAML file; without a path the bundled mixing module."""
    if path is None:
        text = resources.files("ontodm.data.project").joinpath("plant.yaml").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(str(e)) from None
    if not isinstance(data, dict):
        raise ConfigError("plant config must be a mapping")
    return config_from_dict(data)
