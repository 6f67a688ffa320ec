"""Fixed-step simulation of the mixing module with recipe control and fault injection."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from ..kg.terms import format_datetime_ms, parse_datetime_ms
from .config import ConfigError, PlantConfig

LOG_HEADER = ("timestamp", "tag", "value", "kind")
EPS = 1e-9


@dataclass(frozen=True)
class Clog:
    valve: str
    factor: float
    from_time: float = 0.0

    def __post_init__(self):
        if not 0 < self.factor < 1:
            raise ConfigError("clog factor must lie strictly between 0 and 1")
        if self.from_time < 0:
            raise ConfigError("anomaly from_time must be >= 0")


@dataclass(frozen=True)
class StuckValve:
    valve: str
    state: bool
    from_time: float = 0.0

    def __post_init__(self):
        if self.from_time < 0:
            raise ConfigError("anomaly from_time must be >= 0")


def parse_anomaly(text: str):
    """``clog:<valve>:<factor>:<from_s>`` or ``stuck:<valve>:open|closed:<from_s>``."""
    parts = text.split(":")
    try:
        if parts[0] == "clog" and len(parts) in (3, 4):
            return Clog(parts[1], float(parts[2]), float(parts[3]) if len(parts) == 4 else 0.0)
        if parts[0] == "stuck" and len(parts) in (3, 4) and parts[2] in ("open", "closed"):
            return StuckValve(parts[1], parts[2] == "open", float(parts[3]) if len(parts) == 4 else 0.0)
    except ValueError:
        pass
    raise ConfigError(f"malformed anomaly {text!r}")


@dataclass(frozen=True)
class SensorLogRecord:
    timestamp: int  # ms since epoch, UTC
    tag: str
    value: str
    kind: str  # discrete | continuous

    def row(self) -> tuple[str, str, str, str]:
        return (format_datetime_ms(self.timestamp), self.tag, self.value, self.kind)


@dataclass
class EngineeringDoc:
    components: list[dict]
    tags: list[dict]
    processes: list[dict]

    def tag_names(self) -> set[str]:
        return {t["tag"] for t in self.tags}


@dataclass(frozen=True)
class PhaseRun:
    cycle: int
    phase: str
    start: float  # seconds since simulation start
    end: float
    timed_out: bool = False

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass
class SimResult:
    records: list[SensorLogRecord]
    engineering: EngineeringDoc
    phases: list[PhaseRun]
    initial_volume: float
    final_volume: float
    max_step_residual: float
    level_range: dict = field(default_factory=dict)  # tank -> (min, max) over all steps
    cycles_completed: int = 0

    def phase_durations(self, phase_id: str) -> list[float]:
        return [p.duration for p in self.phases if p.phase == phase_id]


def engineering_doc(config: PlantConfig) -> EngineeringDoc:
    tags = []
    for t in config.tanks:
        tags.append({"tag": t.level_tag, "foi": t.component, "property": f"{t.component}.fillLevel",
                     "datatype": "decimal", "kind": "continuous", "host": t.transmitter})
    fs = config.full_switch
    if fs is not None:
        comp = config.tank(fs.tank).component
        tags.append({"tag": fs.tag, "foi": comp, "property": f"{comp}.isFull",
                     "datatype": "boolean", "kind": "discrete", "host": fs.switch})
    for v in config.valves:
        tags.append({"tag": v.tag, "foi": v.component, "property": f"{v.component}.isOpen",
                     "datatype": "boolean", "kind": "discrete", "host": v.component})
    if config.pump is not None:
        p = config.pump
        tags.append({"tag": p.tag, "foi": p.component, "property": f"{p.component}.isOn",
                     "datatype": "boolean", "kind": "discrete", "host": p.component})
    comps = [dict(c) for c in config.components]
    _check_tree(comps, "id")
    procs = [dict(p) for p in config.processes]
    _check_tree(procs, "process")
    return EngineeringDoc(comps, tags, procs)


def _check_tree(rows: list[dict], key: str):
    ids = {r[key] for r in rows}
    if len(ids) != len(rows):
        raise ConfigError(f"duplicate {key} in engineering hierarchy")
    parent = {r[key]: r.get("parent") or "" for r in rows}
    for node in ids:
        seen = set()
        while node:
            if node in seen:
                raise ConfigError(f"cycle in hierarchy at {node!r}")
            seen.add(node)
            node = parent.get(node, None)
            if node is None:
                raise ConfigError("hierarchy references an unknown parent")


class _Controller:
    """Recipe state: current phase, its jittered target and elapsed steps."""

    def __init__(self, config: PlantConfig, rng: random.Random):
        self.config = config
        self.rng = rng
        self.index = 0
        self.cycle = 0
        self.start_step = 0
        self.target = 0.0

    @property
    def phase(self):
        return self.config.recipe[self.index]

    def enter(self, step: int):
        self.start_step = step
        end = self.phase.end
        j = self.config.jitter
        u = self.rng.uniform(-j, j)
        if end.kind == "level":
            self.target = end.threshold * (1 + u)
        elif end.kind == "duration":
            self.target = end.seconds * (1 + u)
        else:
            self.target = 0.0

    def finished(self, step: int, levels: dict, signals: dict) -> bool:
        end = self.phase.end
        if end.kind == "level":
            lv = levels[end.tank]
            return lv >= self.target - EPS if end.rising else lv <= self.target + EPS
        if end.kind == "signal":
            return signals[end.signal] == "true"
        return (step - self.start_step) * self.config.dt >= self.target - EPS

    def timed_out(self, step: int) -> bool:
        return (step - self.start_step) * self.config.dt >= self.config.phase_timeout - EPS

    def advance(self, step: int) -> bool:
        """Go to the next phase; True when a full cycle just completed."""
        self.index = (self.index + 1) % len(self.config.recipe)
        wrapped = self.index == 0
        if wrapped:
            self.cycle += 1
        self.enter(step)
        return wrapped


def simulate(config: PlantConfig, seed: int = 0, duration: float | None = None,
             anomalies=(), cycles: int | None = None) -> SimResult:
    """Run the plant until ``duration`` seconds or ``cycles`` full recipe cycles, whichever first.

    Each step moves ``nominal_flow * clog_factor * dt`` litres along every
    path whose actuators are all active, limited by the source volume and
    the free capacity of the targets, so volume is conserved exactly.
    """
    if duration is None and cycles is None:
        raise ConfigError("give a duration or a number of cycles")
    if duration is not None and duration < 0:
        raise ConfigError("duration must be >= 0")
    valve_ids = {v.id for v in config.valves}
    for a in anomalies:
        if a.valve not in valve_ids:
            raise ConfigError(f"anomaly references unknown valve {a.valve!r}")
    rng = random.Random(seed)
    dt = config.dt
    t0 = parse_datetime_ms(config.start)
    levels = {t.id: t.initial_level for t in config.tanks}
    capacity = {t.id: t.capacity for t in config.tanks}
    level_range = {k: (v, v) for k, v in levels.items()}
    initial_volume = math.fsum(levels.values())
    ctl = _Controller(config, rng)
    ctl.enter(0)
    records: list[SensorLogRecord] = []
    phases: list[PhaseRun] = []
    last_discrete: dict[str, str] = {}
    max_residual = 0.0
    max_steps = math.inf if duration is None else round(duration / dt)

    def actual_state(step: int) -> dict[str, bool]:
        t = step * dt
        state = {a: a in ctl.phase.active for a in config.actuator_ids()}
        for a in anomalies:
            if isinstance(a, StuckValve) and t >= a.from_time - EPS:
                state[a.valve] = a.state
        return state

    def signals() -> dict[str, str]:
        fs = config.full_switch
        if fs is None:
            return {}
        return {fs.tag: "true" if levels[fs.tank] >= fs.threshold - EPS else "false"}

    def emit(step: int, sample: bool, state: dict[str, bool]):
        ts = t0 + step * config.dt_ms
        batch = []
        discrete = {config.actuator_tag(a): "true" if on else "false" for a, on in state.items()}
        discrete.update(signals())
        for tag, value in discrete.items():
            if last_discrete.get(tag) != value:
                last_discrete[tag] = value
                batch.append(SensorLogRecord(ts, tag, value, "discrete"))
        if sample:
            for tank in config.tanks:
                batch.append(SensorLogRecord(ts, tank.level_tag, f"{levels[tank.id]:.3f}", "continuous"))
        batch.sort(key=lambda r: r.tag)
        records.extend(batch)

    state = actual_state(0)
    emit(0, True, state)
    step = 0
    while step < max_steps:
        step += 1
        t_prev = (step - 1) * dt
        before = math.fsum(levels.values())
        for v in config.valves:
            if not state[v.id] or (v.via is not None and not state[v.via]):
                continue
            rate = config.pump.nominal_flow if v.via is not None else v.nominal_flow
            for a in anomalies:
                if isinstance(a, Clog) and a.valve == v.id and t_prev >= a.from_time - EPS:
                    rate *= a.factor
            # split evenly over the targets that still have room
            open_targets = [tg for tg in v.targets if capacity[tg] - levels[tg] > EPS]
            if not open_targets:
                continue
            n = len(open_targets)
            free = min(capacity[tg] - levels[tg] for tg in open_targets)
            amount = max(0.0, min(rate * dt, levels[v.source], free * n))
            if amount <= 0:
                continue
            levels[v.source] -= amount
            for tg in open_targets:
                levels[tg] += amount / n
        for k in levels:
            levels[k] = min(max(levels[k], 0.0), capacity[k])
            lo, hi = level_range[k]
            level_range[k] = (min(lo, levels[k]), max(hi, levels[k]))
        max_residual = max(max_residual, abs(math.fsum(levels.values()) - before))

        done = False
        sig = signals()
        if ctl.finished(step, levels, sig) or ctl.timed_out(step):
            timed_out = not ctl.finished(step, levels, sig)
            phases.append(PhaseRun(ctl.cycle, ctl.phase.id, ctl.start_step * dt, step * dt, timed_out))
            wrapped = ctl.advance(step)
            done = wrapped and cycles is not None and ctl.cycle >= cycles
        state = actual_state(step)
        emit(step, step % config.sample_steps == 0 or done, state)
        if done:
            break
    return SimResult(records, engineering_doc(config), phases, initial_volume,
                     math.fsum(levels.values()), max_residual, level_range, ctl.cycle)


def emit_log(records, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    prev = None
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LOG_HEADER)
        for r in records:
            if prev is not None and r.timestamp < prev:
                raise ValueError("records are not time-ordered")
            prev = r.timestamp
            w.writerow(r.row())
    return path


def read_log(path) -> list[SensorLogRecord]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != LOG_HEADER:
            raise ValueError(f"{path}: expected header {','.join(LOG_HEADER)}")
        return [SensorLogRecord(parse_datetime_ms(ts), tag, value, kind)
                for ts, tag, value, kind in reader]


ENGINEERING_FILES = {
    "components": ("components.csv", ("id", "class", "parent")),
    "tags": ("tags.csv", ("tag", "foi", "property", "datatype", "kind", "host")),
    "processes": ("processes.csv", ("process", "class", "performed_by", "parent")),
}


def emit_engineering(doc: EngineeringDoc, directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for attr, (name, columns) in ENGINEERING_FILES.items():
        path = directory / name
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in getattr(doc, attr):
                w.writerow([row.get(c, "") or "" for c in columns])
        out.append(path)
    return out
