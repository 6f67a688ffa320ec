"""Deterministic timed automaton over full discrete state vectors, learned online."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .events import DiscreteEvent, EventTrace, parse_state_key, state_key

FORMAT_VERSION = 1


class LearnError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass
class TimingStats:
    """Dwell statistics of one transition (Welford running mean and M2)."""

    count: int = 0
    min: float = 0.0
    max: float = 0.0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float):
        self.count += 1
        if self.count == 1:
            self.min = self.max = self.mean = x
            self.m2 = 0.0
            return
        self.min = min(self.min, x)
        self.max = max(self.max, x)
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)
        # rounding can push the mean a hair outside [min, max]
        self.mean = min(max(self.mean, self.min), self.max)
        self.m2 = max(self.m2, 0.0)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    def interval(self, tolerance: float) -> tuple[float, float]:
        return self.min * (1 - tolerance), self.max * (1 + tolerance)


@dataclass
class Transition:
    target: str
    timing: TimingStats = field(default_factory=TimingStats)


@dataclass
class TimedAutomaton:
    tags: tuple[str, ...]
    initial: str
    states: set = field(default_factory=set)
    transitions: dict = field(default_factory=dict)  # (state key, event label) -> Transition
    # learner cursor, not part of the model
    current: dict | None = field(default=None, compare=False, repr=False)
    entered_at: int = field(default=0, compare=False, repr=False)

    @classmethod
    def start(cls, initial_vector: dict, start: int = 0) -> "TimedAutomaton":
        key = state_key(initial_vector)
        return cls(tuple(sorted(initial_vector)), key, {key}, {}, dict(initial_vector), start)

    def step_target(self, assignment: dict, event: DiscreteEvent) -> dict:
        if event.tag not in assignment:
            raise LearnError(f"event on tag {event.tag!r} outside the tag universe")
        return {**assignment, event.tag: event.value}

    def check(self):
        """Every transition target equals its source vector updated by the event."""
        for (src, label), tr in self.transitions.items():
            tag, _, value = label.partition("→")
            expected = state_key({**parse_state_key(src), tag: value})
            if expected != tr.target or src not in self.states or tr.target not in self.states:
                raise ModelFormatError(f"inconsistent transition {src} --{label}-->")


def observe(automaton: TimedAutomaton, event: DiscreteEvent) -> TimedAutomaton:
    """One online learning step; creates states and transitions on first sight."""
    if automaton.current is None:
        raise LearnError("automaton has no current state; build it with TimedAutomaton.start")
    if event.timestamp < automaton.entered_at:
        raise LearnError("event precedes the current state's entry time")
    source = state_key(automaton.current)
    nxt = automaton.step_target(automaton.current, event)
    target = state_key(nxt)
    automaton.states.add(target)
    tr = automaton.transitions.get((source, event.label))
    if tr is None:
        tr = automaton.transitions[(source, event.label)] = Transition(target)
    tr.timing.add((event.timestamp - automaton.entered_at) / 1000.0)
    automaton.current = nxt
    automaton.entered_at = event.timestamp
    return automaton


def learn(events, initial_vector: dict | None = None, start: int | None = None) -> TimedAutomaton:
    """Fold ``observe`` over a trace (or a list of events plus initial vector)."""
    if isinstance(events, EventTrace):
        trace = events
        initial_vector = trace.initial if initial_vector is None else initial_vector
        start = trace.start if start is None else start
        events = trace.events
    if initial_vector is None:
        raise LearnError("an initial vector is required")
    events = list(events)
    if start is None:
        start = events[0].timestamp if events else 0
    prev = start
    for i, e in enumerate(events):
        if e.timestamp < prev:
            raise LearnError(f"event {i} is out of order ({e.timestamp} < {prev})")
        prev = e.timestamp
    automaton = TimedAutomaton.start(initial_vector, start)
    for e in events:
        observe(automaton, e)
    return automaton


# -- persistence --

def to_dict(automaton: TimedAutomaton) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "tags": list(automaton.tags),
        "initial": automaton.initial,
        "states": sorted(automaton.states),
        "transitions": [
            {"source": src, "event": label, "target": tr.target, "count": tr.timing.count,
             "min": tr.timing.min, "max": tr.timing.max, "mean": tr.timing.mean, "m2": tr.timing.m2}
            for (src, label), tr in sorted(automaton.transitions.items())
        ],
    }


def from_dict(data: dict) -> TimedAutomaton:
    try:
        if data["format_version"] != FORMAT_VERSION:
            raise ModelFormatError(f"unsupported format_version {data['format_version']!r}")
        a = TimedAutomaton(tuple(data["tags"]), data["initial"], set(data["states"]), {})
        for t in data["transitions"]:
            stats = TimingStats(int(t["count"]), float(t["min"]), float(t["max"]),
                                float(t["mean"]), float(t["m2"]))
            a.transitions[(t["source"], t["event"])] = Transition(t["target"], stats)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ModelFormatError):
            raise
        raise ModelFormatError(f"malformed automaton: {e}") from None
    if a.initial not in a.states:
        raise ModelFormatError("initial state is not among the states")
    a.check()
    return a


def save(automaton: TimedAutomaton, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_dict(automaton), indent=1, ensure_ascii=False) + "\n", "utf-8")
    return path


def load(path) -> TimedAutomaton:
    try:
        data = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: {e}") from None
    if not isinstance(data, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    return from_dict(data)
