"""Discrete event traces, read from a knowledge graph or straight from a sensor log."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..kg.terms import IRI, Literal, parse_datetime_ms
from ..query import ValuesClause, evaluate, parse_query

log = logging.getLogger(__name__)

TAG_NAMESPACE = "http://example.org/ModVA#"


@dataclass(frozen=True)
class DiscreteEvent:
    timestamp: int  # ms, UTC
    tag: str
    value: str

    @property
    def label(self) -> str:
        return f"{self.tag}→{self.value}"


@dataclass
class EventTrace:
    """Initial assignment of every tag at ``start`` followed by single-tag changes."""

    tags: tuple[str, ...]
    initial: dict
    start: int
    events: list

    def __len__(self):
        return len(self.events)


def state_key(assignment: dict) -> str:
    return ";".join(f"{t}={assignment[t]}" for t in sorted(assignment))


def parse_state_key(key: str) -> dict:
    out = {}
    for part in key.split(";") if key else []:
        tag, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"malformed state key {key!r}")
        out[tag] = value
    return out


def compress(samples, tags) -> EventTrace:
    """Turn (ms, tag, value) samples into an EventTrace.

    Samples are ordered by (time, tag). A tag's first sample sets its
    initial value; later samples only yield an event when the value changes.
    """
    tags = tuple(sorted(set(tags)))
    ordered = sorted(samples, key=lambda s: (s[0], s[1]))
    initial: dict = {}
    current: dict = {}
    events = []
    start = ordered[0][0] if ordered else 0
    for ts, tag, value in ordered:
        if tag not in tags:
            continue
        if tag not in current:
            initial[tag] = value
            current[tag] = value
        elif current[tag] != value:
            current[tag] = value
            events.append(DiscreteEvent(ts, tag, value))
    missing = [t for t in tags if t not in initial]
    for t in missing:
        log.warning("tag %s has no observations", t)
    return EventTrace(tuple(t for t in tags if t in initial), initial, start, events)


def extraction_query(tags, namespace: str = TAG_NAMESPACE):
    text = resources.files("ontodm.data").joinpath("events.rq").read_text("utf-8")
    q = parse_query(text)
    rows = tuple((IRI(namespace + t),) for t in sorted(tags))
    return dataclasses.replace(q, values=ValuesClause(("sensor",), rows))


def extract_events(source, tags, namespace: str = TAG_NAMESPACE) -> EventTrace:
    """Query discrete observations for ``tags`` and compress them to change events."""
    tags = sorted(set(tags))
    if not tags:
        return EventTrace((), {}, 0, [])
    table = evaluate(extraction_query(tags, namespace), source)
    samples = []
    for sensor, time, result in table.rows:
        tag = sensor.value[len(namespace):] if sensor.value.startswith(namespace) else sensor.value
        if not isinstance(time, Literal):
            continue
        samples.append((parse_datetime_ms(time.lexical), tag,
                        result.lexical if isinstance(result, Literal) else str(result)))
    return compress(samples, tags)


def events_from_log(records, tags) -> EventTrace:
    """Same trace as ``extract_events`` but from SensorLogRecords (discrete rows only)."""
    samples = [(r.timestamp, r.tag, r.value) for r in records if r.kind == "discrete"]
    return compress(samples, tags)


def load_tags(path) -> list[str]:
    """One tag per line; ``#`` comments. A tags.csv table yields its discrete tags."""
    path = Path(path)
    text = path.read_text("utf-8")
    if path.suffix == ".csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        return sorted(r["tag"] for r in rows if r.get("kind") == "discrete")
    return sorted({ln.split("#", 1)[0].strip() for ln in text.splitlines()} - {""})
