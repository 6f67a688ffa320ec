"""Checking a new trace against a learned automaton."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from ..kg.terms import format_datetime_ms
from .automaton import TimedAutomaton
from .events import EventTrace, state_key

UNKNOWN_STATE = "UnknownState"
UNKNOWN_TRANSITION = "UnknownTransition"
TIMING_VIOLATION = "TimingViolation"
_EPS = 1e-9


@dataclass(frozen=True)
class AnomalyItem:
    event_index: int  # -1 flags an unknown initial vector
    timestamp: int
    kind: str
    source_state: str
    event_label: str
    observed_dwell: float | None = None
    allowed: tuple[float, float] | None = None


@dataclass
class AnomalyReport:
    items: list

    def __len__(self):
        return len(self.items)

    def __bool__(self):
        return bool(self.items)

    def of_kind(self, kind: str) -> list[AnomalyItem]:
        return [i for i in self.items if i.kind == kind]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["event_index", "timestamp", "kind", "source_state", "event",
                    "observed_dwell", "allowed_lo", "allowed_hi"])
        for i in self.items:
            lo, hi = i.allowed if i.allowed else ("", "")
            w.writerow([i.event_index, format_datetime_ms(i.timestamp), i.kind, i.source_state,
                        i.event_label, "" if i.observed_dwell is None else f"{i.observed_dwell:.3f}",
                        lo if lo == "" else f"{lo:.3f}", hi if hi == "" else f"{hi:.3f}"])
        return buf.getvalue()


def detect(automaton: TimedAutomaton, trace: EventTrace, tolerance: float = 0.1) -> AnomalyReport:
    """Walk ``trace`` through the automaton from its initial vector.

    After an unknown transition the walk resynchronizes on the (known)
    target vector. After an unknown state it runs in shadow mode, reporting
    nothing until a known vector comes back.
    """
    if not automaton.states:
        raise ValueError("cannot detect with an empty automaton")
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    items = []
    assignment = {t: trace.initial.get(t) for t in automaton.tags}
    for t, v in trace.initial.items():
        assignment.setdefault(t, v)
    current = state_key(assignment)
    entered = trace.start
    shadow = current not in automaton.states
    if shadow:
        items.append(AnomalyItem(-1, trace.start, UNKNOWN_STATE, current, ""))
    for i, e in enumerate(trace.events):
        dwell = (e.timestamp - entered) / 1000.0
        nxt = {**assignment, e.tag: e.value}
        target = state_key(nxt)
        if shadow:
            shadow = target not in automaton.states
        elif target not in automaton.states:
            items.append(AnomalyItem(i, e.timestamp, UNKNOWN_STATE, current, e.label, dwell))
            shadow = True
        else:
            tr = automaton.transitions.get((current, e.label))
            if tr is None:
                items.append(AnomalyItem(i, e.timestamp, UNKNOWN_TRANSITION, current, e.label, dwell))
            else:
                lo, hi = tr.timing.interval(tolerance)
                if not lo - _EPS <= dwell <= hi + _EPS:
                    items.append(AnomalyItem(i, e.timestamp, TIMING_VIOLATION, current, e.label,
                                             dwell, (lo, hi)))
        assignment, current, entered = nxt, target, e.timestamp
    return AnomalyReport(items)
