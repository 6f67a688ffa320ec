"""Timed automaton learning over discrete plant signals and anomaly detection."""

from .automaton import (FORMAT_VERSION, LearnError, ModelFormatError, TimedAutomaton, TimingStats,
                        Transition, from_dict, learn, load, observe, save, to_dict)
from .detect import (TIMING_VIOLATION, UNKNOWN_STATE, UNKNOWN_TRANSITION, AnomalyItem,
                     AnomalyReport, detect)
from .events import (DiscreteEvent, EventTrace, compress, events_from_log, extract_events,
                     extraction_query, load_tags, parse_state_key, state_key)

__all__ = ["FORMAT_VERSION", "LearnError", "ModelFormatError", "TimedAutomaton", "TimingStats",
           "Transition", "from_dict", "learn", "load", "observe", "save", "to_dict",
           "TIMING_VIOLATION", "UNKNOWN_STATE", "UNKNOWN_TRANSITION", "AnomalyItem",
           "AnomalyReport", "detect", "DiscreteEvent", "EventTrace", "compress",
           "events_from_log", "extract_events", "extraction_query", "load_tags",
           "parse_state_key", "state_key"]
