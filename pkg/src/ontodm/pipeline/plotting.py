"""PNG figures for the run report (headless matplotlib)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..otala.detect import TIMING_VIOLATION  # noqa: E402
from ..otala.events import state_key  # noqa: E402

_META = {"Software": None}


def plot_levels(records, path, title: str = "Tank levels") -> Path:
    """Continuous level signals over time, one line per tag."""
    series: dict[str, tuple[list, list]] = {}
    t0 = records[0].timestamp if records else 0
    for r in records:
        if r.kind != "continuous":
            continue
        xs, ys = series.setdefault(r.tag, ([], []))
        xs.append((r.timestamp - t0) / 1000.0)
        ys.append(float(r.value))
    fig, ax = plt.subplots(figsize=(9, 3.5))
    for tag in sorted(series):
        ax.plot(*series[tag], label=tag, linewidth=0.9)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("level [L]")
    ax.set_title(title)
    if series:
        ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def dwell_ratios(automaton, trace, tolerance: float):
    """(event index, observed dwell / allowed hi) for every event on a known transition."""
    assignment = dict(trace.initial)
    current = state_key(assignment)
    entered = trace.start
    out = []
    for i, e in enumerate(trace.events):
        tr = automaton.transitions.get((current, e.label))
        if tr is not None:
            hi = tr.timing.interval(tolerance)[1]
            dwell = (e.timestamp - entered) / 1000.0
            if hi > 0:
                out.append((i, dwell / hi))
        assignment = {**assignment, e.tag: e.value}
        current = state_key(assignment)
        entered = e.timestamp
    return out


def plot_timing(automaton, trace, report, tolerance: float, path) -> Path:
    """Observed dwell relative to the upper bound of the learned interval; violations in red."""
    points = dwell_ratios(automaton, trace, tolerance)
    flagged = {i.event_index for i in report.items if i.kind == TIMING_VIOLATION}
    fig, ax = plt.subplots(figsize=(9, 3.5))
    ok = [(i, r) for i, r in points if i not in flagged]
    bad = [(i, r) for i, r in points if i in flagged]
    if ok:
        ax.scatter(*zip(*ok), s=10, color="tab:blue", label="within interval")
    if bad:
        ax.scatter(*zip(*bad), s=18, color="tab:red", label="timing violation")
    ax.axhline(1.0, color="gray", linestyle="--", linewidth=0.8)
    ax.set_xlabel("event index")
    ax.set_ylabel("dwell / allowed max")
    ax.set_title(f"Transition timing (tolerance {tolerance:g})")
    if points:
        ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path
