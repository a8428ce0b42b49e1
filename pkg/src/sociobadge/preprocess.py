"""Signal-repair strategies for badge event logs.

Each strategy maps a normalized :class:`~sociobadge.core.EventLog` to a new
normalized log and leaves its input untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import EventLog, InteractionEvent, merge_intervals, normalize

MIN_DURATION = "min_duration"
INTERPOLATE = "interpolate"
TRIADIC_CLOSURE = "triadic_closure"
KINDS = (MIN_DURATION, INTERPOLATE, TRIADIC_CLOSURE)

# bound on segments * N * N floats held at once during closure
_CLOSURE_CHUNK_CELLS = 4_000_000


@dataclass(frozen=True)
class StrategySpec:
    kind: str
    cutoff_seconds: Optional[int] = None
    iterations: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}; expected one of {KINDS}")
        if self.kind == TRIADIC_CLOSURE:
            if self.cutoff_seconds is not None:
                raise ValueError("triadic_closure takes iterations, not cutoff_seconds")
            if self.iterations is None or int(self.iterations) < 1:
                raise ValueError(f"triadic_closure needs iterations >= 1, got {self.iterations}")
        else:
            if self.iterations is not None:
                raise ValueError(f"{self.kind} takes cutoff_seconds, not iterations")
            if self.cutoff_seconds is None or int(self.cutoff_seconds) < 0:
                raise ValueError(f"{self.kind} needs cutoff_seconds >= 0, got {self.cutoff_seconds}")

    @classmethod
    def min_duration(cls, cutoff: int) -> "StrategySpec":
        return cls(MIN_DURATION, cutoff_seconds=int(cutoff))

    @classmethod
    def interpolate(cls, max_gap: int) -> "StrategySpec":
        return cls(INTERPOLATE, cutoff_seconds=int(max_gap))

    @classmethod
    def triadic_closure(cls, iterations: int) -> "StrategySpec":
        return cls(TRIADIC_CLOSURE, iterations=int(iterations))

    @classmethod
    def for_kind(cls, kind: str, value: int) -> "StrategySpec":
        if kind == TRIADIC_CLOSURE:
            return cls.triadic_closure(value)
        return cls(kind, cutoff_seconds=int(value))

    @property
    def value(self) -> int:
        return self.iterations if self.kind == TRIADIC_CLOSURE else self.cutoff_seconds  # type: ignore[return-value]

    @classmethod
    def parse(cls, text: str) -> "StrategySpec":
        """Parse ``"kind:value"``, e.g. ``"interpolate:75"``."""
        kind, sep, value = text.strip().partition(":")
        if not sep:
            raise ValueError(f"strategy {text!r} is not of the form kind:value")
        try:
            number = int(value)
        except ValueError:
            raise ValueError(f"strategy {text!r}: value must be an integer") from None
        return cls.for_kind(kind.strip(), number)

    def __str__(self) -> str:
        return f"{self.kind}:{self.value}"

    def apply(self, log: EventLog) -> EventLog:
        if self.kind == MIN_DURATION:
            return min_duration_filter(log, self.cutoff_seconds)
        if self.kind == INTERPOLATE:
            return interpolate(log, self.cutoff_seconds)
        return triadic_closure(log, self.iterations)


def parse_pipeline(text: str) -> list[StrategySpec]:
    """Parse a comma-separated pipeline such as ``"interpolate:75,min_duration:55"``."""
    return [StrategySpec.parse(part) for part in text.split(",") if part.strip()]


def min_duration_filter(log: EventLog, cutoff: int) -> EventLog:
    """Drop events strictly shorter than ``cutoff`` seconds."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    kept = tuple(ev for ev in log.events if ev.duration >= cutoff)
    return EventLog(log.roster, log.window, kept)


def interpolate(log: EventLog, max_gap: int) -> EventLog:
    """Merge consecutive same-dyad events whose gap is at most ``max_gap``.

    The gap is measured from the end of one event to the start of the next,
    and merging chains along each dyad's timeline.
    """
    if max_gap < 0:
        raise ValueError(f"max_gap must be >= 0, got {max_gap}")
    events = []
    for dyad, evs in log.by_dyad().items():
        for start, end in merge_intervals(((e.start, e.end) for e in evs), max_gap):
            events.append(InteractionEvent(dyad, start, end))
    events.sort()
    return EventLog(log.roster, log.window, tuple(events))


def _segment_grid(log: EventLog) -> np.ndarray:
    times = {log.window.t0, log.window.t_end}
    for ev in log.events:
        times.add(ev.start)
        times.add(ev.end)
    return np.array(sorted(times), dtype=np.int64)


def triadic_closure(log: EventLog, iterations: int) -> EventLog:
    """Close open triads second by second, ``iterations`` times.

    In every second where A-B and A-C are in contact but B-C is not, B-C
    is added. All additions of one round are computed from the state before
    that round. The contact graph only changes at event boundaries, so the
    work is done on the elementary segments between boundaries, which gives
    the same result as a per-second pass.
    """
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    if not log.events:
        return log
    n = log.n
    pos = {badge: k for k, badge in enumerate(log.roster)}
    grid = _segment_grid(log)
    n_seg = len(grid) - 1

    seg_edges: list[list[tuple[int, int]]] = [[] for _ in range(n_seg)]
    starts = np.searchsorted(grid, [ev.start for ev in log.events])
    stops = np.searchsorted(grid, [ev.end for ev in log.events])
    for ev, lo, hi in zip(log.events, starts, stops):
        i, j = pos[ev.dyad.a], pos[ev.dyad.b]
        for s in range(lo, hi):
            seg_edges[s].append((i, j))

    # a triad can only close where some badge has two contacts
    candidates = [s for s in range(n_seg) if len(seg_edges[s]) >= 2]
    chunk = max(1, _CLOSURE_CHUNK_CELLS // (n * n))
    off_diag = ~np.eye(n, dtype=bool)
    added: list[InteractionEvent] = []
    for c0 in range(0, len(candidates), chunk):
        segs = candidates[c0 : c0 + chunk]
        adj = np.zeros((len(segs), n, n), dtype=bool)
        for k, s in enumerate(segs):
            for i, j in seg_edges[s]:
                adj[k, i, j] = adj[k, j, i] = True
        initial = adj.copy()
        for _ in range(iterations):
            a = adj.astype(np.float32)
            closed = adj | ((a @ a) > 0) & off_diag
            if np.array_equal(closed, adj):
                break
            adj = closed
        new = np.triu(adj & ~initial, k=1)
        for k, i, j in zip(*np.nonzero(new)):
            s = segs[k]
            added.append(
                InteractionEvent.make(log.roster[i], log.roster[j], int(grid[s]), int(grid[s + 1]))
            )
    if not added:
        return log
    return normalize(list(log.events) + added, log.roster, log.window)


def apply_pipeline(log: EventLog, specs: Iterable[StrategySpec]) -> EventLog:
    for spec in specs:
        log = spec.apply(log)
    return log
