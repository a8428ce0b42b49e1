"""Interaction events, event logs and per-second dyad rasters.

All timestamps are integer seconds. Intervals are half-open ``[start, end)``,
so an event covers ``end - start`` seconds and two events of the same dyad
with ``end1 == start2`` are indistinguishable from one longer event.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

BadgeId = int


@dataclass(frozen=True, order=True)
class Dyad:
    """Unordered pair of badges, stored with ``a < b``."""

    a: BadgeId
    b: BadgeId

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"self-loop dyad ({self.a}, {self.b})")
        if self.a > self.b:
            raise ValueError(f"dyad not canonical: {self.a} > {self.b}; use Dyad.of()")

    @classmethod
    def of(cls, i: BadgeId, j: BadgeId) -> "Dyad":
        i, j = int(i), int(j)
        return cls(min(i, j), max(i, j))

    def __iter__(self) -> Iterator[BadgeId]:
        yield self.a
        yield self.b


@dataclass(frozen=True, order=True)
class InteractionEvent:
    dyad: Dyad
    start: int
    end: int

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"event ends before it starts: [{self.start}, {self.end})")

    @classmethod
    def make(cls, i: BadgeId, j: BadgeId, start: int, end: int) -> "InteractionEvent":
        return cls(Dyad.of(i, j), int(start), int(end))

    @property
    def duration(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class ObservationWindow:
    t0: int
    t_end: int

    def __post_init__(self):
        if self.t_end <= self.t0:
            raise ValueError(f"empty observation window [{self.t0}, {self.t_end})")

    @property
    def seconds(self) -> int:
        return self.t_end - self.t0


def all_dyads(roster: Iterable[BadgeId]) -> tuple[Dyad, ...]:
    """Every unordered pair of the roster, in lexicographic order."""
    ids = sorted(set(int(i) for i in roster))
    return tuple(Dyad(a, b) for a, b in combinations(ids, 2))


@dataclass(frozen=True)
class EventLog:
    """Normalized interaction events over a window.

    Build instances through :func:`normalize` (or :func:`extract_events`);
    the constructor does not re-check the disjointness invariant.
    """

    roster: tuple[BadgeId, ...]
    window: ObservationWindow
    events: tuple[InteractionEvent, ...] = ()

    @property
    def n(self) -> int:
        return len(self.roster)

    @property
    def dyads(self) -> tuple[Dyad, ...]:
        return all_dyads(self.roster)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[InteractionEvent]:
        return iter(self.events)

    def by_dyad(self) -> dict[Dyad, list[InteractionEvent]]:
        out: dict[Dyad, list[InteractionEvent]] = {}
        for ev in self.events:
            out.setdefault(ev.dyad, []).append(ev)
        return out

    def covered_seconds(self) -> int:
        return sum(ev.duration for ev in self.events)

    def replace_events(self, events: Iterable[InteractionEvent]) -> "EventLog":
        return normalize(list(events), self.roster, self.window)


def normalize(
    raw_events: Sequence[InteractionEvent],
    roster: Iterable[BadgeId],
    window: ObservationWindow,
) -> EventLog:
    """Canonicalize raw events into an :class:`EventLog`.

    Events that partially overlap the window are clipped to it, zero-length
    events are dropped and same-dyad events that overlap or touch are unioned.

    Raises
    ------
    ValueError
        If an event lies entirely outside the window, references a badge not
        on the roster, or is a self-loop. The message names the event index.
    """
    roster_t = tuple(sorted(set(int(i) for i in roster)))
    members = set(roster_t)
    per_dyad: dict[Dyad, list[tuple[int, int]]] = {}
    for idx, ev in enumerate(raw_events):
        a, b = ev.dyad.a, ev.dyad.b
        if a == b:
            raise ValueError(f"event {idx}: self-loop on badge {a}")
        if a not in members or b not in members:
            raise ValueError(f"event {idx}: badge pair ({a}, {b}) not in roster")
        if ev.end < ev.start:
            raise ValueError(f"event {idx}: end {ev.end} before start {ev.start}")
        if ev.start == ev.end:
            outside = not window.t0 <= ev.start <= window.t_end
        else:
            outside = ev.start >= window.t_end or ev.end <= window.t0
        if outside:
            raise ValueError(
                f"event {idx}: [{ev.start}, {ev.end}) outside window "
                f"[{window.t0}, {window.t_end})"
            )
        start = max(ev.start, window.t0)
        end = min(ev.end, window.t_end)
        if end > start:
            per_dyad.setdefault(Dyad.of(a, b), []).append((start, end))

    events: list[InteractionEvent] = []
    for dyad in sorted(per_dyad):
        for start, end in merge_intervals(per_dyad[dyad]):
            events.append(InteractionEvent(dyad, start, end))
    return EventLog(roster_t, window, tuple(events))


def merge_intervals(intervals: Iterable[tuple[int, int]], max_gap: int = 0) -> list[tuple[int, int]]:
    """Union half-open intervals, also joining any separated by ``<= max_gap``.

    >>> merge_intervals([(15, 30), (10, 20), (30, 31), (40, 45)])
    [(10, 31), (40, 45)]
    >>> merge_intervals([(0, 10), (30, 40)], max_gap=20)
    [(0, 40)]
    """
    merged: list[list[int]] = []
    for start, end in sorted(intervals):
        if merged and start - merged[-1][1] <= max_gap:
            if end > merged[-1][1]:
                merged[-1][1] = end
        else:
            merged.append([start, end])
    return [(s, e) for s, e in merged]


@dataclass(frozen=True, eq=False)
class DyadRaster:
    """Per-second binary presence, one row per dyad of the roster.

    ``matrix[d, i]`` is True iff dyad ``dyads[d]`` is in contact during
    second ``[t0 + i, t0 + i + 1)``.
    """

    roster: tuple[BadgeId, ...]
    window: ObservationWindow
    matrix: np.ndarray

    def __post_init__(self):
        expected = (len(all_dyads(self.roster)), self.window.seconds)
        if self.matrix.shape != expected:
            raise ValueError(f"raster shape {self.matrix.shape}, expected {expected}")
        if self.matrix.dtype != np.bool_:
            object.__setattr__(self, "matrix", self.matrix.astype(bool))
        self.matrix.setflags(write=False)

    @property
    def dyads(self) -> tuple[Dyad, ...]:
        return all_dyads(self.roster)

    @property
    def rows(self) -> dict[Dyad, np.ndarray]:
        return dict(zip(self.dyads, self.matrix))

    def row(self, dyad: Dyad) -> np.ndarray:
        return self.matrix[self.dyads.index(dyad)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadRaster):
            return NotImplemented
        return (
            self.roster == other.roster
            and self.window == other.window
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None  # type: ignore[assignment]


def rasterize(log: EventLog) -> DyadRaster:
    dyads = log.dyads
    index = {d: k for k, d in enumerate(dyads)}
    t0 = log.window.t0
    matrix = np.zeros((len(dyads), log.window.seconds), dtype=bool)
    for ev in log.events:
        matrix[index[ev.dyad], ev.start - t0 : ev.end - t0] = True
    return DyadRaster(log.roster, log.window, matrix)


def row_runs(row: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True in a 1-D boolean array as ``(start, stop)`` offsets."""
    padded = np.concatenate(([False], np.asarray(row, dtype=bool), [False]))
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return [(int(s), int(e)) for s, e in zip(edges[::2], edges[1::2])]


def extract_events(raster: DyadRaster) -> EventLog:
    t0 = raster.window.t0
    events = [
        InteractionEvent(dyad, t0 + s, t0 + e)
        for dyad, row in zip(raster.dyads, raster.matrix)
        for s, e in row_runs(row)
    ]
    return EventLog(raster.roster, raster.window, tuple(events))
