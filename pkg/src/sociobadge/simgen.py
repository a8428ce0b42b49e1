"""Synthetic ground truth and a badge degradation model.

Ground truth is a schedule of conversation groups; every pair inside a group
is in contact for the group's whole span. The degradation model is a
deliberately small stand-in for badge physics: it punches random gaps into
each true contact (signal flicker) and stretches short surviving fragments
to the firmware's aggregation quantum. It never invents contacts between
pairs that were not interacting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .aggregate import NominationNetwork, WeightedNetwork
from .core import Dyad, EventLog, InteractionEvent, ObservationWindow, normalize


@dataclass(frozen=True)
class GeometryParams:
    """Badge-to-badge and badge-to-reader detection ranges (metres, degrees)."""

    max_edge_distance_m: float = 1.61
    distance_sd_m: float = 0.35
    half_angle_deg: float = 32.6
    half_angle_sd_deg: float = 7.56
    reader_range_clear_m: float = 50.0
    reader_range_person_m: float = 26.8
    reader_range_person_sd_m: float = 0.54

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


def detect_edge(
    distance_m: float,
    angle_a_deg: float,
    angle_b_deg: float,
    geometry: GeometryParams = GeometryParams(),
    rng: Optional[np.random.Generator] = None,
) -> bool:
    """Whether two badges register a contact.

    Angles are each badge's deviation from facing the other. With ``rng``
    the distance and angle thresholds are drawn from normals around the
    configured means instead of being used as-is.
    """
    if distance_m < 0:
        raise ValueError(f"distance must be >= 0, got {distance_m}")
    for angle in (angle_a_deg, angle_b_deg):
        if not 0 <= angle <= 180:
            raise ValueError(f"angle must be in [0, 180], got {angle}")
    max_dist, max_angle = geometry.max_edge_distance_m, geometry.half_angle_deg
    if rng is not None:
        max_dist = max(0.0, rng.normal(max_dist, geometry.distance_sd_m))
        max_angle = max(0.0, rng.normal(max_angle, geometry.half_angle_sd_deg))
    return distance_m <= max_dist and angle_a_deg <= max_angle and angle_b_deg <= max_angle


def reader_detects(
    distance_m: float,
    occluded: bool = False,
    geometry: GeometryParams = GeometryParams(),
    rng: Optional[np.random.Generator] = None,
) -> bool:
    """Whether a reader hears a badge, optionally with a person in between."""
    if not occluded:
        return distance_m <= geometry.reader_range_clear_m
    limit = geometry.reader_range_person_m
    if rng is not None:
        limit = rng.normal(limit, geometry.reader_range_person_sd_m)
    return distance_m <= limit


@dataclass(frozen=True)
class Group:
    members: frozenset
    start: int
    end: int

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(m) for m in self.members))
        if len(self.members) < 2:
            raise ValueError(f"group needs at least two members: {sorted(self.members)}")
        if self.end < self.start:
            raise ValueError(f"group ends before it starts: [{self.start}, {self.end})")


@dataclass(frozen=True)
class Scenario:
    """Roster ``1..n`` over a window with a schedule of conversation groups."""

    n: int
    window: ObservationWindow
    groups: tuple[Group, ...] = field(default_factory=tuple)

    @property
    def roster(self) -> tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    def validate(self) -> None:
        """Raise if a badge is off-roster or sits in two groups at once."""
        spans: dict[int, list[tuple[int, int, int]]] = {}
        for g_idx, g in enumerate(self.groups):
            for m in g.members:
                if not 1 <= m <= self.n:
                    raise ValueError(f"group {g_idx}: badge {m} not in roster 1..{self.n}")
                spans.setdefault(m, []).append((g.start, g.end, g_idx))
        for badge, items in spans.items():
            busy_until, busy_group = -math.inf, None
            for start, end, g_idx in sorted(i for i in items if i[1] > i[0]):
                if start < busy_until:
                    raise ValueError(
                        f"badge {badge} is in groups {busy_group} and {g_idx} at the same time"
                    )
                busy_until, busy_group = end, g_idx


def generate_truth(scenario: Scenario, rng_seed: Optional[int] = None) -> EventLog:
    """Expand every group into contacts between all of its members.

    The schedule fully determines the result; ``rng_seed`` is accepted so
    all generators share one calling convention.
    """
    scenario.validate()
    events = [
        InteractionEvent.make(a, b, g.start, g.end)
        for g in scenario.groups
        for a, b in combinations(sorted(g.members), 2)
    ]
    return normalize(events, scenario.roster, scenario.window)


def random_scenario(
    n: int,
    duration_s: int,
    seed: int,
    *,
    t0: int = 0,
    mean_group_s: float = 180.0,
    min_group_s: int = 20,
    max_group_size: int = 4,
    join_prob: float = 0.6,
    tick_s: int = 10,
    min_dyad_gap_s: int = 0,
) -> Scenario:
    """Random schedule of non-overlapping conversation groups.

    Every ``tick_s`` seconds idle badges may form groups of 2 to
    ``max_group_size`` members with exponential durations. A pair is only
    put together again once more than ``min_dyad_gap_s`` seconds have
    passed since its last contact ended, so the truth never holds two
    same-pair contacts closer than that.
    """
    rng = np.random.default_rng(seed)
    window = ObservationWindow(t0, t0 + duration_s)
    free_at = {p: t0 for p in range(1, n + 1)}
    last_end: dict[tuple[int, int], int] = {}
    groups = []
    for t in range(t0, window.t_end - min_group_s, tick_s):
        idle = [p for p in range(1, n + 1) if free_at[p] <= t and rng.random() < join_prob]
        rng.shuffle(idle)
        while len(idle) >= 2:
            size = int(rng.integers(2, max_group_size + 1))
            members, idle = idle[:size], idle[size:]
            if len(members) < 2:
                break
            pairs = list(combinations(sorted(members), 2))
            if any(t - last_end.get(p, -math.inf) <= min_dyad_gap_s for p in pairs):
                continue
            length = max(min_group_s, int(rng.exponential(mean_group_s)))
            end = min(t + length, window.t_end)
            groups.append(Group(frozenset(int(m) for m in members), t, end))
            pause = int(rng.integers(0, 60))
            for m in members:
                free_at[m] = end + pause
            for p in pairs:
                last_end[p] = end
    return Scenario(n, window, tuple(groups))


@dataclass(frozen=True)
class DegradationParams:
    """Flicker model. ``min_quantum_s`` of 0 or 1 disables quantization."""

    dropout_gap_mean_s: float = 20.0
    dropout_gap_max_s: int = 75
    dropout_rate_per_min: float = 1.0
    min_quantum_s: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.min_quantum_s < 0:
            raise ValueError("min_quantum_s must be >= 0")
        if self.dropout_rate_per_min < 0 or self.dropout_gap_mean_s < 0 or self.dropout_gap_max_s < 0:
            raise ValueError("dropout parameters must be >= 0")


def _dyad_rng(seed: int, dyad: Dyad) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, dyad.a, dyad.b]))


def _punch(start: int, end: int, params: DegradationParams, rng: np.random.Generator):
    """Gaps inside ``[start, end)`` with at least one live second on each side."""
    length = end - start
    count = rng.poisson(params.dropout_rate_per_min * length / 60.0)
    if count == 0 or params.dropout_gap_max_s < 1:
        return []
    lengths = np.clip(np.rint(rng.exponential(params.dropout_gap_mean_s, count)), 1, params.dropout_gap_max_s)
    gaps: list[tuple[int, int]] = []
    for g in lengths.astype(int):
        hi = end - 1 - g
        if hi < start + 1:
            continue
        u = int(rng.integers(start + 1, hi + 1))
        if all(u >= ge + 1 or u + g + 1 <= gs for gs, ge in gaps):
            gaps.append((u, u + g))
    return sorted(gaps)


def degrade(truth: EventLog, params: DegradationParams, return_gaps: bool = False):
    """Flicker each true contact and apply the minimum-duration quantum.

    Each dyad draws from its own stream derived from ``params.seed`` so the
    result does not depend on iteration order. With ``return_gaps`` the
    punched gaps are returned as well, keyed by dyad.
    """
    fragments: list[InteractionEvent] = []
    punched: dict[Dyad, list[tuple[int, int]]] = {}
    q = params.min_quantum_s
    for dyad, evs in truth.by_dyad().items():
        rng = _dyad_rng(params.seed, dyad)
        for ev in evs:
            gaps = _punch(ev.start, ev.end, params, rng)
            if gaps:
                punched.setdefault(dyad, []).extend(gaps)
            cursor = ev.start
            pieces = []
            for gs, ge in gaps:
                pieces.append((cursor, gs))
                cursor = ge
            pieces.append((cursor, ev.end))
            for s, e in pieces:
                if q > 1 and e - s < q:
                    e = min(s + q, truth.window.t_end)
                fragments.append(InteractionEvent(dyad, s, e))
    log = normalize(fragments, truth.roster, truth.window)
    return (log, punched) if return_gaps else log


def delete_events(log: EventLog, prob: float, seed: int) -> EventLog:
    """Drop each event independently with probability ``prob``."""
    rng = np.random.default_rng(seed)
    keep = rng.random(len(log.events)) >= prob
    return EventLog(log.roster, log.window, tuple(ev for ev, k in zip(log.events, keep) if k))


def simulate_nominations(
    truth_minutes: WeightedNetwork,
    intercept: float,
    slope: float,
    seed: int,
    respond_prob: float = 1.0,
    respondents: Optional[Sequence[int]] = None,
) -> NominationNetwork:
    """Survey answers where ``P(i names j) = expit(intercept + slope * minutes_ij)``."""
    rng = np.random.default_rng(seed)
    roster = truth_minutes.roster
    if respondents is None:
        respondents = [b for b in roster if rng.random() < respond_prob]
    respondents = frozenset(int(r) for r in respondents)
    n = len(roster)
    eta = intercept + slope * truth_minutes.weights
    prob = 1.0 / (1.0 + np.exp(-eta))
    draws = rng.random((n, n)) < prob
    observed = np.array([[b in respondents and a != k for k in range(n)] for a, b in enumerate(roster)])
    return NominationNetwork(roster, draws & observed, observed, respondents)
