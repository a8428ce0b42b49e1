"""Dyad-level aggregation of event logs and self-reported nomination networks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import BadgeId, EventLog

NONE, WEAK, STRONG = "none", "weak", "strong"


@dataclass(frozen=True, eq=False)
class WeightedNetwork:
    """Symmetric matrix of contact minutes, indexed in roster order."""

    roster: tuple[BadgeId, ...]
    weights: np.ndarray

    def __post_init__(self):
        n = len(self.roster)
        if self.weights.shape != (n, n):
            raise ValueError(f"weights shape {self.weights.shape}, expected {(n, n)}")
        if not np.allclose(self.weights, self.weights.T):
            raise ValueError("weights must be symmetric")
        if np.any(np.diag(self.weights) != 0):
            raise ValueError("weights must have an empty diagonal")
        self.weights.setflags(write=False)

    def index(self, badge: BadgeId) -> int:
        return self.roster.index(badge)

    def weight(self, i: BadgeId, j: BadgeId) -> float:
        return float(self.weights[self.index(i), self.index(j)])

    def total(self) -> float:
        """Sum over unordered dyads."""
        return float(np.triu(self.weights, 1).sum())


@dataclass(frozen=True, eq=False)
class NominationNetwork:
    """Directed binary self-report ties with per-pair missingness.

    ``ties[i, j]`` is meaningful only where ``observed[i, j]`` is True. For
    raw survey data a row is observed exactly when its ego responded.
    """

    roster: tuple[BadgeId, ...]
    ties: np.ndarray
    observed: np.ndarray
    respondents: frozenset

    def __post_init__(self):
        n = len(self.roster)
        for name in ("ties", "observed"):
            arr = getattr(self, name)
            if arr.shape != (n, n):
                raise ValueError(f"{name} shape {arr.shape}, expected {(n, n)}")
            if arr.dtype != np.bool_:
                arr = arr.astype(bool)
                object.__setattr__(self, name, arr)
        if np.any(np.diag(self.ties)) or np.any(np.diag(self.observed)):
            raise ValueError("nominations are undefined on the diagonal")
        if np.any(self.ties & ~self.observed):
            raise ValueError("tie recorded on an unobserved pair")
        self.ties.setflags(write=False)
        self.observed.setflags(write=False)

    @classmethod
    def from_pairs(cls, roster, pairs, respondents) -> "NominationNetwork":
        roster = tuple(sorted(int(i) for i in roster))
        pos = {b: k for k, b in enumerate(roster)}
        n = len(roster)
        respondents = frozenset(int(r) for r in respondents)
        observed = np.zeros((n, n), dtype=bool)
        for r in respondents:
            observed[pos[r], :] = True
        np.fill_diagonal(observed, False)
        ties = np.zeros((n, n), dtype=bool)
        for ego, alter in pairs:
            if ego not in respondents:
                raise ValueError(f"nomination by non-respondent {ego}")
            if ego == alter:
                raise ValueError(f"self-nomination by {ego}")
            ties[pos[ego], pos[alter]] = True
        return cls(roster, ties, observed, respondents)

    def value(self, i: BadgeId, j: BadgeId) -> Optional[bool]:
        a, b = self.roster.index(i), self.roster.index(j)
        return bool(self.ties[a, b]) if self.observed[a, b] else None

    def out_degree(self) -> dict[BadgeId, int]:
        return {
            b: int(self.ties[k].sum()) for k, b in enumerate(self.roster) if b in self.respondents
        }


@dataclass(frozen=True)
class Summary:
    mean: Optional[float]
    sd: Optional[float]
    n: int

    @classmethod
    def of(cls, values) -> "Summary":
        x = np.asarray(values, dtype=float)
        if x.size == 0:
            return cls(None, None, 0)
        sd = float(x.std(ddof=1)) if x.size > 1 else None
        return cls(float(x.mean()), sd, int(x.size))


@dataclass(frozen=True)
class Descriptives:
    """Interaction durations in seconds; dyadic and individual totals in minutes."""

    interaction_duration: Summary
    aggregated_dyadic_duration: Summary
    individual_total_duration: Summary


def aggregate_minutes(log: EventLog) -> WeightedNetwork:
    pos = {b: k for k, b in enumerate(log.roster)}
    seconds = np.zeros((log.n, log.n))
    for ev in log.events:
        i, j = pos[ev.dyad.a], pos[ev.dyad.b]
        seconds[i, j] += ev.duration
        seconds[j, i] += ev.duration
    return WeightedNetwork(log.roster, seconds / 60.0)


def descriptives(log: EventLog) -> Descriptives:
    if not log.events:
        empty = Summary(None, None, 0)
        return Descriptives(empty, empty, empty)
    net = aggregate_minutes(log)
    dyadic: dict = {}
    for ev in log.events:
        dyadic[ev.dyad] = dyadic.get(ev.dyad, 0) + ev.duration
    return Descriptives(
        Summary.of([ev.duration for ev in log.events]),
        Summary.of([s / 60.0 for s in dyadic.values()]),
        Summary.of(net.weights.sum(axis=1)),
    )


def symmetrize(net: NominationNetwork, mode: str = WEAK) -> NominationNetwork:
    """Symmetrize reported ties.

    ``weak`` keeps a tie if either member reported it, ``strong`` only if
    both did. Under ``strong`` a pair with any unobserved direction is
    unobserved. Under ``weak`` one observed report suffices for a tie, and a
    pair is unobserved only when no observed direction reports it and at
    least one direction is missing.
    """
    if mode == NONE:
        return net
    y, obs = net.ties, net.observed
    both_obs = obs & obs.T
    if mode == STRONG:
        ties = y & y.T & both_obs
        observed = both_obs
    elif mode == WEAK:
        ties = y | y.T
        observed = ties | both_obs
    else:
        raise ValueError(f"unknown symmetrization {mode!r}")
    return NominationNetwork(net.roster, ties, observed, net.respondents)


class RankHit(NamedTuple):
    rank: int
    percent: float
    n_egos: int


def _untied_ranks(weights: np.ndarray) -> dict[int, int]:
    """Map rank (1 = largest) to the alter index holding it, skipping tied groups."""
    order = np.argsort(-weights, kind="stable")
    out = {}
    k = 0
    while k < len(order):
        m = k + 1
        while m < len(order) and weights[order[m]] == weights[order[k]]:
            m += 1
        if m - k == 1:
            out[k + 1] = int(order[k])
        k = m
    return out


def rank_hit_rate(net: WeightedNetwork, nom: NominationNetwork) -> list[RankHit]:
    """Share of egos whose rank-k alter (by contact time) was nominated.

    Only responding egos count. Alters in a group of tied weights hold no
    rank, and ranks held by no ego are omitted from the result.
    """
    if net.roster != nom.roster:
        raise ValueError("weighted and nomination networks have different rosters")
    hits: dict[int, list[int]] = {}
    for e, ego in enumerate(net.roster):
        if ego not in nom.respondents:
            continue
        alters = np.array([a for a in range(len(net.roster)) if a != e])
        for rank, k in _untied_ranks(net.weights[e, alters]).items():
            alter = alters[k]
            if not nom.observed[e, alter]:
                continue
            counts = hits.setdefault(rank, [0, 0])
            counts[0] += int(nom.ties[e, alter])
            counts[1] += 1
    return [RankHit(r, 100.0 * h / n, n) for r, (h, n) in sorted(hits.items())]


@dataclass(frozen=True, eq=False)
class DyadDesign:
    """Ordered-pair table for regressing nominations on contact minutes."""

    pairs: tuple[tuple[BadgeId, BadgeId], ...]
    outcome: np.ndarray
    minutes: np.ndarray

    @property
    def n(self) -> int:
        return len(self.pairs)


def dyad_design(net: WeightedNetwork, nom: NominationNetwork) -> DyadDesign:
    """One row per observed ordered pair ``(ego, alter)``."""
    if net.roster != nom.roster:
        raise ValueError("weighted and nomination networks have different rosters")
    ii, jj = np.nonzero(nom.observed)
    pairs = tuple((net.roster[i], net.roster[j]) for i, j in zip(ii, jj))
    return DyadDesign(pairs, nom.ties[ii, jj].astype(int), net.weights[ii, jj].astype(float))
