"""Second-level agreement between a measured log and a ground-truth log."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DyadRaster, EventLog, rasterize
from .preprocess import KINDS, StrategySpec, apply_pipeline


@dataclass(frozen=True)
class ClassificationTable:
    """Counts of dyad-seconds; ``measured`` is the row/column "RFID" side."""

    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class ValidityMetrics:
    """Agreement ratios. ``None`` marks a ratio with a zero denominator."""

    sensitivity: Optional[float]
    specificity: Optional[float]
    accuracy: Optional[float]
    sum_sens_spec: Optional[float]

    def as_dict(self) -> dict[str, Optional[float]]:
        return {
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "accuracy": self.accuracy,
            "sum_sens_spec": self.sum_sens_spec,
        }


@dataclass(frozen=True)
class SweepPoint:
    value: int
    table: ClassificationTable
    metrics: ValidityMetrics


@dataclass(frozen=True)
class SweepResult:
    kind: str
    baseline_table: ClassificationTable
    baseline: ValidityMetrics
    points: tuple[SweepPoint, ...] = field(default_factory=tuple)
    base_pipeline: tuple[StrategySpec, ...] = ()

    @property
    def values(self) -> list[int]:
        return [p.value for p in self.points]

    def curve(self, metric: str = "accuracy") -> list[Optional[float]]:
        return [getattr(p.metrics, metric) for p in self.points]

    def best(self, metric: str = "accuracy") -> SweepPoint:
        """Point with the highest defined metric; lowest parameter wins ties."""
        scored = [p for p in self.points if getattr(p.metrics, metric) is not None]
        if not scored:
            raise ValueError(f"no sweep point has a defined {metric}")
        return max(scored, key=lambda p: (getattr(p.metrics, metric), -p.value))


def classify(measured: DyadRaster, truth: DyadRaster) -> ClassificationTable:
    if measured.roster != truth.roster:
        raise ValueError("measured and truth rasters have different rosters")
    if measured.window != truth.window:
        raise ValueError(
            f"window mismatch: measured {measured.window} vs truth {truth.window}"
        )
    r, v = measured.matrix, truth.matrix
    tp = int(np.count_nonzero(r & v))
    fp = int(np.count_nonzero(r & ~v))
    fn = int(np.count_nonzero(~r & v))
    tn = r.size - tp - fp - fn
    return ClassificationTable(tp, fp, fn, tn)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def metrics(table: ClassificationTable) -> ValidityMetrics:
    sens = _ratio(table.tp, table.tp + table.fn)
    spec = _ratio(table.tn, table.tn + table.fp)
    acc = _ratio(table.tp + table.tn, table.total)
    total = sens + spec if sens is not None and spec is not None else None
    return ValidityMetrics(sens, spec, acc, total)


def _check_values(values: Sequence[int]) -> list[int]:
    vals = [int(v) for v in values]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ValueError(f"sweep values must be strictly increasing: {vals}")
    return vals


def sweep_combined(
    measured: EventLog,
    truth: EventLog,
    base_pipeline: Sequence[StrategySpec],
    kind: str,
    values: Sequence[int],
) -> SweepResult:
    """Evaluate ``kind`` at each value, applied after ``base_pipeline``.

    The baseline is the unprocessed measured log, so an empty
    ``base_pipeline`` reduces to :func:`sweep`.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown strategy {kind!r}")
    vals = _check_values(values)
    truth_raster = rasterize(truth)
    base_table = classify(rasterize(measured), truth_raster)
    pre = apply_pipeline(measured, base_pipeline)
    points = []
    for value in vals:
        processed = StrategySpec.for_kind(kind, value).apply(pre)
        table = classify(rasterize(processed), truth_raster)
        points.append(SweepPoint(value, table, metrics(table)))
    return SweepResult(kind, base_table, metrics(base_table), tuple(points), tuple(base_pipeline))


def sweep(measured: EventLog, truth: EventLog, kind: str, values: Sequence[int]) -> SweepResult:
    return sweep_combined(measured, truth, (), kind, values)


def evaluate(measured: EventLog, truth: EventLog, pipeline: Sequence[StrategySpec] = ()) -> ClassificationTable:
    """Classify ``measured`` after ``pipeline`` against ``truth``."""
    return classify(rasterize(apply_pipeline(measured, pipeline)), rasterize(truth))
