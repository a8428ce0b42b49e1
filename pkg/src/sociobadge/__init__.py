"""Cleaning and validating proximity-badge interaction data."""

from .core import (
    DyadRaster,
    Dyad,
    EventLog,
    InteractionEvent,
    ObservationWindow,
    extract_events,
    normalize,
    rasterize,
)
from .preprocess import (
    StrategySpec,
    apply_pipeline,
    interpolate,
    min_duration_filter,
    parse_pipeline,
    triadic_closure,
)
from .validity import (
    ClassificationTable,
    SweepResult,
    ValidityMetrics,
    classify,
    metrics,
    sweep,
    sweep_combined,
)

__version__ = "0.1.0"
