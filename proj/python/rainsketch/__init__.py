"""Distinct-count-below-threshold sketches and a windowed virtual-queue rank estimator."""

from ._core import (
    Averaging,
    EmptyReport,
    FmEnsemble,
    FmSketch,
    FormatError,
    IncompatibleSketch,
    NotWaiting,
    RankEnsemble,
    RankEstimate,
    RenewalStamp,
    SimConfig,
    StaleWindow,
    TimeRegression,
    WindowConfig,
    WindowedEstimator,
    hash_bytes,
    position_of,
    required_sketch_count,
    run_simulation,
    window_error_bound,
)

__version__ = "0.1.0"

__all__ = [
    "Averaging",
    "EmptyReport",
    "FmEnsemble",
    "FmSketch",
    "FormatError",
    "IncompatibleSketch",
    "NotWaiting",
    "RankEnsemble",
    "RankEstimate",
    "RenewalStamp",
    "SimConfig",
    "StaleWindow",
    "TimeRegression",
    "WindowConfig",
    "WindowedEstimator",
    "hash_bytes",
    "position_of",
    "required_sketch_count",
    "run_simulation",
    "window_error_bound",
]
