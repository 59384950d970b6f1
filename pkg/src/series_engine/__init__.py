"""
Exit law of Brownian motion from an interval (-u, v) started at 0.
"""

from series_engine.eta import (
    density_array,
    eta_density,
    eta_mixed_partial,
    eta_partial,
    eta_survival,
    mixed_partial_array,
    partial_array,
    survival_array,
)
from series_engine.moments import eta_moment, moment_array
from series_engine.params import IntervalExitQuery, SeriesParams, Side

__all__ = [
    "IntervalExitQuery",
    "SeriesParams",
    "Side",
    "eta_survival",
    "eta_density",
    "eta_partial",
    "eta_mixed_partial",
    "eta_moment",
    "survival_array",
    "density_array",
    "partial_array",
    "mixed_partial_array",
    "moment_array",
]
