"""
First exit times of Brownian motion from domains.
"""

from bm_exit.batch import ExitTimeSampleBatch, SamplingScheme
from bm_exit.empirical import EmpiricalExitLaw, empirical_exit_law, empirical_survival
from bm_exit.euler import crossing_probability, default_dt, sample_exit_domain
from bm_exit.interval import invert_survival, sample_exit_interval
from bm_exit.survival import (
    SurvivalMethod,
    analytic_density,
    analytic_factors,
    analytic_survival,
    bm_survival,
    exit_density,
    has_analytic_law,
    sample_exit_times,
    survival_from_batch,
)

__all__ = [
    "EmpiricalExitLaw",
    "ExitTimeSampleBatch",
    "SamplingScheme",
    "SurvivalMethod",
    "analytic_density",
    "analytic_factors",
    "analytic_survival",
    "bm_survival",
    "crossing_probability",
    "default_dt",
    "empirical_exit_law",
    "empirical_survival",
    "exit_density",
    "has_analytic_law",
    "invert_survival",
    "sample_exit_domain",
    "sample_exit_interval",
    "sample_exit_times",
    "survival_from_batch",
]
