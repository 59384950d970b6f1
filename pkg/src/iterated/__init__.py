"""
Exit times of iterated Brownian motion and Brownian-time Brownian motion.
"""

from iterated.estimators import (
    TabulatedPhi,
    btbm_survival,
    btbm_survival_curve,
    draw_outer_times,
    ibm_survival,
    ibm_survival_curve,
    inner_extremes,
    iterated_moment,
    iterated_survival_curve,
    moment_from_outer,
    phi_from_outer,
    phi_moment,
)
from iterated.quadrature import gauss_panels, outer_law_rule, outer_quantile
from iterated.query import EstimatorSettings, IteratedQuery, ProcessKind, SurvivalEstimator
from iterated.representations import RepresentationCrosscheck, representation_crosscheck

__all__ = [
    "EstimatorSettings",
    "IteratedQuery",
    "ProcessKind",
    "RepresentationCrosscheck",
    "SurvivalEstimator",
    "TabulatedPhi",
    "btbm_survival",
    "btbm_survival_curve",
    "draw_outer_times",
    "gauss_panels",
    "ibm_survival",
    "ibm_survival_curve",
    "inner_extremes",
    "iterated_moment",
    "iterated_survival_curve",
    "moment_from_outer",
    "outer_law_rule",
    "outer_quantile",
    "phi_from_outer",
    "phi_moment",
    "representation_crosscheck",
]
