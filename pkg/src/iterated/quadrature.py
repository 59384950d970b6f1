"""
Gauss-Legendre quadrature against the outer exit-time law.

The outer law is truncated at its (1 - QUADRATURE_TAIL) quantile T_cut.
(0, T_cut) is split into geometric panels refining towards 0, where the
exit-time density of a start point near the boundary concentrates, and
each panel carries a Gauss-Legendre rule.
"""

import logging
from functools import lru_cache
from typing import NamedTuple, Tuple

import numpy as np
from scipy.optimize import brentq

from common.exceptions import AccuracyError, CapabilityError
from bm_exit import analytic_density, analytic_survival, has_analytic_law
from domains.shapes import BaseDomain
from series_engine import SeriesParams
from iterated.query import QUADRATURE_TAIL

logger = logging.getLogger(__name__)

DEFAULT_PANELS = 16
_MAX_DOUBLINGS = 200


@lru_cache(maxsize=32)
def legendre_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def gauss_panels(upper: float, order: int, panels: int = DEFAULT_PANELS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights on (0, upper).

    Panel edges are 0, upper 2^-(panels-1), ..., upper / 2, upper.
    """
    x, w = legendre_rule(order)
    edges = np.concatenate([[0.0], upper * 2.0 ** -np.arange(panels - 1, -1, -1, dtype=float)])
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    nodes = (left + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def outer_quantile(domain: BaseDomain, z, level: float = QUADRATURE_TAIL, params: SeriesParams = None) -> float:
    """Time T_cut with P_z[tau_D > T_cut] = level."""

    def excess(t: float) -> float:
        return float(analytic_survival(domain, z, t, params)) - level

    hi = domain.inradius() ** 2
    for _ in range(_MAX_DOUBLINGS):
        if excess(hi) < 0:
            break
        hi *= 2.0
    else:
        raise AccuracyError("Could not bracket the outer tail quantile", achieved_bound=level)

    lo = hi
    for _ in range(_MAX_DOUBLINGS):
        lo *= 0.5
        if excess(lo) > 0:
            break
    else:
        raise AccuracyError("Could not bracket the outer tail quantile from below", achieved_bound=level)

    return brentq(excess, lo, hi, xtol=1e-14, rtol=1e-12)


class OuterLawRule(NamedTuple):
    """Quadrature nodes for the outer law with density and survival weights."""

    nodes: np.ndarray
    density_weights: np.ndarray
    survival_weights: np.ndarray
    cutoff: float


def outer_law_rule(domain: BaseDomain, z, order: int, params: SeriesParams = None) -> OuterLawRule:
    """
    Quadrature rule for integrals against the law of tau_D started at z.

    Raises:
        CapabilityError: If the exit-time density of the domain is not analytic
    """
    if not has_analytic_law(domain):
        raise CapabilityError(f"quadrature needs an analytic exit-time density; {domain.shape} has none")

    cutoff = outer_quantile(domain, z, params=params)
    nodes, weights = gauss_panels(cutoff, order)
    density = analytic_density(domain, z, nodes, params)
    survival = analytic_survival(domain, z, nodes, params)
    logger.debug("Outer rule: %d nodes on (0, %.6g)", nodes.size, cutoff)
    return OuterLawRule(nodes, weights * density, weights * survival, cutoff)
