"""
Four equivalent integral forms of the IBM survival probability.

With f the density and S the survival function of tau_D started at z,
and E(u, v) = P_0[eta_(-u,v) > t], integrating by parts in v, in u, or
in both turns the density form into partial-derivative forms:

    density form   int int E(u, v) f(u) f(v) du dv
    v-partial form int int d_v E(u, v) f(u) S(v) du dv
    u-partial form int int d_u E(u, v) S(u) f(v) du dv
    mixed form     int int d_u d_v E(u, v) S(u) S(v) du dv

The boundary terms vanish for t > 0 because E(u, 0) = E(0, v) = 0 and S
vanishes at infinity. At t = 0 every form equals 1.
"""

import logging
from itertools import combinations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from common.exceptions import CapabilityError
from common.validators import validate_nonnegative
from domains.shapes import BaseDomain, Interval, as_start
from series_engine import SeriesParams, Side, mixed_partial_array, partial_array, survival_array
from iterated.quadrature import outer_law_rule

logger = logging.getLogger(__name__)

CROSSCHECK_ORDER = 48


class RepresentationCrosscheck(BaseModel):
    """Values of the four forms and their largest pairwise gap."""

    density_form: float
    v_partial_form: float
    u_partial_form: float
    mixed_form: float
    max_discrepancy: float = Field(ge=0.0)

    model_config = ConfigDict(frozen=True)

    @property
    def values(self):
        return [self.density_form, self.v_partial_form, self.u_partial_form, self.mixed_form]


def representation_crosscheck(
    domain: BaseDomain,
    z,
    t: float,
    params: SeriesParams = None,
    order: int = CROSSCHECK_ORDER,
) -> RepresentationCrosscheck:
    """
    Evaluate the four forms of P_z[tau_D(Z) > t] by tensor quadrature.

    Args:
        domain: Interval domain
        z: Start point inside the interval
        t: Time, t >= 0
        params: Series truncation controls
        order: Gauss-Legendre nodes per panel

    Raises:
        CapabilityError: If the domain is not an interval
    """
    if not isinstance(domain, Interval):
        raise CapabilityError("representation crosscheck needs an interval domain", {"shape": domain.shape})
    start = as_start(z)
    start.validate_in(domain)
    t = validate_nonnegative(t, "t")

    if t == 0:
        values = [1.0, 1.0, 1.0, 1.0]
    else:
        rule = outer_law_rule(domain, start, order, params)
        u, v = rule.nodes[:, None], rule.nodes[None, :]
        f, s = rule.density_weights, rule.survival_weights
        values = [
            float(f @ survival_array(u, v, t, params) @ f),
            float(f @ partial_array(u, v, t, Side.V_SIDE, params) @ s),
            float(s @ partial_array(u, v, t, Side.U_SIDE, params) @ f),
            float(s @ mixed_partial_array(u, v, t, params) @ s),
        ]

    discrepancy = max(abs(a - b) for a, b in combinations(values, 2))
    logger.debug("Representation crosscheck at t=%g: spread %.3g", t, discrepancy)
    return RepresentationCrosscheck(
        density_form=values[0],
        v_partial_form=values[1],
        u_partial_form=values[2],
        mixed_form=values[3],
        max_discrepancy=discrepancy,
    )
