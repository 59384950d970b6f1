"""
Comparison domains built from a domain D.

    equal-volume-ball  D*   = B(0, r) with |B(0, r)| = |D|
    interval-I         I(D) = (-R_D, R_D)
    slab-S             S(D) = R^{n-1} x I(D)
    lens-C             C(D) = [R x I(D)] intersected with B(0, d_D - R_D)

Every comparison domain is centred at the origin, which is its canonical
start point.
"""

import logging
import math
from enum import Enum

import numpy as np

from common.exceptions import PreconditionError
from domains.shapes import BaseDomain, Ball, Interval, Lens, Slab, unit_ball_volume

logger = logging.getLogger(__name__)


class ComparisonKind(str, Enum):
    """Symmetrization applied to a domain."""

    EQUAL_VOLUME_BALL = "equal-volume-ball"
    INTERVAL_I = "interval-I"
    SLAB_S = "slab-S"
    LENS_C = "lens-C"


def _require_finite_inradius(d: BaseDomain, kind: ComparisonKind) -> float:
    inradius = d.inradius()
    if not math.isfinite(inradius):
        raise PreconditionError(f"{kind.value} needs a finite inradius", {"shape": d.shape})
    return inradius


def symmetrize(d: BaseDomain, kind: ComparisonKind) -> BaseDomain:
    """
    Build the comparison domain of `d`.

    Args:
        d: Domain to symmetrize
        kind: Which comparison domain to build

    Returns:
        The comparison domain, centred at the origin

    Raises:
        PreconditionError: If `kind` is inadmissible for `d`
    """
    kind = ComparisonKind(kind)

    if kind == ComparisonKind.EQUAL_VOLUME_BALL:
        volume = d.volume()
        if not math.isfinite(volume):
            raise PreconditionError("equal-volume ball needs a finite volume", {"shape": d.shape})
        n = d.dimension
        radius = (volume / unit_ball_volume(n)) ** (1.0 / n)
        return Ball(center=[0.0] * n, radius=float(radius))

    inradius = _require_finite_inradius(d, kind)

    if kind == ComparisonKind.INTERVAL_I:
        return Interval(a=-inradius, b=inradius)

    if kind == ComparisonKind.SLAB_S:
        if d.dimension == 1:
            # R^0 x I(D) is I(D) itself
            return Interval(a=-inradius, b=inradius)
        return Slab(half_width=inradius, dimension=d.dimension)

    if d.dimension != 2:
        raise PreconditionError("lens comparison is planar only", {"dimension": d.dimension})
    diameter = d.diameter()
    if not math.isfinite(diameter):
        raise PreconditionError("lens comparison needs a finite diameter", {"shape": d.shape})
    lens = Lens(half_width=inradius, radius=diameter - inradius)
    logger.debug("Lens comparison h=%.6g rho=%.6g for %s", lens.half_width, lens.radius, d.shape)
    return lens


def canonical_start(d: BaseDomain) -> np.ndarray:
    """The origin of R^n, start point for every comparison domain."""
    return np.zeros(d.dimension)
