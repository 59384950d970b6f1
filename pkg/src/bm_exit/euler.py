"""
Euler sampling of exit times with Brownian-bridge crossing correction.

Paths advance by Gaussian steps of size dt. A path exits when its new
position leaves the domain, or, while both endpoints of the step are
inside, with the probability that the Brownian bridge between them
crossed a bounding half-plane:

    P[cross] = exp(-2 d0 d1 / dt)

with d0, d1 the endpoint distances to the half-plane. Circular arcs use
the tangent half-plane at the boundary point nearest to the endpoint
closer to the arc. The recorded exit time is the midpoint of the step in
which the exit was detected.
"""

import logging
from typing import Optional

import numpy as np

from common.exceptions import AccuracyError, DomainError
from common.streams import RandomStream, default_workers, fill_chunks
from common.validators import validate_count, validate_positive
from domains.shapes import BaseDomain, StartPoint, as_start
from bm_exit.batch import ExitTimeSampleBatch, SamplingScheme

logger = logging.getLogger(__name__)

DEFAULT_DT_FACTOR = 1e-4
DEFAULT_MAX_STEPS = 10_000_000


def default_dt(domain: BaseDomain) -> float:
    """Step size 1e-4 * R_D^2."""
    return DEFAULT_DT_FACTOR * domain.inradius() ** 2


def crossing_probability(domain: BaseDomain, x0: np.ndarray, x1: np.ndarray, dt: float) -> np.ndarray:
    """
    Probability that a bridge from x0 to x1 over time dt leaves the domain.

    Both endpoints are assumed inside. Crossings of different faces are
    combined as independent events.
    """
    stay = np.ones(x0.shape[0])

    for face in domain.faces():
        d0 = face.offset - x0 @ face.normal
        d1 = face.offset - x1 @ face.normal
        stay *= 1.0 - np.exp(-2.0 * np.maximum(d0, 0.0) * np.maximum(d1, 0.0) / dt)

    for sphere in domain.spheres():
        r0 = x0 - sphere.center
        r1 = x1 - sphere.center
        n0 = np.linalg.norm(r0, axis=1)
        n1 = np.linalg.norm(r1, axis=1)
        nearer = np.where((n1 > n0)[:, None], r1, r0)
        length = np.maximum(np.where(n1 > n0, n1, n0), 1e-300)
        normal = nearer / length[:, None]
        # tangent half-plane {x : normal . (x - c) < radius}
        d0 = sphere.radius - np.einsum("ij,ij->i", r0, normal)
        d1 = sphere.radius - np.einsum("ij,ij->i", r1, normal)
        stay *= 1.0 - np.exp(-2.0 * np.maximum(d0, 0.0) * np.maximum(d1, 0.0) / dt)

    return 1.0 - stay


def _euler_fill(domain: BaseDomain, z: np.ndarray, dt: float, max_steps: int):
    sqrt_dt = np.sqrt(dt)

    def fill(gen: np.random.Generator, n: int) -> np.ndarray:
        times = np.empty(n)
        alive = np.arange(n)
        position = np.tile(z, (n, 1))

        for step in range(max_steps):
            if alive.size == 0:
                return times
            x0 = position[alive]
            x1 = x0 + sqrt_dt * gen.standard_normal(x0.shape)
            uniforms = gen.random(alive.size)

            inside = domain.signed_distance(x1) > 0
            cross = np.zeros(alive.size)
            cross[inside] = crossing_probability(domain, x0[inside], x1[inside], dt)
            exited = ~inside | (uniforms < cross)

            times[alive[exited]] = (step + 0.5) * dt
            position[alive] = x1
            alive = alive[~exited]

        if alive.size:
            raise AccuracyError(
                f"{alive.size} paths still inside after {max_steps} steps of {dt}",
                achieved_bound=alive.size / n,
                details={"max_steps": max_steps, "dt": dt},
            )
        return times

    return fill


def sample_exit_domain(
    domain: BaseDomain,
    z,
    dt: Optional[float],
    count: int,
    stream: RandomStream,
    workers: int = None,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> ExitTimeSampleBatch:
    """
    Draw exit times of n-dimensional Brownian motion from `domain`.

    Args:
        domain: Domain to exit; an unbounded domain must have a bounded exit coordinate
        z: Start point (StartPoint or coordinates)
        dt: Euler step; None selects 1e-4 * R_D^2
        count: Number of draws
        stream: Random stream keying the per-chunk generators
        workers: Thread count; does not change the draws
        max_steps: Guard on the number of steps per path

    Returns:
        Batch of midpoint-attributed exit times

    Raises:
        DomainError: If dt <= 0 or count < 1
        PreconditionError: If z is not strictly inside the domain
        AccuracyError: If paths survive max_steps
    """
    start = as_start(z)
    point = start.validate_in(domain)
    dt = default_dt(domain) if dt is None else validate_positive(dt, "dt")
    count = validate_count(count)
    if max_steps < 1:
        raise DomainError("max_steps must be positive", {"max_steps": max_steps})

    logger.debug("Euler-bridge sampling %d paths in %s with dt=%g", count, domain.shape, dt)
    times = fill_chunks(stream, count, _euler_fill(domain, point, dt, max_steps), workers or default_workers())

    return ExitTimeSampleBatch(
        times=times,
        domain=domain,
        start=start,
        scheme=SamplingScheme.EULER_BRIDGE,
        dt=dt,
        stream=stream,
    )
