"""
Counter-based random streams for reproducible parallel Monte Carlo.

Every sample index belongs to a fixed-size chunk and every chunk owns a
Philox generator keyed by (master seed, stream index, chunk index).
Chunks can therefore be filled by any number of workers, in any order,
and concatenating them in chunk order reproduces the same batch bit for
bit.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from common.validators import validate_count

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 4096


def default_workers() -> int:
    """Worker count from ISOPERIM_WORKERS; never affects numerical output."""
    try:
        return max(1, int(os.getenv("ISOPERIM_WORKERS", "1")))
    except ValueError:
        logger.warning("Ignoring non-integer ISOPERIM_WORKERS=%s", os.getenv("ISOPERIM_WORKERS"))
        return 1


class RandomStream(BaseModel):
    """
    Identifies one independent family of random numbers.

    Two streams with the same master seed but different stream indices
    are statistically independent.
    """

    master_seed: int = Field(ge=0, description="Experiment-wide seed")
    stream_index: int = Field(default=0, ge=0, description="Independent stream within the experiment")
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1, description="Samples per chunk")

    model_config = ConfigDict(frozen=True)

    def generator(self, chunk_index: int) -> np.random.Generator:
        """Philox generator for one chunk."""
        seed_seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream_index, chunk_index)
        )
        return np.random.Generator(np.random.Philox(seed_seq))

    def substream(self, offset: int) -> "RandomStream":
        """A stream independent of this one, derived deterministically."""
        return self.model_copy(update={"stream_index": self.stream_index * 1009 + offset + 1})

    def chunk_bounds(self, count: int) -> List[tuple]:
        """Half-open (start, stop) index ranges covering [0, count)."""
        return [
            (start, min(start + self.chunk_size, count))
            for start in range(0, count, self.chunk_size)
        ]


def fill_chunks(
    stream: RandomStream,
    count: int,
    fill_fn: Callable[[np.random.Generator, int], np.ndarray],
    workers: int = 1,
) -> np.ndarray:
    """
    Fill `count` samples chunk by chunk.

    Args:
        stream: Stream that keys the per-chunk generators
        count: Total number of samples
        fill_fn: Called as fill_fn(generator, n) and returns n samples
            (first axis of length n)
        workers: Thread pool size; the result does not depend on it

    Returns:
        Samples concatenated in chunk order
    """
    count = validate_count(count)
    bounds = stream.chunk_bounds(count)

    def run(chunk: int) -> np.ndarray:
        start, stop = bounds[chunk]
        return np.asarray(fill_fn(stream.generator(chunk), stop - start))

    logger.debug(
        "Filling %d samples in %d chunks on %d workers (stream %d)",
        count, len(bounds), workers, stream.stream_index,
    )

    if workers <= 1 or len(bounds) == 1:
        parts = [run(chunk) for chunk in range(len(bounds))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(bounds))))

    return np.concatenate(parts, axis=0)
