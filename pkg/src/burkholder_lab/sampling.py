"""The (seed, block_count) contract every stochastic suite follows.

Sample j is drawn from substream `j mod block_count`, and each substream is a
child of `numpy.random.SeedSequence(seed)`. A suite therefore produces the same
numbers whether it runs its blocks serially or on a thread pool, and whatever
the order in which the blocks finish.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")


def block_generators(seed: int, block_count: int) -> list[np.random.Generator]:
    """One independent generator per block, derived from the run seed."""
    if block_count <= 0:
        raise ValueError("block_count must be positive")
    children = np.random.SeedSequence(seed).spawn(block_count)
    return [np.random.default_rng(child) for child in children]


def block_sizes(samples: int, block_count: int) -> list[int]:
    """How many of `samples` land in each block under the j mod block_count rule."""
    base, extra = divmod(samples, block_count)
    return [base + (1 if b < extra else 0) for b in range(block_count)]


def interleave(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Reassemble per-block arrays so row j comes from block j mod len(blocks).

    Block b holds the rows b, b + B, b + 2B, ... in order, which is the layout
    `block_sizes` describes.
    """
    count = len(blocks)
    total = sum(len(block) for block in blocks)
    if total == 0:
        return np.concatenate(blocks) if blocks else np.empty(0)
    out = np.empty((total, *blocks[0].shape[1:]), dtype=np.result_type(*blocks))
    for b, block in enumerate(blocks):
        out[b::count] = block
    return out


def draw(
    seed: int,
    block_count: int,
    samples: int,
    sampler: Callable[[np.random.Generator, int], np.ndarray],
) -> np.ndarray:
    """Draw `samples` rows with `sampler(rng, n)` under the block contract."""
    sizes = block_sizes(samples, block_count)
    rngs = block_generators(seed, block_count)
    return interleave([sampler(rng, n) for rng, n in zip(rngs, sizes, strict=True)])


def map_blocks(
    func: Callable[[int, np.random.Generator], T],
    seed: int,
    block_count: int,
    *,
    workers: int = 1,
) -> list[T]:
    """Run `func(block_index, rng)` for every block; results come back in block order.

    With `workers > 1` the blocks run on a thread pool (numpy releases the GIL in
    the heavy kernels). The ordering of the returned list never depends on
    scheduling, so reductions over it are bitwise reproducible.
    """
    rngs = block_generators(seed, block_count)
    if workers <= 1:
        return [func(b, rng) for b, rng in enumerate(rngs)]
    logger.debug("running %d blocks on %d workers", block_count, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, b, rng) for b, rng in enumerate(rngs)]
        return [future.result() for future in futures]


def unit_ball(rng: np.random.Generator, n: int, dim: int = 2) -> np.ndarray:
    """Uniform samples from the closed unit ball in R^dim, shape (n, dim)."""
    direction = rng.standard_normal((n, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = rng.random(n) ** (1.0 / dim)
    return direction * radius[:, None]
