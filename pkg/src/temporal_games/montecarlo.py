"""Deterministic block-parallel Monte Carlo driver.

Rounds are cut into fixed-size blocks. Block ``b`` of a run seeded with
``master_seed`` draws from its own PCG64 stream seeded by
``SeedSequence(master_seed, spawn_key=(b,))``, so the result of every block
depends only on ``(master_seed, b)``. Partial results are reduced in
ascending block order, which makes the totals bit-identical for any number
of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

BLOCK_SIZE = 1 << 16
WORKERS_ENV = "TEMPORAL_GAMES_WORKERS"
SEED_MIXING = "numpy.random.SeedSequence(entropy=master_seed, spawn_key=(block,)) -> PCG64"
MAX_SEED = 2**64 - 1

T = TypeVar("T")


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def block_rng(master_seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(master_seed), spawn_key=(block,))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master_seed: int, *key: int) -> int:
    """A 64-bit child seed for sub-experiments (e.g. one per sweep row)."""
    ss = np.random.SeedSequence(check_seed(master_seed), spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
        return n
    return os.cpu_count() or 1


def block_sizes(n_rounds: int, block_size: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(n_rounds, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_blocks(
    fn: Callable[[np.random.Generator, int], T],
    n_rounds: int,
    seed: int,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> list[T]:
    """Apply ``fn(rng, size)`` to every block; results come back in block order."""
    if n_rounds < 1:
        raise ValueError(f"number of rounds must be at least 1, got {n_rounds}")
    seed = check_seed(seed)
    sizes = block_sizes(n_rounds, block_size)
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")

    def one(b: int) -> T:
        return fn(block_rng(seed, b), sizes[b])

    if workers == 1 or len(sizes) == 1:
        return [one(b) for b in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(len(sizes))))
