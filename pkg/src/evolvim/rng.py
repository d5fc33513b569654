"""Deterministic random streams.

Every unit of stochastic work (one evolution instance, one block of Monte Carlo
rounds, ...) draws from its own Philox stream derived from a master seed and a
key path. Results therefore do not depend on how the work is spread over
threads. Compiled kernels and the pure-Python fallback consume the same
streams through the same sequence of ``next_double`` calls, so both backends
return identical outputs.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar, Union

import numpy as np

SeedLike = Union[int, np.random.SeedSequence]

# stream tags; the first element of every key path
EVOLVE = 1
CASCADE = 2
GAINS = 3
RRSETS = 4
LIVE = 5
TRIAL = 6
HOLDOUT = 7
SYNTH = 8
FIT = 9

MC_BLOCK = 1024
GAIN_BLOCK = 256
RR_BLOCK = 256

T = TypeVar("T")
R = TypeVar("R")


def seed_sequence(seed: SeedLike, *keys: int) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + keys)
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        return np.random.SeedSequence(int(seed), spawn_key=keys)
    raise TypeError(f"expected an int or SeedSequence seed, got {type(seed).__name__}")


def derive(seed: SeedLike, *keys: int) -> np.random.Philox:
    """Bit generator for the stream at ``keys`` under ``seed``."""
    return np.random.Philox(seed_sequence(seed, *keys))


def as_bitgen(rng) -> np.random.BitGenerator:
    if isinstance(rng, np.random.BitGenerator):
        return rng
    if isinstance(rng, np.random.Generator):
        return rng.bit_generator
    return derive(rng)


def default_workers() -> int:
    env = os.environ.get("EVOLVIM_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def blocks(total: int, size: int) -> list[tuple[int, int]]:
    """``(block_index, count)`` pairs covering ``total`` items."""
    return [(b, min(size, total - b * size)) for b in range((total + size - 1) // size)]


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Ordered map, threaded when ``workers > 1``; kernels release the GIL."""
    items = list(items)
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
