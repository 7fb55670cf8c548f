"""Deterministic block-parallel Monte Carlo driver.

Paths are split into fixed-size blocks. Block ``i`` always draws from the
stream ``SeedSequence(seed, spawn_key=(i,))``, so output depends only on
``(seed, n_paths, block_size)`` and never on how many threads ran.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

ENV_THREADS = "SUBDIFF_THREADS"


def worker_count() -> int:
    """Thread cap from ``SUBDIFF_THREADS`` (default: CPU count, at most 8)."""
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"{ENV_THREADS} must be a positive integer, got {raw!r}")
        return n
    return max(1, min(os.cpu_count() or 1, 8))


def block_rng(seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.PCG64(ss))


def run_blocks(fn, n_total: int, seed: int, block_size: int, workers: int | None = None):
    """Call ``fn(rng, n)`` once per block and stack the results along axis 0."""
    if n_total < 1:
        raise ValueError("n_total must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    starts = range(0, n_total, block_size)
    jobs = [(i, min(block_size, n_total - s)) for i, s in enumerate(starts)]
    workers = workers or worker_count()

    def job(item):
        i, n = item
        return np.asarray(fn(block_rng(seed, i), n))

    if workers == 1 or len(jobs) == 1:
        parts = [job(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            parts = list(ex.map(job, jobs))
    return np.concatenate(parts, axis=0)
