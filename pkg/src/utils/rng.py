"""
Seeded, platform-independent random streams for the Monte Carlo estimators.

Stream-splitting rule: a run with seed ``s`` and ``n`` samples is cut into
fixed-size chunks; chunk ``i`` draws from sub-stream ``i``, i.e. a PCG64
generator seeded with ``SeedSequence(s, spawn_key=(i,))`` (the i-th child of
``SeedSequence(s).spawn``). Chunk boundaries do not depend on the number of
workers, so results are identical whether chunks run serially or on a pool.
Normals are produced by the Box-Muller transform of PCG64 uniforms, which is
fixed here rather than delegated to numpy's sampler.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Tuple, TypeVar

import numpy as np

from src.utils.errors import EmptySampleError

CHUNK_SIZE = 1 << 18

T = TypeVar("T")


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for sub-stream ``index`` of ``seed``."""
    assert index >= 0, f"Sub-stream index must be non-negative, got {index}"
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(index),))))


def normal_pairs(gen: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Two independent arrays of ``n`` standard normals via Box-Muller."""
    u1 = 1.0 - gen.random(n)  # (0, 1]
    u2 = gen.random(n)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * math.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def chunk_sizes(n: int, chunk_size: int = CHUNK_SIZE) -> List[int]:
    if n <= 0:
        raise EmptySampleError(f"Number of samples must be positive, got {n}")
    full, rest = divmod(n, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def map_substreams(
    fn: Callable[[np.random.Generator, int], T],
    seed: int,
    n: int,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
) -> List[T]:
    """
    Apply ``fn(generator, size)`` to every chunk of an ``n``-sample run.

    Returns:
        Per-chunk results in sub-stream index order
    """
    sizes = chunk_sizes(n, chunk_size)

    def _run(index: int) -> T:
        return fn(substream(seed, index), sizes[index])

    if workers <= 1 or len(sizes) == 1:
        return [_run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run, range(len(sizes))))
