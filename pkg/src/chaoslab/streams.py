"""Deterministic uniform streams keyed by (master seed, variable index, block).

Every simulated variable in every trajectory block owns a counter-based
Philox stream, derived from the master seed with a spawn key.  Trajectory
``r`` lives in block ``r // BLOCK_SIZE`` at offset ``r % BLOCK_SIZE``; the
layout is a fixed constant, independent of worker count and of the total
replication count, so the uniforms assigned to a given (trajectory,
variable) pair never move.  A variable that consumes a data-dependent
number of uniforms therefore cannot shift any other variable's draws.
"""

from __future__ import annotations

import numpy as np

BLOCK_SIZE = 1 << 14


def block_bounds(lo: int, hi: int) -> list[tuple[int, int]]:
    """Split the trajectory range [lo, hi) along the fixed block grid."""
    if lo < 0 or hi < lo:
        raise ValueError(f"bad trajectory range [{lo}, {hi})")
    bounds = []
    r = lo
    while r < hi:
        nxt = min((r // BLOCK_SIZE + 1) * BLOCK_SIZE, hi)
        bounds.append((r, nxt))
        r = nxt
    return bounds


def generator(master_seed: int, *key: int) -> np.random.Generator:
    """Philox generator for an arbitrary spawn key under the master seed."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.Philox(ss))


def uniform_block(master_seed: int, var_index: int, block: int, size: int) -> np.ndarray:
    """The `size` uniforms owned by one variable in one trajectory block.

    Element ``i`` belongs to trajectory ``block * BLOCK_SIZE + i``.
    """
    return generator(master_seed, var_index, block).random(size)
