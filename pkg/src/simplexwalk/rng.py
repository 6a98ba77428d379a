"""Deterministic random-number streams.

Every logical unit of work (a chain in an ensemble, an urn run, a coupled
triple) owns one independent stream derived from the user seed and an integer
stream id.  Streams are independent by construction (SeedSequence spawn keys),
so partitioning work across threads can never change what any unit draws.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_stream", "make_streams"]


def make_stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Return the PCG64 generator for stream ``stream_id`` under ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream_id,))
    return np.random.Generator(np.random.PCG64(ss))


def make_streams(seed: int, n: int, base: int = 0) -> list[np.random.Generator]:
    """Streams ``base .. base+n-1`` under ``seed``, one generator each."""
    return [make_stream(seed, base + i) for i in range(n)]
