"""Deterministic random-number streams.

Every stochastic routine in the package draws from a Philox4x64-10
counter-based generator (numpy's ``Philox`` bit generator) keyed by the pair
(master seed, stream id). Substreams with distinct ids are statistically
independent and bit-reproducible across platforms and process/thread counts,
so generators can hand one stream to each path or Monte Carlo replicate and
produce identical output regardless of evaluation order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream"]

_MASK64 = (1 << 64) - 1


def substream(master_seed: int, stream_id: int) -> np.random.Generator:
    """Generator for substream ``stream_id`` of the given master seed."""
    key = np.array(
        [int(master_seed) & _MASK64, int(stream_id) & _MASK64], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))
