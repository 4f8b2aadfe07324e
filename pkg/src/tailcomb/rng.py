"""Counter-based splittable random streams.

Streams are numpy Philox-4x64 bit generators keyed by
(master_seed, stream_id); the Philox word counter plays the role of the
in-stream position.  Distinct stream ids give statistically independent
streams, and every draw is a pure function of (master_seed, stream_id,
draw position), independent of scheduling or worker count.

Monte Carlo work is partitioned into fixed-size chunks; chunk c owns the
stream with stream_id = c (offset by a run-scoped tag where one run needs
several independent batches).  The chunk size is a constant so replicate i
always lands at the same (stream, offset).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Fixed chunk width; part of the reproducibility contract.
CHUNK_SIZE = 1 << 15

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Addressable stream: generator() yields a fresh Philox generator at counter 0."""

    master_seed: int
    stream_id: int

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        return np.random.Generator(np.random.Philox(key=key))


def chunk_ranges(n: int, chunk_size: int = CHUNK_SIZE):
    """Yield (chunk_index, start, stop) covering range(n)."""
    for c in range(0, (n + chunk_size - 1) // chunk_size):
        start = c * chunk_size
        yield c, start, min(start + chunk_size, n)
