"""Counter-based random streams.

Every uniform is a pure function of ``(seed, stream, purpose, block)``:
the 128-bit counter ``(block, purpose, stream_lo, stream_hi)`` is
encrypted with the 64-bit key ``seed`` by Philox4x32-10, and each
output block of four 32-bit words yields two 53-bit doubles in [0, 1).

Because nothing depends on call order, an event's random numbers depend
only on the run seed and the event index, so results are independent of
chunking and of the number of worker processes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)

# Purpose tags (counter word 1) keep independent uses of one stream apart.
SZ = 0
LAMBDA_DIRECTION = 1
QM_ANGLES = 2
HVT_ANGLES = 3
SEQUENTIAL = 7


def philox4x32(counter, key, rounds: int = 10) -> np.ndarray:
    """Philox4x32 block function, vectorized over the leading axis.

    ``counter`` has shape (n, 4) and ``key`` shape (n, 2) or (2,); both hold
    32-bit words. Returns an (n, 4) uint64 array of 32-bit output words.
    """
    ctr = np.asarray(counter, dtype=np.uint64)
    c0, c1, c2, c3 = (ctr[:, i].copy() for i in range(4))
    key = np.asarray(key, dtype=np.uint64)
    k0 = key[..., 0].copy()
    k1 = key[..., 1].copy()
    for r in range(rounds):
        if r:
            k0 = (k0 + np.uint64(_W0)) & _MASK32
            k1 = (k1 + np.uint64(_W1)) & _MASK32
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> _SHIFT32) ^ c1 ^ k0,
            p1 & _MASK32,
            (p0 >> _SHIFT32) ^ c3 ^ k1,
            p0 & _MASK32,
        )
    return np.stack([c0, c1, c2, c3], axis=1)


def _split64(x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.uint64)
    return x & _MASK32, x >> _SHIFT32


def _as_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        # negative seeds are folded into the unsigned 64-bit range
        seed %= 2**64
    return seed


def uniform_blocks(seed: int, streams, purpose: int, blocks) -> np.ndarray:
    """Uniform doubles for many streams at once.

    ``streams`` and ``blocks`` broadcast against each other (1-D). Returns
    shape (n, 2): the two doubles of block ``blocks[i]`` of stream
    ``streams[i]`` under ``purpose``.
    """
    streams, blocks = np.broadcast_arrays(
        np.asarray(streams, dtype=np.uint64), np.asarray(blocks, dtype=np.uint64)
    )
    streams = np.atleast_1d(streams)
    blocks = np.atleast_1d(blocks)
    lo, hi = _split64(streams)
    ctr = np.empty((streams.size, 4), dtype=np.uint64)
    ctr[:, 0] = blocks & _MASK32
    ctr[:, 1] = np.uint64(purpose)
    ctr[:, 2] = lo
    ctr[:, 3] = hi
    klo, khi = _split64(_as_seed(seed))
    words = philox4x32(ctr, np.array([klo, khi], dtype=np.uint64))
    a = (words[:, 0::2] >> np.uint64(5)).astype(np.float64)
    b = (words[:, 1::2] >> np.uint64(6)).astype(np.float64)
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0)


def uniforms(seed: int, streams, purpose: int, first_block: int, count: int) -> np.ndarray:
    """``count`` uniforms per stream drawn from consecutive blocks.

    Returns shape (n_streams, count).
    """
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    n_blocks = (count + 1) // 2
    out = np.empty((streams.size, 2 * n_blocks))
    for j in range(n_blocks):
        out[:, 2 * j : 2 * j + 2] = uniform_blocks(seed, streams, purpose, first_block + j)
    return out[:, :count]


@dataclass
class RngStream:
    """A reproducible stream identified by ``(seed, stream_index)``.

    Each purpose tag has its own block cursor, so single-event samplers
    driven by a fresh stream consume exactly the numbers that the batch
    generator uses for the event with the same index.
    """

    seed: int
    stream_index: int = 0
    _cursor: dict = field(default_factory=dict, repr=False, compare=False)

    def take_blocks(self, purpose: int, n_blocks: int) -> int:
        """Reserve ``n_blocks`` blocks under ``purpose``; return the first."""
        first = self._cursor.get(purpose, 0)
        self._cursor[purpose] = first + n_blocks
        return first

    def uniform(self, size: int = 1, purpose: int = SEQUENTIAL) -> np.ndarray:
        first = self.take_blocks(purpose, (size + 1) // 2)
        return uniforms(self.seed, [self.stream_index], purpose, first, size)[0]

    def generator(self) -> np.random.Generator:
        """A numpy Generator keyed by this stream (for Poisson toys etc.)."""
        key = _as_seed(self.seed) + (int(self.stream_index) << 64)
        return np.random.Generator(np.random.Philox(key=key))
