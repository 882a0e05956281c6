import zlib
from typing import Union

import numpy as np


def stream_key(stream: Union[str, int]) -> int:
    """Stable integer spawn key for a named random stream."""
    if isinstance(stream, int):
        return stream
    return zlib.crc32(stream.encode("utf-8"))


def make_rng(seed: int, *streams: Union[str, int]) -> np.random.Generator:
    """
    Counter-based generator for (seed, stream...).
    Each named stream is independent of every other, whatever order they are drawn in.
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(stream_key(s) for s in streams))
    return np.random.Generator(np.random.Philox(sequence))
