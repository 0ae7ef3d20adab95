"""Seeded random streams."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RngStream:
    """Independent, reproducible random stream identified by ``(seed, stream_id)``.

    Streams are built from a ``numpy.random.SeedSequence`` over both integers and a PCG64 bit
    generator, so the draw sequence is the same on every platform and two stream ids never
    share state.
    """

    seed: int
    """Run seed (non-negative, at most 64 bits)"""
    stream_id: int
    """Stream id within the run"""
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.seed < 0 or self.seed >= 1 << 64:
            msg = f"seed must be a non-negative 64-bit integer, got {self.seed}"
            raise ValueError(msg)
        if self.stream_id < 0:
            msg = f"stream_id must be non-negative, got {self.stream_id}"
            raise ValueError(msg)
        sequence = np.random.SeedSequence([self.seed, self.stream_id])
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def uniform(self) -> float:
        """Draw from [0, 1)."""
        return float(self._generator.random())

    def bernoulli(self, p: float = 0.5) -> int:
        """Draw 1 with probability ``p``, else 0."""
        return 1 if self.uniform() < p else 0
