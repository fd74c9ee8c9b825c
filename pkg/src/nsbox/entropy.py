"""Uniform-variate sources feeding the sampling engine.

The engine only ever needs a stream of uniforms in [0, 1).  Production runs
use the operating system's CSPRNG; tests and reproducible demos use a seeded
generator.  The abstraction also marks the seam where a hardware randomness
device would plug in.
"""

from __future__ import annotations

import random
import secrets
import threading
from typing import Iterable, Protocol, runtime_checkable

_DENOM = 1 << 53


@runtime_checkable
class EntropySource(Protocol):
    """A stream of independent uniform variates in [0, 1)."""

    def next_uniform(self) -> float: ...


class SystemEntropy:
    """Cryptographically secure uniforms from the OS entropy pool."""

    def next_uniform(self) -> float:
        return secrets.randbits(53) / _DENOM


class SeededEntropy:
    """Deterministic uniforms for reproducible runs.

    Thread-safe so a seeded service instance never interleaves partial
    state updates; the draw order under concurrency is still scheduling
    dependent, of course.
    """

    def __init__(self, seed: int):
        self._rng = random.Random(seed)
        self._lock = threading.Lock()

    def next_uniform(self) -> float:
        with self._lock:
            return self._rng.random()


class FixedEntropy:
    """Replays an explicit list of variates; raises when exhausted.

    Test helper for pinning individual draws.
    """

    def __init__(self, values: Iterable[float]):
        self._values = list(values)
        for v in self._values:
            if not 0.0 <= v < 1.0:
                raise ValueError(f"variate {v} outside [0, 1)")
        self._pos = 0

    def next_uniform(self) -> float:
        if self._pos >= len(self._values):
            raise RuntimeError("fixed entropy stream exhausted")
        v = self._values[self._pos]
        self._pos += 1
        return v
