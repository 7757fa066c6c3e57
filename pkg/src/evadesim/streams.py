"""Seeded, reproducible random substreams.

Every random draw in a run comes from a stream addressed by
(seed, replicate, taxpayer, purpose). Streams are realized as numpy's Philox
counter-based bit generator keyed through SeedSequence spawn keys, so:

  * the same key always yields the identical stream, on any platform;
  * distinct keys yield statistically independent streams;
  * consuming one taxpayer's stream at a different rate never shifts
    another taxpayer's draws.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PURPOSES = ("audit", "decision", "parameter")

_MAX_SEED = 2**64


@dataclass(frozen=True)
class StreamKey:
    """Address of one substream."""

    seed: int
    replicate: int = 0
    taxpayer: int = 0
    purpose: str = "audit"

    def __post_init__(self) -> None:
        if not 0 <= self.seed < _MAX_SEED:
            raise ValueError(f"seed must be a 64-bit non-negative integer, got {self.seed}")
        if self.replicate < 0 or self.taxpayer < 0:
            raise ValueError("replicate and taxpayer indices must be non-negative")
        if self.purpose not in PURPOSES:
            raise ValueError(f"purpose must be one of {PURPOSES}, got {self.purpose!r}")


def generator(key: StreamKey) -> np.random.Generator:
    """Fresh generator positioned at the start of the key's stream."""
    seq = np.random.SeedSequence(
        key.seed,
        spawn_key=(key.replicate, key.taxpayer, PURPOSES.index(key.purpose)),
    )
    return np.random.Generator(np.random.Philox(seq))


def bernoulli_stream(key: StreamKey, p: float, count: int) -> np.ndarray:
    """count i.i.d. success flags with probability p."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    return generator(key).random(count) < p


def uniform_stream(key: StreamKey, count: int) -> np.ndarray:
    """count i.i.d. uniforms on [0, 1), used for probabilistic decisions."""
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    return generator(key).random(count)


def beta_2_3_sample(key: StreamKey, count: int) -> np.ndarray:
    """count savings rates drawn from Beta(2, 3); mean 2/5, all in (0, 1)."""
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    return generator(key).beta(2.0, 3.0, count)
