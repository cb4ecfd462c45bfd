"""Real-valued Gaussian multiple access channel.

All users' chunk signals superpose sample-wise; i.i.d. Gaussian noise of
variance ``sigma2`` is added per real channel use.  Noise for a frame is
drawn from a single seeded stream in chunk order, so a frame is fully
reproducible from ``(noise_seed, sigma2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import SystemConfig
from .encoder import ChunkSignal


@dataclass(frozen=True)
class ReceivedFrame:
    chunks: np.ndarray    # (J, n_p) received samples per chunk
    sigma2: float
    noise_seed: int


def transmit(signals: Iterable[ChunkSignal], sigma2: float, noise_seed: int,
             config: SystemConfig) -> ReceivedFrame:
    if not (sigma2 >= 0.0 and math.isfinite(sigma2)):
        raise ValueError(f"sigma2 must be finite and non-negative, got {sigma2}")
    chunks = np.zeros((config.J, config.n_p))
    for sig in signals:
        if sig.samples.shape != (config.n_p,):
            raise ValueError(f"chunk signal must have shape ({config.n_p},), "
                             f"got {sig.samples.shape}")
        if not (0 <= sig.chunk_index < config.J):
            raise ValueError(f"chunk index {sig.chunk_index} out of range "
                             f"[0, {config.J})")
        chunks[sig.chunk_index] += sig.samples
    rng = np.random.Generator(np.random.PCG64(noise_seed))
    noise = rng.standard_normal(config.J * config.n_p).reshape(config.J,
                                                               config.n_p)
    chunks += math.sqrt(sigma2) * noise
    return ReceivedFrame(chunks=chunks, sigma2=sigma2, noise_seed=noise_seed)
