"""Per-user transmit chain: bit split, channel coding, sparse placement.

Bit layout (big-endian within each segment): the first ``B_J`` bits select
the chunk, the next ``B_p`` bits select the position pattern, the remaining
``B_c`` bits are the coded payload.  Code bit ``j`` rides on occupied
position ``j`` as a BPSK symbol (bit 0 -> +1, bit 1 -> -1) scaled by the
user's power ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import channel_code
from .codebook import PatternCodebook
from .config import SystemConfig


@dataclass(frozen=True)
class UeMessage:
    bits: np.ndarray        # (B,) original payload bits
    chunk_index: int
    pattern_index: int
    payload: np.ndarray     # (B_c,) bits protected by the channel code


@dataclass(frozen=True)
class ChunkSignal:
    samples: np.ndarray     # (n_p,) real baseband samples of one chunk
    chunk_index: int
    pattern_index: int
    power_ratio: float


def bits_to_int(bits: np.ndarray) -> int:
    """Big-endian bit vector to integer; empty vector maps to 0."""
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def int_to_bits(value: int, width: int) -> np.ndarray:
    if value < 0 or value >> width:
        raise ValueError(f"value {value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)],
                    dtype=np.uint8)


def split_bits(bits: np.ndarray, config: SystemConfig) -> UeMessage:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.shape != (config.B,):
        raise ValueError(f"message must have shape ({config.B},), got {arr.shape}")
    if np.any(arr > 1):
        raise ValueError("message bits must be binary")
    b_j, b_p = config.B_J, config.B_p
    return UeMessage(bits=arr.copy(),
                     chunk_index=bits_to_int(arr[:b_j]),
                     pattern_index=bits_to_int(arr[b_j:b_j + b_p]),
                     payload=arr[b_j + b_p:].copy())


def reassemble(chunk_index: int, pattern_index: int, payload: np.ndarray,
               config: SystemConfig) -> np.ndarray:
    """Inverse of :func:`split_bits` from the three decoded fields."""
    return np.concatenate([int_to_bits(chunk_index, config.B_J),
                           int_to_bits(pattern_index, config.B_p),
                           np.asarray(payload, dtype=np.uint8)])


def encode_ue(msg: UeMessage, codebook: PatternCodebook,
              code_spec: channel_code.CodeSpec,
              power_ratio: float = 1.0) -> ChunkSignal:
    if not (power_ratio > 0.0 and math.isfinite(power_ratio)):
        raise ValueError(f"power_ratio must be finite and positive, "
                         f"got {power_ratio}")
    if not (0 <= msg.pattern_index < codebook.num_patterns):
        raise ValueError(f"pattern index {msg.pattern_index} out of range "
                         f"[0, {codebook.num_patterns})")
    codeword = channel_code.encode(msg.payload, code_spec)
    symbols = 1.0 - 2.0 * codeword.astype(np.float64)
    samples = np.zeros(codebook.n_p)
    samples[codebook.columns[msg.pattern_index]] = power_ratio * symbols
    return ChunkSignal(samples=samples, chunk_index=msg.chunk_index,
                       pattern_index=msg.pattern_index,
                       power_ratio=power_ratio)
