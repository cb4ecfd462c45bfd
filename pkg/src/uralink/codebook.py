"""Sparse position-pattern codebook shared by all users.

A codebook holds ``2**B_p`` patterns; pattern ``i`` is a sorted list of the
``n_c`` chunk positions (out of ``n_p``) that carry the user's code symbols.
Patterns are pairwise distinct and may optionally be split into power groups.
"""

from __future__ import annotations

import dataclasses
import math
import struct
from dataclasses import dataclass

import numpy as np

_HEADER = struct.Struct("<4Q")  # n_p, n_c, B_p, seed as little-endian uint64


@dataclass(frozen=True)
class PatternCodebook:
    n_p: int
    n_c: int
    B_p: int
    seed: int
    columns: np.ndarray    # (2**B_p, n_c) int32, each row sorted ascending
    group_of: np.ndarray   # (2**B_p,) int32 power-group label per pattern
    num_groups: int = 1

    @property
    def num_patterns(self) -> int:
        return self.columns.shape[0]


def generate(n_p: int, n_c: int, B_p: int, seed: int) -> PatternCodebook:
    """Draw ``2**B_p`` distinct sorted ``n_c``-subsets of ``range(n_p)``."""
    if n_c <= 0 or n_p <= 0 or B_p < 0:
        raise ValueError(f"need n_p, n_c > 0 and B_p >= 0, got {n_p}, {n_c}, {B_p}")
    if n_c > n_p:
        raise ValueError(f"n_c={n_c} exceeds n_p={n_p}")
    if n_p > 0xFFFF:
        raise ValueError(f"n_p={n_p} exceeds the uint16 position range")
    count = 1 << B_p
    if math.comb(n_p, n_c) < count:
        raise ValueError(f"cannot draw {count} distinct {n_c}-subsets of {n_p} positions")
    rng = np.random.Generator(np.random.PCG64(seed))
    columns = np.empty((count, n_c), dtype=np.int32)
    seen: set[bytes] = set()
    i = 0
    while i < count:
        row = np.sort(rng.choice(n_p, size=n_c, replace=False)).astype(np.int32)
        key = row.tobytes()
        if key in seen:
            continue
        seen.add(key)
        columns[i] = row
        i += 1
    columns.setflags(write=False)
    group_of = np.zeros(count, dtype=np.int32)
    group_of.setflags(write=False)
    return PatternCodebook(n_p=n_p, n_c=n_c, B_p=B_p, seed=seed,
                           columns=columns, group_of=group_of, num_groups=1)


def assign_groups(codebook: PatternCodebook, m: int, seed: int) -> PatternCodebook:
    """Return a copy whose patterns are split evenly into ``m`` power groups.

    Group sizes differ by at most one; the assignment is a seeded shuffle so
    group membership is independent of the pattern index.
    """
    count = codebook.num_patterns
    if not (1 <= m <= count):
        raise ValueError(f"group count m={m} must lie in [1, {count}]")
    base, extra = divmod(count, m)
    sizes = np.full(m, base, dtype=np.int64)
    sizes[:extra] += 1
    labels = np.repeat(np.arange(m, dtype=np.int32), sizes)
    rng = np.random.Generator(np.random.PCG64(seed))
    rng.shuffle(labels)
    labels.setflags(write=False)
    return dataclasses.replace(codebook, group_of=labels, num_groups=m)


def occupied_positions(codebook: PatternCodebook, index: int) -> np.ndarray:
    if not (0 <= index < codebook.num_patterns):
        raise IndexError(f"pattern index {index} out of range "
                         f"[0, {codebook.num_patterns})")
    return codebook.columns[index].copy()


def dump(codebook: PatternCodebook, path: str) -> None:
    """Write header (n_p, n_c, B_p, seed as LE uint64) then all rows as LE uint16."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(codebook.n_p, codebook.n_c, codebook.B_p,
                              codebook.seed))
        fh.write(codebook.columns.astype("<u2").tobytes())


def load(path: str) -> PatternCodebook:
    """Read a dumped codebook, re-checking every structural invariant."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    n_p, n_c, B_p, seed = _HEADER.unpack_from(blob)
    if B_p > 32 or n_c == 0 or n_p == 0 or n_c > n_p or n_p > 0xFFFF:
        raise ValueError(f"{path}: implausible header n_p={n_p} n_c={n_c} B_p={B_p}")
    count = 1 << B_p
    body = blob[_HEADER.size:]
    expect = count * n_c * 2
    if len(body) != expect:
        raise ValueError(f"{path}: body holds {len(body)} bytes, expected {expect}")
    columns = np.frombuffer(body, dtype="<u2").reshape(count, n_c).astype(np.int32)
    if columns.max(initial=0) >= n_p:
        raise ValueError(f"{path}: position out of range [0, {n_p})")
    if np.any(np.diff(columns, axis=1) <= 0):
        raise ValueError(f"{path}: rows must be strictly increasing")
    if len({row.tobytes() for row in columns}) != count:
        raise ValueError(f"{path}: duplicate patterns")
    columns.setflags(write=False)
    group_of = np.zeros(count, dtype=np.int32)
    group_of.setflags(write=False)
    return PatternCodebook(n_p=int(n_p), n_c=int(n_c), B_p=int(B_p),
                           seed=int(seed), columns=columns,
                           group_of=group_of, num_groups=1)
