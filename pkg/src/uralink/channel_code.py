"""Binary channel code protecting the coded payload bits.

A seeded, systematic sparse parity-check code of rate ``B_c / n_c``:
column weight 3 (less when there are fewer checks), balanced check loads,
length-4 cycles avoided where the check count permits, and full row rank so
encoding is well defined.  Decoding is flooding sum-product belief
propagation with an early stop on a zero syndrome.

Sign convention: bit 0 maps to symbol +1, so a positive LLR favours bit 0
and hard decision is ``bit = 1 if llr < 0 else 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels

LLR_CLIP = 30.0    # LLR magnitudes are clipped to this on decoder entry
_BUILD_TRIES = 32  # re-draws allowed while searching for a full-rank matrix


@dataclass(frozen=True)
class CodeGraph:
    """Edge-level view of the parity-check matrix for the BP kernels."""
    edge_var: np.ndarray   # (E,) variable node of each edge
    cn_ptr: np.ndarray     # (r+1,) CSR offsets of edges grouped per check
    cn_edges: np.ndarray   # (E,) edge ids grouped per check
    vn_ptr: np.ndarray     # (n+1,) CSR offsets of edges grouped per variable
    vn_edges: np.ndarray   # (E,) edge ids grouped per variable
    cn_pad: np.ndarray     # (r, dc_max) padded edge ids, -1 pads
    cn_mask: np.ndarray    # (r, dc_max) validity of cn_pad
    cn_var_pad: np.ndarray # (r, dc_max) variable of each padded edge
    vn_pad: np.ndarray     # (n, dv_max) padded edge ids, -1 pads
    vn_mask: np.ndarray    # (n, dv_max) validity of vn_pad


@dataclass(frozen=True)
class CodeSpec:
    B_c: int
    n_c: int
    seed: int
    bp_iters: int
    H: np.ndarray        # (n_c - B_c, n_c) parity checks, systematic layout
    enc_mat: np.ndarray  # (n_c - B_c, B_c) parity generator: p = enc_mat @ u
    graph: CodeGraph

    @property
    def rate(self) -> float:
        return self.B_c / self.n_c

    @property
    def num_checks(self) -> int:
        return self.n_c - self.B_c


@dataclass(frozen=True)
class SoftDecodeResult:
    app_llrs: np.ndarray    # (n_c,) a-posteriori LLRs of every code bit
    hard_bits: np.ndarray   # (B_c,) hard decision on the systematic part
    codeword: np.ndarray    # (n_c,) hard decision on the full word
    parity_ok: bool         # all checks satisfied by ``codeword``
    iterations: int         # BP iterations actually run


# ---------------------------------------------------------------------------
# GF(2) helpers
# ---------------------------------------------------------------------------

def _gf2_pivot_columns(mat: np.ndarray) -> list[int]:
    """Column indices of one maximal independent set (row echelon pivots)."""
    work = mat.copy()
    rows, cols = work.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        hits = np.nonzero(work[row:, col])[0]
        if hits.size == 0:
            continue
        top = row + hits[0]
        if top != row:
            work[[row, top]] = work[[top, row]]
        mask = work[:, col].copy()
        mask[row] = 0
        work[mask == 1] ^= work[row]
        pivots.append(col)
        row += 1
    return pivots


def _gf2_inverse(mat: np.ndarray) -> np.ndarray:
    size = mat.shape[0]
    work = np.concatenate([mat.copy(), np.eye(size, dtype=np.uint8)], axis=1)
    for col in range(size):
        hits = np.nonzero(work[col:, col])[0]
        if hits.size == 0:
            raise ValueError("matrix is singular over GF(2)")
        top = col + hits[0]
        if top != col:
            work[[col, top]] = work[[top, col]]
        mask = work[:, col].copy()
        mask[col] = 0
        work[mask == 1] ^= work[col]
    return work[:, size:].copy()


# ---------------------------------------------------------------------------
# Code construction
# ---------------------------------------------------------------------------

def _draw_matrix(B_c: int, n_c: int, rng: np.random.Generator) -> np.ndarray:
    num_checks = n_c - B_c
    wcol = min(3, num_checks)
    H = np.zeros((num_checks, n_c), dtype=np.uint8)
    deg = np.zeros(num_checks, dtype=np.int64)
    used_pairs: set[tuple[int, int]] = set()
    for col in range(n_c):
        chosen = None
        for attempt in range(50):
            if attempt == 0:
                order = np.lexsort((rng.random(num_checks), deg))
                rows = np.sort(order[:wcol])
            else:
                rows = np.sort(rng.choice(num_checks, size=wcol, replace=False))
            pairs = list(itertools.combinations(rows.tolist(), 2))
            if all(p not in used_pairs for p in pairs):
                chosen = (rows, pairs)
                break
        if chosen is None:
            # Dense toy codes can exhaust fresh row pairs; accept the cycle.
            rows = np.sort(np.lexsort((rng.random(num_checks), deg))[:wcol])
            chosen = (rows, [])
        rows, pairs = chosen
        used_pairs.update(pairs)
        H[rows, col] = 1
        deg[rows] += 1
    return H


def make_code(B_c: int, n_c: int, seed: int, bp_iters: int = 30) -> CodeSpec:
    if B_c <= 0 or n_c <= B_c:
        raise ValueError(f"need 0 < B_c < n_c, got B_c={B_c}, n_c={n_c}")
    num_checks = n_c - B_c
    rng = np.random.Generator(np.random.PCG64(seed))
    H = None
    pivots: list[int] = []
    for _ in range(_BUILD_TRIES):
        cand = _draw_matrix(B_c, n_c, rng)
        pivots = _gf2_pivot_columns(cand)
        if len(pivots) == num_checks:
            H = cand
            break
    if H is None:
        raise RuntimeError(f"could not draw a full-rank check matrix "
                           f"for B_c={B_c}, n_c={n_c}, seed={seed}")
    # Systematic layout: move one invertible column set to the parity end.
    pivot_set = set(pivots)
    info_cols = [c for c in range(n_c) if c not in pivot_set]
    H = np.ascontiguousarray(H[:, info_cols + pivots])
    Hp_inv = _gf2_inverse(H[:, B_c:])
    enc_mat = (Hp_inv.astype(np.int64) @ H[:, :B_c].astype(np.int64) % 2
               ).astype(np.uint8)
    spec = CodeSpec(B_c=B_c, n_c=n_c, seed=seed, bp_iters=bp_iters,
                    H=H, enc_mat=enc_mat, graph=_build_graph(H))
    H.setflags(write=False)
    enc_mat.setflags(write=False)
    return spec


def _build_graph(H: np.ndarray) -> CodeGraph:
    num_checks, n = H.shape
    chk, var = np.nonzero(H)          # row-major: grouped per check
    E = var.shape[0]
    edge_var = var.astype(np.int32)
    row_deg = np.bincount(chk, minlength=num_checks)
    cn_ptr = np.zeros(num_checks + 1, dtype=np.int32)
    np.cumsum(row_deg, out=cn_ptr[1:])
    cn_edges = np.arange(E, dtype=np.int32)
    order = np.argsort(edge_var, kind="stable").astype(np.int32)
    col_deg = np.bincount(edge_var, minlength=n)
    vn_ptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(col_deg, out=vn_ptr[1:])
    vn_edges = order

    def pad(ptr, edges, rows):
        width = int(np.max(np.diff(ptr))) if rows else 0
        mat = np.full((rows, width), -1, dtype=np.int32)
        for i in range(rows):
            seg = edges[ptr[i]:ptr[i + 1]]
            mat[i, :seg.shape[0]] = seg
        return mat, mat >= 0

    cn_pad, cn_mask = pad(cn_ptr, cn_edges, num_checks)
    vn_pad, vn_mask = pad(vn_ptr, vn_edges, n)
    cn_var_pad = np.where(cn_mask, edge_var[np.where(cn_mask, cn_pad, 0)], -1)
    return CodeGraph(edge_var=edge_var, cn_ptr=cn_ptr, cn_edges=cn_edges,
                     vn_ptr=vn_ptr, vn_edges=vn_edges,
                     cn_pad=cn_pad, cn_mask=cn_mask,
                     cn_var_pad=cn_var_pad.astype(np.int32),
                     vn_pad=vn_pad, vn_mask=vn_mask)


# ---------------------------------------------------------------------------
# Encode / decode
# ---------------------------------------------------------------------------

def encode(info_bits: np.ndarray, spec: CodeSpec) -> np.ndarray:
    info = np.asarray(info_bits, dtype=np.uint8)
    if info.shape != (spec.B_c,):
        raise ValueError(f"info word must have shape ({spec.B_c},), "
                         f"got {info.shape}")
    if np.any(info > 1):
        raise ValueError("info word must be binary")
    parity = (spec.enc_mat.astype(np.int64) @ info.astype(np.int64) % 2
              ).astype(np.uint8)
    return np.concatenate([info, parity])


def parity_ok(codeword: np.ndarray, spec: CodeSpec) -> bool:
    word = np.asarray(codeword, dtype=np.uint8)
    if word.shape != (spec.n_c,):
        raise ValueError(f"codeword must have shape ({spec.n_c},), "
                         f"got {word.shape}")
    syndrome = spec.H.astype(np.int64) @ word.astype(np.int64) % 2
    return not np.any(syndrome)


def decode_soft_batch(llrs: np.ndarray, spec: CodeSpec, backend=None):
    """Decode a (C, n_c) batch; returns (app_llrs, parity, iterations)."""
    block = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    if block.shape[1] != spec.n_c:
        raise ValueError(f"LLR rows must have length {spec.n_c}, "
                         f"got {block.shape[1]}")
    return kernels.bp_decode_batch(block, spec.graph, spec.bp_iters,
                                   LLR_CLIP, backend=backend)


def decode_soft(channel_llrs: np.ndarray, spec: CodeSpec,
                backend=None) -> SoftDecodeResult:
    llrs = np.asarray(channel_llrs, dtype=np.float64)
    if llrs.shape != (spec.n_c,):
        raise ValueError(f"LLR vector must have shape ({spec.n_c},), "
                         f"got {llrs.shape}")
    app, parity, iters = decode_soft_batch(llrs[None, :], spec,
                                           backend=backend)
    word = (app[0] < 0.0).astype(np.uint8)
    return SoftDecodeResult(app_llrs=app[0], hard_bits=word[:spec.B_c],
                            codeword=word, parity_ok=bool(parity[0]),
                            iterations=int(iters[0]))
