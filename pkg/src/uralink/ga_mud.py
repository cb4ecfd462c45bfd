"""Iterative Gaussian-approximation multi-user detector for one chunk.

Every surviving pattern candidate is tracked with per-symbol moments; the
superposition of all other candidates at a shared channel use is treated as
Gaussian interference.  Detector LLRs and decoder extrinsic LLRs are
exchanged for a fixed number of inner iterations, and an activity log
likelihood ratio per candidate decides who is eventually believed present.

Numerically load-bearing details:
  * interference moments are true leave-one-out sums, so a candidate that
    shares no use with anyone sees mean exactly 0.0 and variance exactly
    ``sigma2``;
  * detector LLRs are kept unclipped in the state; clipping to
    ``channel_code.LLR_CLIP`` happens on decoder entry and on the stored
    extrinsic feedback.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import channel_code, kernels
from .codebook import PatternCodebook
from .config import SystemConfig

STAT_FLOOR = 1e-30  # variance floor keeping the statistics finite


class UseIndex:
    """Slot-sharing structure of a candidate set.

    Flat slot ``s = k * n_c + j`` is candidate ``k``'s j-th occupied
    position.  ``use_ptr``/``use_members`` group slots per channel use
    (members ascending); the pair arrays enumerate ordered pairs of distinct
    slots sharing a use, in (use, target, source) order, for the numpy
    backend's scatter-add.  Pairs are built lazily since the numba backend
    never needs them.
    """

    __slots__ = ("num_uses", "slot_use", "use_ptr", "use_members",
                 "_pair_dst", "_pair_src")

    def __init__(self, positions: np.ndarray, num_uses: int):
        self.num_uses = num_uses
        flat = positions.ravel().astype(np.int64)
        self.slot_use = flat
        order = np.argsort(flat, kind="stable")
        self.use_members = order
        self.use_ptr = np.searchsorted(flat[order],
                                       np.arange(num_uses + 1, dtype=np.int64))
        self._pair_dst = None
        self._pair_src = None

    def _build_pairs(self) -> None:
        dst_parts = []
        src_parts = []
        ptr, members = self.use_ptr, self.use_members
        for j in range(self.num_uses):
            seg = members[ptr[j]:ptr[j + 1]]
            d = seg.shape[0]
            if d < 2:
                continue
            tile = np.broadcast_to(seg, (d, d))
            off_diag = ~np.eye(d, dtype=bool)
            dst_parts.append(np.repeat(seg, d - 1))
            src_parts.append(tile[off_diag])
        if dst_parts:
            self._pair_dst = np.concatenate(dst_parts)
            self._pair_src = np.concatenate(src_parts)
        else:
            self._pair_dst = np.zeros(0, dtype=np.int64)
            self._pair_src = np.zeros(0, dtype=np.int64)

    @property
    def pair_dst(self) -> np.ndarray:
        if self._pair_dst is None:
            self._build_pairs()
        return self._pair_dst

    @property
    def pair_src(self) -> np.ndarray:
        if self._pair_src is None:
            self._build_pairs()
        return self._pair_src


@dataclass(frozen=True)
class CandidateSet:
    pattern_indices: np.ndarray  # (C,) pattern ids, ascending
    ratios: np.ndarray           # (C,) power ratio per candidate
    positions: np.ndarray        # (C, n_c) occupied positions
    index: UseIndex
    ratios_flat: np.ndarray      # (C*n_c,) ratio repeated per slot
    rsq_flat: np.ndarray         # (C*n_c,) squared ratio per slot

    @property
    def size(self) -> int:
        return self.pattern_indices.shape[0]


@dataclass
class DetectorState:
    ex: np.ndarray         # (C, n_c) posterior symbol means
    vx: np.ndarray         # (C, n_c) posterior symbol variances
    e_xi: np.ndarray       # (C, n_c) leave-one-out interference means
    v_xi: np.ndarray       # (C, n_c) leave-one-out interference variances
    lm: np.ndarray         # (C, n_c) detector LLRs (unclipped)
    ld: np.ndarray         # (C, n_c) decoder extrinsic LLRs (clipped)
    lb: np.ndarray         # (C,) candidate activity LLRs
    codewords: np.ndarray  # (C, n_c) hard decisions of the last decode
    parity: np.ndarray     # (C,) parity flags of the last decode
    er: np.ndarray         # (n_p,) total superposition mean per use
    vr: np.ndarray         # (n_p,) total superposition variance per use
    # Best qualifying decode seen across the inner iterations.  Iterative
    # feedback can oscillate, so a candidate that once satisfied parity with
    # positive activity keeps that snapshot for the cancellation stage.
    qualified: np.ndarray = None       # (C,) bool
    qual_lb: np.ndarray = None         # (C,) activity LLR at the snapshot
    qual_codewords: np.ndarray = None  # (C, n_c) snapshot hard decisions


def _candidate_set(pattern_indices: np.ndarray, pattern_ratios: np.ndarray,
                   codebook: PatternCodebook) -> CandidateSet:
    indices = np.asarray(pattern_indices, dtype=np.int64)
    ratios = pattern_ratios[indices].astype(np.float64)
    positions = codebook.columns[indices].astype(np.int32)
    n_c = codebook.n_c
    return CandidateSet(pattern_indices=indices, ratios=ratios,
                        positions=positions,
                        index=UseIndex(positions, codebook.n_p),
                        ratios_flat=np.repeat(ratios, n_c),
                        rsq_flat=np.repeat(ratios * ratios, n_c))


def screening_variance(config: SystemConfig) -> float:
    """Interference-plus-noise variance per occupied use at screening time.

    A use carries on average ``(K_a/J) * n_c / n_p`` unit-mean-square user
    symbols, so that occupancy-scaled load plus noise is the null-hypothesis
    variance.  (A per-chunk user count here, without the occupancy factor,
    overstates the variance so much that the score's energy penalty term
    dominates and inverts the ranking across unequal power ratios.)
    """
    load = config.users_per_chunk * config.n_c / config.n_p
    return max(load + config.sigma2, STAT_FLOOR)


def init_candidates(r_chunk: np.ndarray, codebook: PatternCodebook,
                    config: SystemConfig, pattern_ratios: np.ndarray,
                    backend=None) -> CandidateSet:
    """Screen all patterns against the raw chunk and keep the top scorers.

    The screening model treats each pattern position as carrying a symmetric
    binary symbol buried in Gaussian interference (everyone else active on
    that use, plus noise).  Ties keep the lower pattern index; the kept set
    is index-sorted.
    """
    var0 = screening_variance(config)
    scores = kernels.screen_patterns(r_chunk, codebook.columns,
                                     pattern_ratios, var0, backend=backend)
    num_groups = int(codebook.num_groups)
    if num_groups <= 1:
        keep = _select_top(scores, config.candidate_cap)
    else:
        # With several power groups a single global ranking degenerates:
        # the score scale grows with the assumed amplitude, so strong-group
        # patterns (true or not) crowd out every weaker group.  Splitting
        # the cap into per-group quotas keeps the set's group mix close to
        # the transmitted population, which also keeps the modelled
        # interference of the set near the energy actually on the channel.
        quota = config.candidate_cap // num_groups
        extra = config.candidate_cap - quota * num_groups
        parts = []
        for g in range(num_groups):
            want = quota + (1 if g >= num_groups - extra else 0)
            if want == 0:
                continue
            members = np.nonzero(codebook.group_of == g)[0]
            top = _select_top(scores[members], want)
            parts.append(members[top])
        keep = np.sort(np.concatenate(parts)) if parts else \
            np.empty(0, dtype=np.int64)
    return _candidate_set(keep, pattern_ratios, codebook)


def _select_top(scores: np.ndarray, cap: int) -> np.ndarray:
    """Indices of the ``cap`` best scores, ties to the lower index, sorted."""
    order = np.argsort(-scores, kind="stable")
    return np.sort(order[:cap])


def make_state(cands: CandidateSet, n_c: int, num_uses: int) -> DetectorState:
    C = cands.size
    return DetectorState(
        ex=np.zeros((C, n_c)), vx=np.ones((C, n_c)),
        e_xi=np.zeros((C, n_c)), v_xi=np.ones((C, n_c)),
        lm=np.zeros((C, n_c)), ld=np.zeros((C, n_c)),
        lb=np.zeros(C), codewords=np.zeros((C, n_c), dtype=np.uint8),
        parity=np.zeros(C, dtype=bool),
        er=np.zeros(num_uses), vr=np.ones(num_uses),
        qualified=np.zeros(C, dtype=bool), qual_lb=np.full(C, -np.inf),
        qual_codewords=np.zeros((C, n_c), dtype=np.uint8))


def record_qualifying(state: DetectorState) -> None:
    """Snapshot candidates currently passing both qualification gates."""
    better = state.parity & (state.lb > 0.0) & (state.lb > state.qual_lb)
    if np.any(better):
        state.qualified |= better
        state.qual_lb[better] = state.lb[better]
        state.qual_codewords[better] = state.codewords[better]


def update_statistics(state: DetectorState, cands: CandidateSet,
                      sigma2: float, backend=None) -> None:
    n_c = cands.positions.shape[1]
    e_xi, v_xi, er, vr = kernels.interference_stats(
        state.ex.ravel(), state.vx.ravel(), cands.ratios_flat,
        cands.rsq_flat, sigma2, cands.index, backend=backend)
    state.e_xi = e_xi.reshape(-1, n_c)
    state.v_xi = v_xi.reshape(-1, n_c)
    state.er = er
    state.vr = vr


def compute_prior_llrs(state: DetectorState, cands: CandidateSet,
                       r_chunk: np.ndarray) -> None:
    obs = r_chunk[cands.positions]
    state.lm = ((2.0 * cands.ratios[:, None]) * (obs - state.e_xi)) / state.v_xi


def exchange_with_decoder(state: DetectorState, code_spec: channel_code.CodeSpec,
                          backend=None) -> None:
    clip = channel_code.LLR_CLIP
    lm_c = np.clip(state.lm, -clip, clip)
    app, parity, _ = channel_code.decode_soft_batch(lm_c, code_spec,
                                                    backend=backend)
    state.ld = np.clip(app - lm_c, -clip, clip)
    state.codewords = (app < 0.0).astype(np.uint8)
    state.parity = parity


def update_moments(state: DetectorState) -> None:
    state.ex = np.tanh(0.5 * state.ld)
    state.vx = 1.0 - state.ex * state.ex


def score_activity(state: DetectorState, cands: CandidateSet,
                   config: SystemConfig, backend=None) -> None:
    if config.activity_prior_mode == "posterior":
        lprior = state.lm + state.ld
    else:
        lprior = state.lm
    state.lb = kernels.activity_scores(
        state.lm.ravel(), lprior.ravel(), cands.rsq_flat,
        state.v_xi.ravel(), cands.positions.shape[1], backend=backend)


def _compact(cands: CandidateSet, state: DetectorState,
             keep: np.ndarray, codebook: PatternCodebook,
             pattern_ratios: np.ndarray) -> tuple[CandidateSet, DetectorState]:
    sub = _candidate_set(cands.pattern_indices[keep], pattern_ratios, codebook)
    state.ex = state.ex[keep]
    state.vx = state.vx[keep]
    state.e_xi = state.e_xi[keep]
    state.v_xi = state.v_xi[keep]
    state.lm = state.lm[keep]
    state.ld = state.ld[keep]
    state.lb = state.lb[keep]
    state.codewords = state.codewords[keep]
    state.parity = state.parity[keep]
    state.qualified = state.qualified[keep]
    state.qual_lb = state.qual_lb[keep]
    state.qual_codewords = state.qual_codewords[keep]
    return sub, state


def run_inner(r_chunk: np.ndarray, codebook: PatternCodebook,
              code_spec: channel_code.CodeSpec, config: SystemConfig,
              pattern_ratios: np.ndarray,
              backend=None,
              initial_candidates: Optional[np.ndarray] = None,
              ) -> tuple[CandidateSet, DetectorState]:
    """Full inner loop on one chunk: screen, then iterate detect/decode.

    ``initial_candidates`` bypasses screening with an explicit sorted array
    of pattern indices (diagnostics and tests).
    """
    if initial_candidates is not None:
        cands = _candidate_set(np.asarray(initial_candidates, dtype=np.int64),
                               pattern_ratios, codebook)
    else:
        cands = init_candidates(r_chunk, codebook, config, pattern_ratios,
                                backend=backend)
    state = make_state(cands, codebook.n_c, codebook.n_p)
    sigma2 = max(config.sigma2, STAT_FLOOR)
    for it in range(config.inner_iters):
        update_statistics(state, cands, sigma2, backend=backend)
        compute_prior_llrs(state, cands, r_chunk)
        exchange_with_decoder(state, code_spec, backend=backend)
        update_moments(state)
        score_activity(state, cands, config, backend=backend)
        record_qualifying(state)
        if it < config.inner_iters - 1:
            keep = np.nonzero((state.lb >= config.drop_threshold)
                              | state.qualified)[0]
            if keep.shape[0] == 0:
                cands, state = _compact(cands, state, keep, codebook,
                                        pattern_ratios)
                break
            if keep.shape[0] < cands.size:
                cands, state = _compact(cands, state, keep, codebook,
                                        pattern_ratios)
    return cands, state
