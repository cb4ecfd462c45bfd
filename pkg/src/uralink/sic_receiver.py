"""Frame-level receiver: per-chunk detection plus interference cancellation.

Each outer round runs the inner detector on every chunk's residual, collects
candidates that pass both qualification gates (parity satisfied and positive
activity LLR), and subtracts their re-encoded signals.  Recovery is
monotone: once a (chunk, pattern) pair is accepted it stays recovered; the
final message list is capped at ``K_a`` by activity score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import channel_code, encoder, ga_mud
from .codebook import PatternCodebook
from .config import SystemConfig
from .gmac_channel import ReceivedFrame
from .power_division import PowerPlan


@dataclass(frozen=True)
class RecoveredMessage:
    chunk_index: int
    pattern_index: int
    payload: np.ndarray        # (B_c,) decoded coded-payload bits
    bits: np.ndarray           # (B,) full reassembled message
    round_index: int           # outer round of first recovery
    activity_score: float


@dataclass
class ReceiverOutput:
    messages: list[RecoveredMessage]  # capped at K_a, best activity first
    residual: np.ndarray              # (J, n_p) received frame after SIC
    round_counts: list[int]           # newly recovered messages per round

    @property
    def message_bits(self) -> set[bytes]:
        return {m.bits.tobytes() for m in self.messages}


def pattern_power_ratios(codebook: PatternCodebook, config: SystemConfig,
                         plan: Optional[PowerPlan]) -> np.ndarray:
    """Per-pattern transmit amplitude ratios (all ones without a plan)."""
    if plan is None or not config.pd_enabled:
        return np.ones(codebook.num_patterns)
    if codebook.num_groups != plan.m:
        raise ValueError(f"codebook has {codebook.num_groups} power groups "
                         f"but the plan expects {plan.m}")
    return plan.ratios[codebook.group_of]


def subtract(residual_chunk: np.ndarray, message: RecoveredMessage,
             codebook: PatternCodebook, code_spec: channel_code.CodeSpec,
             power_ratio: float) -> None:
    """Remove a recovered message's re-encoded signal from a chunk, in place."""
    msg = encoder.UeMessage(bits=message.bits,
                            chunk_index=message.chunk_index,
                            pattern_index=message.pattern_index,
                            payload=message.payload)
    sig = encoder.encode_ue(msg, codebook, code_spec, power_ratio)
    residual_chunk -= sig.samples


def decode_frame(frame: ReceivedFrame, codebook: PatternCodebook,
                 code_spec: channel_code.CodeSpec, config: SystemConfig,
                 plan: Optional[PowerPlan] = None,
                 backend=None) -> ReceiverOutput:
    ratios = pattern_power_ratios(codebook, config, plan)
    residual = frame.chunks.copy()
    recovered: dict[tuple[int, int], RecoveredMessage] = {}
    round_counts: list[int] = []
    for rnd in range(config.outer_iters):
        new_msgs: list[RecoveredMessage] = []
        for chunk in range(config.J):
            cands, state = ga_mud.run_inner(residual[chunk], codebook,
                                            code_spec, config, ratios,
                                            backend=backend)
            if cands.size == 0:
                continue
            for k in np.nonzero(state.qualified)[0]:
                pattern = int(cands.pattern_indices[k])
                key = (chunk, pattern)
                if key in recovered:
                    continue
                payload = state.qual_codewords[k, :config.B_c].copy()
                bits = encoder.reassemble(chunk, pattern, payload, config)
                msg = RecoveredMessage(chunk_index=chunk,
                                       pattern_index=pattern,
                                       payload=payload, bits=bits,
                                       round_index=rnd,
                                       activity_score=float(state.qual_lb[k]))
                recovered[key] = msg
                new_msgs.append(msg)
        round_counts.append(len(new_msgs))
        if not new_msgs:
            break
        for msg in new_msgs:
            subtract(residual[msg.chunk_index], msg, codebook, code_spec,
                     float(ratios[msg.pattern_index]))
    final = sorted(recovered.values(),
                   key=lambda m: (-m.activity_score, m.round_index,
                                  m.chunk_index, m.pattern_index))
    return ReceiverOutput(messages=final[:config.K_a], residual=residual,
                          round_counts=round_counts)
