#!/usr/bin/env python3
"""Benchmark the four hot kernels on both backends.

Builds a realistic dense-load chunk (64 users, 8192-pattern codebook,
48 occupied uses out of 512) and times each kernel on the pure-numpy path
and, when available, the compiled numba path.

Usage::

    python3 benchmarks/bench_kernels.py [--repeats 30] [--candidates 64]

Set ``URALINK_NO_NUMBA=1`` to restrict the run to the numpy backend.
"""

import argparse
import statistics
import time

import numpy as np

from uralink import channel_code, config as config_mod, encoder, ga_mud
from uralink import gmac_channel, harness, kernels


def build_workload(num_candidates: int, seed: int = 7):
    cfg = config_mod.profile("toy-dense")
    system = harness.build_system(cfg)
    ratios = np.ones(2 ** cfg.B_p)

    rng = np.random.Generator(np.random.PCG64(seed))
    sigs = []
    for _ in range(cfg.K_a):
        bits = rng.integers(0, 2, cfg.B, dtype=np.uint8)
        msg = encoder.split_bits(bits, cfg)
        sigs.append(encoder.encode_ue(msg, system.codebook, system.code_spec,
                                      1.0))
    frame = gmac_channel.transmit(sigs, cfg.sigma2, seed + 1, cfg)
    r = frame.chunks[0]

    cands = ga_mud._candidate_set(np.arange(num_candidates), ratios,
                                  system.codebook)
    state = ga_mud.make_state(cands, cfg.n_c, cfg.n_p)
    # Mid-iteration soft symbols: partially converged decoder output.
    state.ex = np.tanh(rng.normal(scale=1.5, size=state.ex.shape))
    state.vx = 1.0 - state.ex ** 2
    state.lm = rng.normal(scale=4.0, size=state.lm.shape)
    state.ld = rng.normal(scale=4.0, size=state.ld.shape)
    state.v_xi = rng.uniform(0.5, 4.0, size=state.v_xi.shape)
    llrs = rng.normal(scale=2.0, size=(num_candidates, cfg.n_c))
    return cfg, system, r, cands, state, llrs


def time_call(fn, repeats: int) -> float:
    """Median wall time of ``fn()`` over ``repeats`` runs, in seconds."""
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=30,
                    help="timed repetitions per kernel (median reported)")
    ap.add_argument("--candidates", type=int, default=64,
                    help="candidate-set size for the per-candidate kernels")
    args = ap.parse_args()

    cfg, system, r, cands, state, llrs = build_workload(args.candidates)
    var0 = ga_mud.screening_variance(cfg)
    sigma2 = cfg.sigma2
    backends = kernels.available_backends()
    if "numba" in backends:
        kernels.warmup()

    cases = {
        "screen_patterns": lambda b: kernels.screen_patterns(
            r, system.codebook.columns, np.ones(2 ** cfg.B_p), var0,
            backend=b),
        "interference_stats": lambda b: kernels.interference_stats(
            state.ex.ravel(), state.vx.ravel(), cands.ratios_flat,
            cands.rsq_flat, sigma2, cands.index, backend=b),
        "activity_scores": lambda b: kernels.activity_scores(
            state.lm.ravel(), (state.lm + state.ld).ravel(), cands.rsq_flat,
            state.v_xi.ravel(), cfg.n_c, backend=b),
        "bp_decode_batch": lambda b: kernels.bp_decode_batch(
            llrs, system.code_spec.graph, system.code_spec.bp_iters,
            channel_code.LLR_CLIP, backend=b),
    }

    print(f"workload: {cfg.K_a} users, {2 ** cfg.B_p} patterns, "
          f"{args.candidates} candidates, n_c={cfg.n_c}, n_p={cfg.n_p}")
    print(f"repeats: {args.repeats} (median)   backends: {backends}")
    print()
    header = f"{'kernel':<20}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call in cases.items():
        call(backends[-1])  # one untimed call per backend path
        times = {}
        for b in backends:
            call(b)
            times[b] = time_call(lambda: call(b), args.repeats)
        row = f"{name:<20}" + "".join(
            f"{times[b] * 1e3:>10.3f}ms" for b in backends)
        if len(backends) == 2:
            row += f"{times['numpy'] / times['numba']:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
