"""Monte Carlo harness: per-user error rate versus Eb/N0.

Reproducibility contract: every random stream is derived from
``config.master_seed`` with a splitmix-style mixer keyed by purpose tags and
indices.  Per-trial seeds depend only on the master seed and the Eb/N0 value
(not on trial scheduling), and per-point aggregation sums integer counts in
trial order, so results are identical for any worker count.
"""

from __future__ import annotations

import dataclasses
import json
import math
import multiprocessing
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import channel_code as channel_code_mod
from . import codebook as codebook_mod
from . import encoder, gmac_channel, kernels, power_division, sic_receiver
from .config import SystemConfig, config_to_dict, eb_n0_to_sigma2

_M64 = (1 << 64) - 1
Z_95 = 1.959963984540054  # two-sided 95% normal quantile


# ---------------------------------------------------------------------------
# Seed derivation
# ---------------------------------------------------------------------------

def _mix64(x: int) -> int:
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def _fnv1a(tag: str) -> int:
    h = 0xCBF29CE484222325
    for b in tag.encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _M64
    return h


def derive_seed(master_seed: int, tag: str, index: int = 0) -> int:
    """Deterministic uint64 sub-seed for stream ``tag`` / ``index``."""
    x = _mix64((master_seed & _M64) ^ _fnv1a(tag))
    return _mix64(x ^ (index & _M64))


def _point_seed(master_seed: int, eb_n0_db: float) -> int:
    bits = int(np.float64(eb_n0_db).view(np.uint64))
    return derive_seed(master_seed, "operating-point", bits)


# ---------------------------------------------------------------------------
# System assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class System:
    codebook: codebook_mod.PatternCodebook
    code_spec: channel_code_mod.CodeSpec
    plan: Optional[power_division.PowerPlan]


def build_system(config: SystemConfig, m_max: int = 16) -> System:
    """Codebook, channel code, and (when enabled) the power plan."""
    cb = codebook_mod.generate(config.n_p, config.n_c, config.B_p,
                               derive_seed(config.master_seed, "codebook"))
    code = channel_code_mod.make_code(
        config.B_c, config.n_c,
        derive_seed(config.master_seed, "channel-code"), config.bp_iters)
    plan = None
    if config.pd_enabled:
        plan = power_division.plan_for_config(config, m_max=m_max)
        cb = codebook_mod.assign_groups(
            cb, plan.m, derive_seed(config.master_seed, "power-groups"))
    return System(codebook=cb, code_spec=code, plan=plan)


# ---------------------------------------------------------------------------
# Single trial
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial_seed: int
    missed: int             # users whose message is absent from the output
    collided: int           # users sharing (chunk, pattern) with another
    false_alarms: int       # output messages nobody transmitted
    recovered: int          # size of the output list


def run_trial(config: SystemConfig, system: System, trial_seed: int,
              backend=None,
              payloads: Optional[np.ndarray] = None) -> TrialRecord:
    if payloads is None:
        payload_rng = np.random.Generator(np.random.PCG64(
            derive_seed(trial_seed, "payload")))
        payloads = payload_rng.integers(0, 2, size=(config.K_a, config.B),
                                        dtype=np.uint8)
    else:
        payloads = np.asarray(payloads, dtype=np.uint8)
        if payloads.shape != (config.K_a, config.B):
            raise ValueError(f"payloads must have shape "
                             f"({config.K_a}, {config.B}), "
                             f"got {payloads.shape}")
    ratios = sic_receiver.pattern_power_ratios(system.codebook, config,
                                               system.plan)
    msgs = [encoder.split_bits(payloads[u], config)
            for u in range(config.K_a)]
    signals = [encoder.encode_ue(m, system.codebook, system.code_spec,
                                 float(ratios[m.pattern_index]))
               for m in msgs]
    frame = gmac_channel.transmit(signals, config.sigma2,
                                  derive_seed(trial_seed, "noise"), config)
    out = sic_receiver.decode_frame(frame, system.codebook, system.code_spec,
                                    config, system.plan, backend=backend)
    sent = {}
    keys: dict[tuple[int, int], int] = {}
    for u, m in enumerate(msgs):
        sent[payloads[u].tobytes()] = u
        key = (m.chunk_index, m.pattern_index)
        keys[key] = keys.get(key, 0) + 1
    got = out.message_bits
    missed = sum(payloads[u].tobytes() not in got for u in range(config.K_a))
    collided = sum(keys[(m.chunk_index, m.pattern_index)] > 1 for m in msgs)
    false_alarms = sum(b not in sent for b in got)
    return TrialRecord(trial_seed=trial_seed, missed=missed,
                       collided=collided, false_alarms=false_alarms,
                       recovered=len(out.messages))


# ---------------------------------------------------------------------------
# Per-point Monte Carlo
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointResult:
    eb_n0_db: float
    trials: int
    users_per_trial: int
    missed_total: int
    pupe: float
    ci_halfwidth: float      # 95% normal-approximation halfwidth
    collided_total: int
    false_alarm_total: int
    runtime_s: float         # wall time spent on this point


_WORKER_STATE: dict = {}


def _init_worker(config: SystemConfig, system: System) -> None:
    _WORKER_STATE["config"] = config
    _WORKER_STATE["system"] = system


def _worker_trial(trial_seed: int) -> tuple[int, int, int, int]:
    rec = run_trial(_WORKER_STATE["config"], _WORKER_STATE["system"],
                    trial_seed)
    return rec.missed, rec.collided, rec.false_alarms, rec.recovered


def estimate_pupe(config: SystemConfig, eb_n0_db: float, n_trials: int,
                  system: Optional[System] = None, workers: int = 1,
                  backend=None) -> PointResult:
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    t0 = time.perf_counter()
    cfg = dataclasses.replace(config,
                              sigma2=eb_n0_to_sigma2(eb_n0_db, config))
    if system is None:
        system = build_system(config)
    pseed = _point_seed(config.master_seed, eb_n0_db)
    seeds = [derive_seed(pseed, "trial", t) for t in range(n_trials)]
    if workers <= 1:
        counts = [_trial_counts(cfg, system, s, backend) for s in seeds]
    else:
        kernels.warmup()  # compile before forking so children inherit it
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers, initializer=_init_worker,
                      initargs=(cfg, system)) as pool:
            counts = pool.map(_worker_trial, seeds,
                              chunksize=max(1, n_trials // (4 * workers)))
    missed = sum(c[0] for c in counts)
    collided = sum(c[1] for c in counts)
    false_alarms = sum(c[2] for c in counts)
    slots = n_trials * config.K_a
    pupe = missed / slots
    ci = Z_95 * math.sqrt(max(pupe * (1.0 - pupe), 0.0) / slots)
    return PointResult(eb_n0_db=float(eb_n0_db), trials=n_trials,
                       users_per_trial=config.K_a, missed_total=missed,
                       pupe=pupe, ci_halfwidth=ci, collided_total=collided,
                       false_alarm_total=false_alarms,
                       runtime_s=time.perf_counter() - t0)


def _trial_counts(cfg, system, seed, backend):
    rec = run_trial(cfg, system, seed, backend=backend)
    return rec.missed, rec.collided, rec.false_alarms, rec.recovered


# ---------------------------------------------------------------------------
# Sweeps and threshold search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    points: list[PointResult]       # ascending Eb/N0
    target_pupe: float
    min_ebn0_db: Optional[float]    # smallest grid point meeting the target
    no_crossing: bool


def sweep(config: SystemConfig, eb_n0_grid: Sequence[float], n_trials: int,
          system: Optional[System] = None, workers: int = 1,
          backend=None) -> SweepResult:
    if len(eb_n0_grid) == 0:
        raise ValueError("eb_n0_grid must not be empty")
    if system is None:
        system = build_system(config)
    points = [estimate_pupe(config, db, n_trials, system=system,
                            workers=workers, backend=backend)
              for db in sorted(float(x) for x in eb_n0_grid)]
    min_db = next((p.eb_n0_db for p in points if p.pupe <= config.target_pupe),
                  None)
    return SweepResult(points=points, target_pupe=config.target_pupe,
                       min_ebn0_db=min_db, no_crossing=min_db is None)


def find_min_ebn0(config: SystemConfig, lo_db: float, hi_db: float,
                  n_trials: int, tol_db: float = 0.1,
                  system: Optional[System] = None, workers: int = 1,
                  backend=None) -> SweepResult:
    """Bisect the smallest Eb/N0 whose estimated error meets the target.

    The estimated error is treated as non-increasing in Eb/N0.  If even
    ``hi_db`` misses the target the result is flagged ``no_crossing``; if
    ``lo_db`` already meets it, ``lo_db`` is returned.
    """
    if not (hi_db > lo_db):
        raise ValueError(f"need hi_db > lo_db, got [{lo_db}, {hi_db}]")
    if tol_db <= 0:
        raise ValueError(f"tol_db must be positive, got {tol_db}")
    if system is None:
        system = build_system(config)
    target = config.target_pupe
    trace: list[PointResult] = []

    def measure(db: float) -> PointResult:
        point = estimate_pupe(config, db, n_trials, system=system,
                              workers=workers, backend=backend)
        trace.append(point)
        return point

    lo_point = measure(lo_db)
    if lo_point.pupe <= target:
        return _sweep_result(trace, target, lo_db)
    hi_point = measure(hi_db)
    if hi_point.pupe > target:
        return _sweep_result(trace, target, None)
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if measure(mid).pupe <= target:
            hi = mid
        else:
            lo = mid
    return _sweep_result(trace, target, hi)


def _sweep_result(trace, target, min_db):
    points = sorted(trace, key=lambda p: p.eb_n0_db)
    return SweepResult(points=points, target_pupe=target, min_ebn0_db=min_db,
                       no_crossing=min_db is None)


# ---------------------------------------------------------------------------
# Artifacts
# ---------------------------------------------------------------------------

CSV_HEADER = ("eb_n0_db,trials,users_per_trial,missed_total,pupe,"
              "ci_halfwidth,pd_enabled,m,gamma0,runtime_s")


def write_points_csv(path: str, points: Sequence[PointResult],
                     config: SystemConfig,
                     plan: Optional[power_division.PowerPlan],
                     timing: bool = False) -> None:
    """One row per operating point, LF endings, '.' decimals.

    ``runtime_s`` is written as 0.0 unless ``timing`` is requested, keeping
    the file byte-reproducible across runs and worker counts.
    """
    pd_on = config.pd_enabled and plan is not None
    m = plan.m if pd_on else 1
    gamma0 = plan.gamma0 if pd_on else 0.0
    lines = [CSV_HEADER]
    for p in points:
        rt = p.runtime_s if timing else 0.0
        lines.append(",".join([
            repr(float(p.eb_n0_db)), str(p.trials), str(p.users_per_trial),
            str(p.missed_total), repr(float(p.pupe)),
            repr(float(p.ci_halfwidth)),
            "true" if pd_on else "false", str(m), repr(float(gamma0)),
            repr(float(rt)),
        ]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def summary_dict(result: SweepResult, config: SystemConfig,
                 plan: Optional[power_division.PowerPlan],
                 workers: int) -> dict:
    return {
        "config": config_to_dict(config),
        "backend": kernels.BACKEND,
        "workers": workers,
        "target_pupe": result.target_pupe,
        "min_ebn0_db": result.min_ebn0_db,
        "no_crossing": result.no_crossing,
        "plan": plan.to_json_dict() if plan is not None else None,
        "points": [dataclasses.asdict(p) for p in result.points],
        "total_runtime_s": sum(p.runtime_s for p in result.points),
    }


def write_summary_json(path: str, result: SweepResult, config: SystemConfig,
                       plan: Optional[power_division.PowerPlan],
                       workers: int) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary_dict(result, config, plan, workers), fh, indent=2,
                  sort_keys=True)
        fh.write("\n")
