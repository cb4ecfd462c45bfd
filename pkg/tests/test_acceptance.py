"""Headline acceptance checks, one per release requirement.

Each test prints a single ``[acceptance] <name>: PASS|FAIL`` verdict line
directly to the console (bypassing capture) so the overall status can be
read off any pytest run.  The bodies enforce the stated tolerances; a FAIL
line is always accompanied by the usual pytest failure detail.
"""

import contextlib
import dataclasses
import json
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from uralink import codebook as codebook_mod
from uralink import config as config_mod
from uralink import encoder, ga_mud, gmac_channel, harness, sic_receiver
from uralink import power_division as pd

DATA = Path(__file__).parent / "data"


@contextlib.contextmanager
def report(capsys, name):
    """Print one PASS/FAIL verdict line for the enclosed checks."""
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"\n[acceptance] {name}: FAIL", flush=True)
        raise
    with capsys.disabled():
        print(f"\n[acceptance] {name}: PASS", flush=True)


def test_analytical_error_matches_independent_oracle(capsys):
    """Closed-form per-user error vs a frozen, independently written
    arbitrary-precision evaluation over gamma x K0 x (n0, B0) grid."""
    with report(capsys, "analytical per-user error vs frozen oracle"):
        rows = json.loads((DATA / "stage_error_reference.json").read_text())
        assert len(rows) == 32  # {0.01,0.1,1,10} x {1,2,5,20} x 2 shapes
        mp.mp.dps = 60
        # Below ~1e-320 the quantity is not representable in float64; the
        # correctly rounded double is exactly 0.0.
        underflow = mp.mpf("1e-320")
        worst = mp.mpf(0)
        for row in rows:
            got = pd.tin_sic_pupe(pd.TinSicParams(
                gamma=float(row["gamma"]), K0=row["K0"],
                n0=row["n0"], B0=row["B0"]))
            ref = mp.mpf(row["epsilon"])
            if ref < underflow:
                assert got == 0.0, row
                continue
            rel = abs(mp.mpf(repr(got)) - ref) / ref
            worst = max(worst, rel)
        assert worst <= mp.mpf("1e-12"), f"worst relative error {worst}"


def test_single_user_capacity_boundary_is_half(capsys):
    """K0=1 at gamma giving C == R exactly must return 0.5 within 1e-9."""
    with report(capsys, "single-user capacity boundary -> 0.5"):
        for n0, B0 in ((1000, 100), (1875, 61)):
            gamma = 2.0 ** (2.0 * B0 / n0) - 1.0
            got = pd.tin_sic_pupe(pd.TinSicParams(gamma, 1, n0, B0))
            assert got == pytest.approx(0.5, abs=1e-9), (n0, B0)


def test_power_plan_equal_snr_identities(capsys):
    """For every group count 1..16: mean squared amplitude ratio is 1 and
    each group's power over its decode-time noise floor equals gamma0,
    both within 1e-12."""
    with report(capsys, "power plan equal-SNR identities (m=1..16)"):
        K, gamma0, sigma2 = 64.0, 0.112, 0.5
        for m in range(1, 17):
            plan = pd.build_power_plan(m, gamma0, K, sigma2)
            assert abs(float(np.sum(plan.ratios**2)) / m - 1.0) <= 1e-12, m
            prior = np.concatenate(([0.0], np.cumsum(plan.raw_powers[:-1])))
            floors = sigma2 + (K / m) * prior
            snrs = plan.raw_powers / floors
            assert float(np.max(np.abs(snrs - gamma0))) <= 1e-12, m
            assert float(np.max(snrs) - np.min(snrs)) <= 1e-12, m


def test_lone_candidate_llr_is_matched_filter(capsys):
    """With one candidate and zero modeled interference the detector LLR
    must equal the single-user AWGN LLR 2r/sigma^2 bit for bit."""
    with report(capsys, "lone-candidate LLR == 2r/sigma^2 bit-exact (1e4 draws)"):
        cols = np.array([[0, 1, 2, 3]], dtype=np.int32)
        cols.setflags(write=False)
        group = np.zeros(1, dtype=np.int32)
        group.setflags(write=False)
        cb = codebook_mod.PatternCodebook(n_p=4, n_c=4, B_p=0, seed=0,
                                          columns=cols, group_of=group,
                                          num_groups=1)
        cands = ga_mud._candidate_set(np.array([0]), np.ones(1), cb)
        rng = np.random.Generator(np.random.PCG64(20240))
        for i in range(10_000):
            sigma2 = float(rng.uniform(0.05, 4.0))
            r = rng.normal(size=4)
            state = ga_mud.make_state(cands, 4, 4)
            ga_mud.update_statistics(state, cands, sigma2)
            ga_mud.compute_prior_llrs(state, cands, r)
            assert np.array_equal(state.lm[0], 2.0 * r / sigma2), i


def _collision_free_payloads(seed, cfg):
    """K_a random payloads redrawn until all (chunk, pattern) pairs differ."""
    rng = np.random.Generator(np.random.PCG64(seed))
    seen, rows = set(), []
    while len(rows) < cfg.K_a:
        bits = rng.integers(0, 2, cfg.B, dtype=np.uint8)
        msg = encoder.split_bits(bits, cfg)
        key = (msg.chunk_index, msg.pattern_index)
        if key in seen:
            continue
        seen.add(key)
        rows.append((bits, msg))
    return rows


def test_noiseless_cancellation_leaves_zero_residual(capsys):
    """sigma^2 = 0, collision-free frames: every message is recovered and
    every post-cancellation residual sample is exactly 0.0."""
    with report(capsys, "noiseless SIC residual identically zero (100 frames)"):
        cfg = config_mod.profile("toy-multi")
        cfg0 = dataclasses.replace(cfg, sigma2=0.0)
        system = harness.build_system(cfg)
        for seed in range(100):
            rows = _collision_free_payloads(7000 + seed, cfg)
            sigs = [encoder.encode_ue(m, system.codebook, system.code_spec,
                                      1.0) for _, m in rows]
            frame = gmac_channel.transmit(sigs, 0.0, seed, cfg0)
            out = sic_receiver.decode_frame(frame, system.codebook,
                                            system.code_spec, cfg0, plan=None)
            assert out.message_bits == {bytes(b) for b, _ in rows}, seed
            assert np.all(out.residual == 0.0), seed


def test_single_user_link_is_error_free_at_10db(capsys):
    """One active user at Eb/N0 = 10 dB: zero errors across 500 frames,
    finishing in under a minute."""
    with report(capsys, "single-user PUPE == 0 at 10 dB (500 trials, <60 s)"):
        cfg = config_mod.profile("toy-single")
        t0 = time.perf_counter()
        point = harness.estimate_pupe(cfg, 10.0, 500)
        elapsed = time.perf_counter() - t0
        assert point.pupe == 0.0, point
        assert point.missed_total == 0
        assert elapsed < 60.0, f"took {elapsed:.1f}s"


def test_power_division_lowers_required_ebn0(capsys):
    """Dense-load profile, both receiver arms bisected at >=200 trials per
    point: the power-division arm's minimum Eb/N0 must not exceed the
    uniform-power arm's, with each crossing cleared at 95% confidence."""
    with report(capsys, "power division lowers min Eb/N0 (95% confidence)"):
        base = config_mod.profile("toy-dense")
        lo, hi, n_trials = 6.0, 16.0, 200
        results = {}
        for pd_on in (True, False):
            cfg = dataclasses.replace(base, pd_enabled=pd_on)
            results[pd_on] = harness.find_min_ebn0(cfg, lo, hi, n_trials)
        for pd_on, res in results.items():
            best = min(p.pupe for p in res.points)
            assert not res.no_crossing, (
                f"pd_enabled={pd_on}: target {base.target_pupe} never met on "
                f"[{lo}, {hi}] dB (best estimated error {best:.4f})")
        res_pd, res_ref = results[True], results[False]
        at_min = next(p for p in res_pd.points
                      if p.eb_n0_db == res_pd.min_ebn0_db)
        assert at_min.pupe + at_min.ci_halfwidth <= base.target_pupe
        assert res_pd.min_ebn0_db <= res_ref.min_ebn0_db, (
            f"{res_pd.min_ebn0_db} dB (division) vs "
            f"{res_ref.min_ebn0_db} dB (uniform)")


def test_sweep_csv_identical_across_worker_counts(capsys, tmp_path):
    """Same master seed, 1 worker vs 3 workers: byte-identical CSV."""
    with report(capsys, "sweep CSV byte-identical across worker counts"):
        cfg = config_mod.profile("toy-single")
        system = harness.build_system(cfg)
        grid = [4.0, 8.0]
        paths = []
        for workers in (1, 3):
            res = harness.sweep(cfg, grid, n_trials=40, system=system,
                                workers=workers)
            path = tmp_path / f"w{workers}.csv"
            harness.write_points_csv(str(path), res.points, cfg, system.plan)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()
