"""Scenario parameter validation, unit conversion, and JSON round trips."""

import dataclasses
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uralink import config as config_mod
from uralink.config import (SystemConfig, apply_overrides, config_from_dict,
                            config_to_dict, default_candidate_cap,
                            eb_n0_to_sigma2, load_config, profile,
                            profile_names, require_valid, save_config,
                            sigma2_to_eb_n0, validate)


def make_valid(**overrides) -> SystemConfig:
    base = dict(K_a=300, B=61, n=30000, J=16, B_J=4, B_p=13, B_c=44,
                n_p=1875, n_c=132, code_rate=1.0 / 3.0, candidate_cap=76)
    base.update(overrides)
    return SystemConfig(**base)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

class TestValidate:
    def test_consistent_bit_split_is_valid(self):
        assert validate(make_valid()) == []

    def test_wrong_total_bits_reported(self):
        cfg = make_valid(B=10)
        problems = validate(cfg)
        assert any("B=10" in p and "B_J+B_p+B_c" in p for p in problems)

    def test_chunking_arithmetic_is_valid(self):
        cfg = make_valid()  # n=30000, J=16, n_p=1875
        assert cfg.n == cfg.n_p * cfg.J
        assert validate(cfg) == []

    def test_chunk_count_must_be_power_of_two(self):
        cfg = make_valid(J=12, B_J=4, n=22500, n_p=1875)
        assert any("2**B_J" in p for p in validate(cfg))

    def test_code_length_must_match_rate(self):
        cfg = make_valid(n_c=131)
        assert any("n_c=131" in p for p in validate(cfg))

    def test_pattern_cannot_outgrow_chunk(self):
        cfg = make_valid(n_p=100, n=1600)
        assert any("must not exceed n_p" in p for p in validate(cfg))

    def test_candidate_cap_bounds(self):
        assert any("candidate_cap" in p
                   for p in validate(make_valid(candidate_cap=10)))
        assert any("candidate_cap" in p
                   for p in validate(make_valid(candidate_cap=10000)))

    def test_drop_threshold_must_be_finite(self):
        cfg = make_valid(drop_threshold=float("nan"))
        assert any("drop_threshold" in p for p in validate(cfg))

    def test_is_pure(self):
        cfg = make_valid(B=10)
        assert validate(cfg) == validate(cfg)

    def test_require_valid_raises_with_all_problems(self):
        with pytest.raises(ValueError, match="invalid configuration"):
            require_valid(make_valid(B=10, n_c=131))

    def test_auto_cap_fills_in(self):
        cfg = make_valid(candidate_cap=0)
        assert cfg.candidate_cap == default_candidate_cap(300, 16, 13)
        assert default_candidate_cap(300, 16, 13) == 4 * 19

    def test_auto_cap_respects_pattern_count(self):
        assert default_candidate_cap(K_a=1000, J=1, B_p=4) == 16


# ---------------------------------------------------------------------------
# Eb/N0 <-> sigma^2
# ---------------------------------------------------------------------------

class TestUnitConversion:
    def test_zero_db_unit_ratio(self):
        cfg = make_valid(B=50, B_c=33, n_c=100, B_J=4, B_p=13,
                         code_rate=0.33)
        assert eb_n0_to_sigma2(0.0, cfg) == pytest.approx(1.0, rel=1e-15)

    def test_zero_db_reference_numbers(self):
        cfg = make_valid()  # n_c=132, B=61
        assert eb_n0_to_sigma2(0.0, cfg) == pytest.approx(132.0 / 122.0,
                                                          rel=1e-15)

    def test_inverse_map_known_point(self):
        cfg = make_valid(B=50, B_c=33, n_c=100, B_J=4, B_p=13,
                         code_rate=0.33)
        # sigma^2 = 0.5 doubles Eb/N0 relative to the 0 dB point.
        assert sigma2_to_eb_n0(0.5, cfg) == pytest.approx(
            10.0 * math.log10(2.0), abs=1e-12)

    @given(st.floats(min_value=-10.0, max_value=30.0))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_identity(self, db):
        cfg = make_valid()
        back = sigma2_to_eb_n0(eb_n0_to_sigma2(db, cfg), cfg)
        assert back == pytest.approx(db, rel=1e-12, abs=1e-12)

    def test_rejects_non_finite(self):
        cfg = make_valid()
        with pytest.raises(ValueError):
            eb_n0_to_sigma2(float("inf"), cfg)
        with pytest.raises(ValueError):
            sigma2_to_eb_n0(0.0, cfg)


# ---------------------------------------------------------------------------
# JSON round trip and overrides
# ---------------------------------------------------------------------------

class TestSerialization:
    def test_round_trip(self, tmp_path):
        cfg = profile("toy-multi")
        path = tmp_path / "cfg.json"
        save_config(cfg, str(path))
        assert load_config(str(path)) == cfg

    def test_unknown_key_rejected(self):
        data = config_to_dict(profile("toy-single"))
        data["typo_key"] = 1
        with pytest.raises(ValueError, match="typo_key"):
            config_from_dict(data)

    def test_wrong_type_rejected(self):
        data = config_to_dict(profile("toy-single"))
        data["K_a"] = "one"
        with pytest.raises(ValueError, match="K_a"):
            config_from_dict(data)

    def test_bool_is_not_an_int(self):
        data = config_to_dict(profile("toy-single"))
        data["K_a"] = True
        with pytest.raises(ValueError, match="K_a"):
            config_from_dict(data)

    def test_incomplete_config_rejected(self):
        with pytest.raises(ValueError, match="incomplete"):
            config_from_dict({"K_a": 1})

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValueError, match="not valid JSON"):
            load_config(str(path))

    def test_inconsistent_file_rejected(self, tmp_path):
        data = config_to_dict(profile("toy-single"))
        data["B"] = 5
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        with pytest.raises(ValueError, match="invalid configuration"):
            load_config(str(path))

    def test_overrides(self):
        cfg = apply_overrides(profile("toy-multi"),
                              ["master_seed=7", "sigma2=0.25"])
        assert cfg.master_seed == 7 and cfg.sigma2 == 0.25

    def test_override_bad_key(self):
        with pytest.raises(ValueError, match="unknown config key"):
            apply_overrides(profile("toy-multi"), ["nope=1"])

    def test_override_bad_format(self):
        with pytest.raises(ValueError, match="key=value"):
            apply_overrides(profile("toy-multi"), ["justaword"])

    def test_override_must_stay_consistent(self):
        with pytest.raises(ValueError, match="invalid configuration"):
            apply_overrides(profile("toy-multi"), ["B=5"])


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

class TestProfiles:
    def test_all_profiles_valid(self):
        for name in profile_names():
            assert validate(profile(name)) == [], name

    def test_unknown_profile(self):
        with pytest.raises(ValueError, match="unknown profile"):
            profile("nope")

    def test_profiles_are_fresh_instances(self):
        assert profile("toy-multi") == profile("toy-multi")

    def test_reference_profile_bit_split(self):
        cfg = profile("reference-61")
        assert (cfg.B, cfg.B_J, cfg.B_p, cfg.B_c) == (61, 4, 13, 44)
        assert (cfg.n, cfg.J, cfg.n_p, cfg.n_c) == (30000, 16, 1875, 132)

    def test_users_per_chunk(self):
        assert profile("reference-61").users_per_chunk == pytest.approx(18.75)

    def test_config_is_immutable(self):
        with pytest.raises(dataclasses.FrozenInstanceError):
            profile("toy-single").K_a = 2
