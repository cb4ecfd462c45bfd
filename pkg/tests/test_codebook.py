"""Pattern codebook structure, grouping, determinism, and file round trip."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uralink import codebook


class TestGenerate:
    def test_degenerate_single_all_ones_pattern(self):
        cb = codebook.generate(n_p=4, n_c=4, B_p=0, seed=1)
        assert cb.num_patterns == 1
        assert cb.columns.tolist() == [[0, 1, 2, 3]]

    def test_row_structure(self):
        cb = codebook.generate(n_p=64, n_c=12, B_p=8, seed=3)
        assert cb.columns.shape == (256, 12)
        assert np.all(cb.columns >= 0) and np.all(cb.columns < 64)
        assert np.all(np.diff(cb.columns, axis=1) > 0)

    def test_all_columns_distinct_exhaustively(self):
        cb = codebook.generate(n_p=128, n_c=16, B_p=10, seed=5)
        assert len({row.tobytes() for row in cb.columns}) == 1024

    def test_same_seed_reproduces_bit_exactly(self):
        a = codebook.generate(n_p=256, n_c=24, B_p=9, seed=42)
        b = codebook.generate(n_p=256, n_c=24, B_p=9, seed=42)
        assert np.array_equal(a.columns, b.columns)

    def test_different_seed_differs(self):
        a = codebook.generate(n_p=256, n_c=24, B_p=9, seed=1)
        b = codebook.generate(n_p=256, n_c=24, B_p=9, seed=2)
        assert not np.array_equal(a.columns, b.columns)

    def test_infeasible_count_rejected(self):
        # C(4, 2) = 6 < 8 requested patterns.
        with pytest.raises(ValueError, match="distinct"):
            codebook.generate(n_p=4, n_c=2, B_p=3, seed=0)

    def test_bad_shapes_rejected(self):
        with pytest.raises(ValueError):
            codebook.generate(n_p=4, n_c=5, B_p=1, seed=0)
        with pytest.raises(ValueError):
            codebook.generate(n_p=0, n_c=0, B_p=0, seed=0)

    def test_columns_are_read_only(self):
        cb = codebook.generate(n_p=16, n_c=4, B_p=3, seed=0)
        with pytest.raises(ValueError):
            cb.columns[0, 0] = 5

    @given(st.integers(min_value=0, max_value=2**64 - 1))
    @settings(max_examples=20, deadline=None)
    def test_invariants_hold_for_any_seed(self, seed):
        cb = codebook.generate(n_p=32, n_c=6, B_p=5, seed=seed)
        assert np.all(np.diff(cb.columns, axis=1) > 0)
        assert len({r.tobytes() for r in cb.columns}) == cb.num_patterns


class TestAssignGroups:
    def test_single_group_is_default(self):
        cb = codebook.generate(n_p=32, n_c=6, B_p=5, seed=0)
        assert cb.num_groups == 1
        assert np.all(cb.group_of == 0)

    def test_m1_everything_in_group_zero(self):
        cb = codebook.generate(n_p=32, n_c=6, B_p=5, seed=0)
        g = codebook.assign_groups(cb, 1, seed=9)
        assert np.all(g.group_of == 0) and g.num_groups == 1

    def test_equal_partition_8192_by_4(self):
        cb = codebook.generate(n_p=512, n_c=48, B_p=13, seed=0)
        g = codebook.assign_groups(cb, 4, seed=9)
        assert np.bincount(g.group_of, minlength=4).tolist() == [2048] * 4

    def test_balanced_partition_8192_by_3(self):
        cb = codebook.generate(n_p=512, n_c=48, B_p=13, seed=0)
        g = codebook.assign_groups(cb, 3, seed=9)
        assert sorted(np.bincount(g.group_of, minlength=3).tolist()) == \
            [2730, 2731, 2731]

    def test_sizes_differ_by_at_most_one(self):
        cb = codebook.generate(n_p=64, n_c=8, B_p=7, seed=0)
        for m in (1, 2, 5, 7, 16, 128):
            g = codebook.assign_groups(cb, m, seed=3)
            counts = np.bincount(g.group_of, minlength=m)
            assert counts.max() - counts.min() <= 1, m

    def test_deterministic_given_seed(self):
        cb = codebook.generate(n_p=64, n_c=8, B_p=7, seed=0)
        a = codebook.assign_groups(cb, 5, seed=11)
        b = codebook.assign_groups(cb, 5, seed=11)
        assert np.array_equal(a.group_of, b.group_of)

    def test_out_of_range_m_rejected(self):
        cb = codebook.generate(n_p=16, n_c=4, B_p=2, seed=0)
        with pytest.raises(ValueError):
            codebook.assign_groups(cb, 0, seed=0)
        with pytest.raises(ValueError):
            codebook.assign_groups(cb, 5, seed=0)

    def test_original_codebook_untouched(self):
        cb = codebook.generate(n_p=16, n_c=4, B_p=2, seed=0)
        codebook.assign_groups(cb, 2, seed=0)
        assert cb.num_groups == 1 and np.all(cb.group_of == 0)


class TestOccupiedPositions:
    def test_length_and_content(self):
        cb = codebook.generate(n_p=32, n_c=6, B_p=4, seed=2)
        for i in (0, 7, 15):
            pos = codebook.occupied_positions(cb, i)
            assert pos.shape == (6,)
            assert np.array_equal(pos, cb.columns[i])

    def test_all_ones_toy(self):
        cb = codebook.generate(n_p=4, n_c=4, B_p=0, seed=1)
        assert codebook.occupied_positions(cb, 0).tolist() == [0, 1, 2, 3]

    def test_out_of_range(self):
        cb = codebook.generate(n_p=4, n_c=4, B_p=0, seed=1)
        with pytest.raises(IndexError):
            codebook.occupied_positions(cb, 1)
        with pytest.raises(IndexError):
            codebook.occupied_positions(cb, -1)

    def test_returns_a_copy(self):
        cb = codebook.generate(n_p=32, n_c=6, B_p=4, seed=2)
        pos = codebook.occupied_positions(cb, 0)
        pos[0] = -1
        assert cb.columns[0, 0] != -1


class TestDumpLoad:
    def test_round_trip(self, tmp_path):
        cb = codebook.generate(n_p=128, n_c=16, B_p=8, seed=77)
        path = str(tmp_path / "cb.bin")
        codebook.dump(cb, path)
        back = codebook.load(path)
        assert np.array_equal(back.columns, cb.columns)
        assert (back.n_p, back.n_c, back.B_p, back.seed) == (128, 16, 8, 77)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "cb.bin"
        path.write_bytes(b"\x00" * 8)
        with pytest.raises(ValueError, match="truncated"):
            codebook.load(str(path))

    def test_wrong_body_size(self, tmp_path):
        cb = codebook.generate(n_p=16, n_c=4, B_p=2, seed=0)
        path = str(tmp_path / "cb.bin")
        codebook.dump(cb, path)
        with open(path, "ab") as fh:
            fh.write(b"\x00\x00")
        with pytest.raises(ValueError, match="bytes"):
            codebook.load(path)

    def test_corrupt_rows_rejected(self, tmp_path):
        cb = codebook.generate(n_p=16, n_c=4, B_p=2, seed=0)
        path = str(tmp_path / "cb.bin")
        codebook.dump(cb, path)
        blob = bytearray(open(path, "rb").read())
        blob[32:36] = (0).to_bytes(2, "little") * 2  # duplicate position
        open(path, "wb").write(bytes(blob))
        with pytest.raises(ValueError, match="strictly increasing"):
            codebook.load(path)
