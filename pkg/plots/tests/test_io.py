"""CSV schema parsing: strict columns, named offenders."""

from pathlib import Path

import pytest

from uralink_plots import io

DATA = Path(__file__).parent / "data"


def _rewrite(path, tmp_path, transform):
    lines = path.read_text().splitlines()
    out = tmp_path / path.name
    out.write_text("\n".join(transform(lines)) + "\n")
    return out


class TestReadSweepCsv:
    def test_parses_fixture(self):
        rows = io.read_sweep_csv(str(DATA / "pd_on.csv"))
        assert len(rows) >= 1
        assert all(r.trials > 0 for r in rows)
        assert all(0.0 <= r.pupe <= 1.0 for r in rows)
        assert all(r.pd_enabled for r in rows)

    def test_multi_ka_fixture_carries_three_groups(self):
        rows = io.read_sweep_csv(str(DATA / "ka_series_pd.csv"))
        assert {r.users_per_trial for r in rows} == {4, 8, 12}

    @pytest.mark.parametrize("column", list(io.SWEEP_COLUMNS))
    def test_missing_column_named(self, tmp_path, column):
        def drop(lines):
            header = lines[0].split(",")
            idx = header.index(column)
            return [",".join(v for i, v in enumerate(ln.split(","))
                             if i != idx) for ln in lines]
        bad = _rewrite(DATA / "single_point.csv", tmp_path, drop)
        with pytest.raises(io.SchemaError, match=f"missing column '{column}'"):
            io.read_sweep_csv(str(bad))

    def test_non_numeric_value_named(self, tmp_path):
        def poison(lines):
            row = lines[1].split(",")
            row[4] = "not-a-number"  # pupe
            return [lines[0], ",".join(row)] + lines[2:]
        bad = _rewrite(DATA / "single_point.csv", tmp_path, poison)
        with pytest.raises(io.SchemaError, match="column 'pupe'"):
            io.read_sweep_csv(str(bad))

    def test_bad_boolean_named(self, tmp_path):
        def poison(lines):
            row = lines[1].split(",")
            row[6] = "yes"  # pd_enabled
            return [lines[0], ",".join(row)] + lines[2:]
        bad = _rewrite(DATA / "single_point.csv", tmp_path, poison)
        with pytest.raises(io.SchemaError, match="column 'pd_enabled'"):
            io.read_sweep_csv(str(bad))

    def test_empty_file_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(io.SchemaError, match="empty file"):
            io.read_sweep_csv(str(empty))

    def test_header_only_rejected(self, tmp_path):
        hdr = tmp_path / "hdr.csv"
        hdr.write_text(",".join(io.SWEEP_COLUMNS) + "\n")
        with pytest.raises(io.SchemaError, match="no data rows"):
            io.read_sweep_csv(str(hdr))

    def test_input_file_not_modified(self):
        path = DATA / "pd_on.csv"
        before = path.read_bytes()
        io.read_sweep_csv(str(path))
        assert path.read_bytes() == before


class TestReadOverlayCsv:
    def test_parses_fixture(self):
        pts = io.read_overlay_csv(str(DATA / "overlay_ka.csv"))
        assert pts == [(4.0, 2.4), (8.0, 3.6), (12.0, 6.1)]

    def test_missing_column_named(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("ka,value\n4,2.4\n")
        with pytest.raises(io.SchemaError, match="missing column 'min_ebn0_db'"):
            io.read_overlay_csv(str(bad))
