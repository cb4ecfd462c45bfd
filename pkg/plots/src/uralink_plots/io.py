"""CSV ingestion with strict, named-column schema errors.

`read_sweep_csv` accepts exactly the sweep harness layout; `read_overlay_csv`
accepts two-column external reference points (``ka,min_ebn0_db``).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

SWEEP_COLUMNS = (
    "eb_n0_db", "trials", "users_per_trial", "missed_total", "pupe",
    "ci_halfwidth", "pd_enabled", "m", "gamma0", "runtime_s",
)
OVERLAY_COLUMNS = ("ka", "min_ebn0_db")


class SchemaError(ValueError):
    """Input file does not match the expected column layout or value types."""


@dataclass(frozen=True)
class SweepRow:
    eb_n0_db: float
    trials: int
    users_per_trial: int
    pupe: float
    ci_halfwidth: float
    pd_enabled: bool


def _float(record: dict, column: str, path: str, line: int) -> float:
    raw = record.get(column)
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}:{line}: column '{column}' is not "
                          f"numeric: {raw!r}") from None


def _int(record: dict, column: str, path: str, line: int) -> int:
    raw = record.get(column)
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise SchemaError(f"{path}:{line}: column '{column}' is not an "
                          f"integer: {raw!r}") from None


def _bool(record: dict, column: str, path: str, line: int) -> bool:
    raw = record.get(column)
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise SchemaError(f"{path}:{line}: column '{column}' must be "
                      f"'true' or 'false', got {raw!r}")


def _check_header(fieldnames, required, path: str) -> None:
    if fieldnames is None:
        raise SchemaError(f"{path}: empty file, expected header "
                          f"{','.join(required)}")
    for column in required:
        if column not in fieldnames:
            raise SchemaError(f"{path}: missing column '{column}'")


def read_sweep_csv(path: str) -> list[SweepRow]:
    """Parse one harness sweep CSV; raises SchemaError naming any offender."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, SWEEP_COLUMNS, path)
        rows = []
        for line, rec in enumerate(reader, start=2):
            rows.append(SweepRow(
                eb_n0_db=_float(rec, "eb_n0_db", path, line),
                trials=_int(rec, "trials", path, line),
                users_per_trial=_int(rec, "users_per_trial", path, line),
                pupe=_float(rec, "pupe", path, line),
                ci_halfwidth=_float(rec, "ci_halfwidth", path, line),
                pd_enabled=_bool(rec, "pd_enabled", path, line),
            ))
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_overlay_csv(path: str) -> list[tuple[float, float]]:
    """Parse external reference points: ``ka,min_ebn0_db`` per row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, OVERLAY_COLUMNS, path)
        points = [(_float(rec, "ka", path, line),
                   _float(rec, "min_ebn0_db", path, line))
                  for line, rec in enumerate(reader, start=2)]
    if not points:
        raise SchemaError(f"{path}: no data rows")
    return points
