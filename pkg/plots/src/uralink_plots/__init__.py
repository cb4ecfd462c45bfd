"""Batch rendering of sweep-result curves from uralink CSV artifacts.

The package never imports the simulator; it consumes only the CSV files the
sweep harness writes (and optional user-supplied overlay CSVs of external
reference points).
"""

from .curves import CurveSpec, PUPE_FLOOR, min_ebn0_series
from .io import SchemaError, read_overlay_csv, read_sweep_csv
from .render import plot_min_ebn0_vs_ka, plot_pupe_vs_ebn0

__all__ = [
    "CurveSpec",
    "PUPE_FLOOR",
    "SchemaError",
    "min_ebn0_series",
    "plot_min_ebn0_vs_ka",
    "plot_pupe_vs_ebn0",
    "read_overlay_csv",
    "read_sweep_csv",
]
