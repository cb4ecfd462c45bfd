"""Curve extraction from parsed sweep rows."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .io import SweepRow

# Log-scale axis floor: error rates of exactly zero are drawn at this level
# (with an annotation) instead of vanishing from the plot.
PUPE_FLOOR = 1e-4


@dataclass(frozen=True)
class CurveSpec:
    """Everything one rendering run needs.

    ``inputs`` are sweep CSV paths, one series each; ``labels`` must match
    them one-to-one.  ``overlay`` optionally names an external two-column
    reference file drawn as a clearly marked extra series.
    """
    inputs: tuple[str, ...]
    labels: tuple[str, ...]
    out_path: str
    target: float = 0.05
    xlim: Optional[tuple[float, float]] = None
    ylim: Optional[tuple[float, float]] = None
    overlay: Optional[str] = None
    overlay_label: str = "reference"
    dpi: int = 150

    def __post_init__(self):
        if len(self.inputs) < 1:
            raise ValueError("at least one input file is required")
        if len(self.labels) != len(self.inputs):
            raise ValueError(f"got {len(self.labels)} labels for "
                             f"{len(self.inputs)} inputs")
        if not 0.0 < self.target < 1.0:
            raise ValueError(f"target must lie in (0, 1), got {self.target}")


def labels_from_paths(inputs: list[str]) -> list[str]:
    """Default series labels: file stem, deduplicated by full path order."""
    stems = []
    for p in inputs:
        stem = p.rsplit("/", 1)[-1]
        stem = stem[:-4] if stem.endswith(".csv") else stem
        stems.append(stem)
    return stems


def min_ebn0_series(rows: list[SweepRow],
                    target: float) -> list[tuple[int, float]]:
    """(K_a, min Eb/N0 meeting target) pairs, ascending in K_a.

    Rows are grouped by ``users_per_trial`` so one file may carry sweeps at
    several user counts.  A group none of whose points meets the target is
    an error: the curve would silently misrepresent the data.
    """
    groups: dict[int, list[SweepRow]] = {}
    for row in rows:
        groups.setdefault(row.users_per_trial, []).append(row)
    series = []
    for ka in sorted(groups):
        pts = sorted(groups[ka], key=lambda r: r.eb_n0_db)
        crossing = next((r.eb_n0_db for r in pts if r.pupe <= target), None)
        if crossing is None:
            raise ValueError(
                f"no operating point meets target {target:g} for "
                f"K_a={ka}; cannot place it on the curve")
        series.append((ka, crossing))
    return series


def clip_for_log_axis(pupes: list[float]) -> tuple[list[float], int]:
    """Clip values below PUPE_FLOOR up to it; returns (values, n_clipped)."""
    clipped = 0
    out = []
    for p in pupes:
        if p < PUPE_FLOOR:
            out.append(PUPE_FLOOR)
            clipped += 1
        else:
            out.append(p)
    return out, clipped
