"""Figure rendering.  Deterministic: same inputs -> byte-identical PNG."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import curves, io  # noqa: E402

# Fixed, version-independent PNG metadata keeps output byte-reproducible.
_METADATA = {"Software": "uralink-plots"}


def _new_axes(spec: curves.CurveSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=spec.dpi)
    ax.grid(True, which="both", alpha=0.35)
    return fig, ax


def _finish(fig, ax, spec: curves.CurveSpec) -> None:
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(spec.out_path, format="png", metadata=_METADATA)
    plt.close(fig)


def _draw_overlay(ax, spec: curves.CurveSpec) -> None:
    if spec.overlay is None:
        return
    pts = io.read_overlay_csv(spec.overlay)
    ax.plot([p[0] for p in pts], [p[1] for p in pts], linestyle="--",
            marker="s", markerfacecolor="none", color="0.3",
            label=f"{spec.overlay_label} (external)")


def plot_min_ebn0_vs_ka(spec: curves.CurveSpec) -> dict:
    """Minimum required Eb/N0 (dB) against the number of active users."""
    fig, ax = _new_axes(spec)
    info = {"series": []}
    for path, label in zip(spec.inputs, spec.labels):
        rows = io.read_sweep_csv(path)
        series = curves.min_ebn0_series(rows, spec.target)
        ax.plot([ka for ka, _ in series], [db for _, db in series],
                marker="o", label=label)
        info["series"].append({"label": label, "points": series})
    _draw_overlay(ax, spec)
    ax.set_xlabel("active users $K_a$")
    ax.set_ylabel(f"min $E_b/N_0$ for error $\\leq$ {spec.target:g} (dB)")
    _finish(fig, ax, spec)
    return info


def plot_pupe_vs_ebn0(spec: curves.CurveSpec) -> dict:
    """Per-user error rate against Eb/N0, log-scale y, target rule drawn."""
    fig, ax = _new_axes(spec)
    info = {"series": [], "clipped_points": 0}
    for path, label in zip(spec.inputs, spec.labels):
        rows = sorted(io.read_sweep_csv(path), key=lambda r: r.eb_n0_db)
        pupes, clipped = curves.clip_for_log_axis([r.pupe for r in rows])
        ax.semilogy([r.eb_n0_db for r in rows], pupes, marker="o",
                    label=label)
        info["series"].append({"label": label, "n_points": len(rows)})
        info["clipped_points"] += clipped
    ax.axhline(spec.target, color="black", linestyle=":", linewidth=1.2,
               label=f"target {spec.target:g}")
    if info["clipped_points"]:
        ax.annotate(f"zero-error points drawn at {curves.PUPE_FLOOR:g}",
                    xy=(0.02, 0.03), xycoords="axes fraction", fontsize=8,
                    color="0.25")
    ax.set_ylim(bottom=curves.PUPE_FLOOR)
    ax.set_xlabel("$E_b/N_0$ (dB)")
    ax.set_ylabel("per-user error rate")
    _finish(fig, ax, spec)
    return info
