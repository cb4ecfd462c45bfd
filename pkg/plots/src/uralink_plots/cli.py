"""Console entry points: ``plot-min-ebn0`` and ``plot-pupe-ebn0``."""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Optional, Sequence

from . import curves, render
from .io import SchemaError


def _build_parser(prog: str, description: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog=prog, description=description)
    ap.add_argument("--in", dest="inputs", nargs="+", required=True,
                    metavar="CSV", help="sweep CSV files, one series each")
    ap.add_argument("--labels", nargs="+",
                    help="series labels (default: file stems)")
    ap.add_argument("--out", required=True, help="output PNG path")
    ap.add_argument("--target", type=float, default=0.05,
                    help="per-user error target (default 0.05)")
    ap.add_argument("--xlim", nargs=2, type=float, metavar=("LO", "HI"))
    ap.add_argument("--ylim", nargs=2, type=float, metavar=("LO", "HI"))
    ap.add_argument("--overlay", metavar="CSV",
                    help="external reference points (columns ka,min_ebn0_db)")
    ap.add_argument("--overlay-label", default="reference",
                    help="label for the overlay series")
    ap.add_argument("--dpi", type=int, default=150)
    return ap


def _spec_from_args(args: argparse.Namespace) -> curves.CurveSpec:
    labels = args.labels or curves.labels_from_paths(args.inputs)
    return curves.CurveSpec(
        inputs=tuple(args.inputs), labels=tuple(labels), out_path=args.out,
        target=args.target,
        xlim=tuple(args.xlim) if args.xlim else None,
        ylim=tuple(args.ylim) if args.ylim else None,
        overlay=args.overlay, overlay_label=args.overlay_label,
        dpi=args.dpi)


def _run(renderer: Callable[[curves.CurveSpec], dict], prog: str,
         description: str, argv: Optional[Sequence[str]]) -> int:
    args = _build_parser(prog, description).parse_args(argv)
    try:
        spec = _spec_from_args(args)
        renderer(spec)
    except (SchemaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


def main_min_ebn0(argv: Optional[Sequence[str]] = None) -> int:
    return _run(render.plot_min_ebn0_vs_ka, "plot-min-ebn0",
                "Render minimum required Eb/N0 versus active-user count "
                "from sweep CSV files.", argv)


def main_pupe_ebn0(argv: Optional[Sequence[str]] = None) -> int:
    return _run(render.plot_pupe_vs_ebn0, "plot-pupe-ebn0",
                "Render per-user error rate versus Eb/N0 (log scale) "
                "from sweep CSV files.", argv)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main_pupe_ebn0())
