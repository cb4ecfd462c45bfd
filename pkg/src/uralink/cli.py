"""Command line front end.

Subcommands: ``run`` (one operating point), ``sweep`` (a grid of points),
``minimize`` (bisect the smallest Eb/N0 meeting the target), ``plan``
(print the power-division plan as JSON).  The scenario comes from
``--profile`` or ``--config file.json``, optionally adjusted with repeated
``--set key=value`` overrides.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import config as config_mod
from . import harness, kernels, power_division


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--profile", choices=config_mod.profile_names(),
                   help="built-in scenario name")
    p.add_argument("--config", metavar="PATH",
                   help="scenario JSON file (flat object, strict keys)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override one config field")


def _add_mc_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=100,
                   help="Monte Carlo trials per point")
    p.add_argument("--workers", type=int, default=1,
                   help="worker processes (results identical for any count)")
    p.add_argument("--out", metavar="DIR",
                   help="write results.csv and summary.json here")
    p.add_argument("--timing", action="store_true",
                   help="record measured wall time in the CSV runtime column")


def _build_config(args) -> config_mod.SystemConfig:
    if bool(args.profile) == bool(args.config):
        raise SystemExit("error: provide exactly one of --profile/--config")
    cfg = (config_mod.profile(args.profile) if args.profile
           else config_mod.load_config(args.config))
    if args.overrides:
        cfg = config_mod.apply_overrides(cfg, args.overrides)
    return cfg


def _parse_grid(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise SystemExit(f"error: grid range must be start:stop:step, "
                             f"got {spec!r}")
        start, stop, step = (float(x) for x in parts)
        if step <= 0 or stop < start:
            raise SystemExit(f"error: bad grid range {spec!r}")
        grid = []
        value = start
        while value <= stop + 1e-9:
            grid.append(round(value, 9))
            value += step
        return grid
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise SystemExit(f"error: cannot parse grid {spec!r}") from None


def _emit(result: harness.SweepResult, config, system, args) -> None:
    for p in result.points:
        print(f"eb_n0={p.eb_n0_db:g} dB  trials={p.trials}  "
              f"pupe={p.pupe:.6g} +-{p.ci_halfwidth:.3g}  "
              f"missed={p.missed_total}/{p.trials * p.users_per_trial}")
    if result.min_ebn0_db is not None:
        print(f"min eb_n0 meeting pupe<={result.target_pupe:g}: "
              f"{result.min_ebn0_db:g} dB")
    elif result.no_crossing:
        print(f"target pupe<={result.target_pupe:g} not met on this range")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        csv_path = os.path.join(args.out, "results.csv")
        harness.write_points_csv(csv_path, result.points, config, system.plan,
                                 timing=args.timing)
        harness.write_summary_json(os.path.join(args.out, "summary.json"),
                                   result, config, system.plan, args.workers)
        print(f"wrote {csv_path}")


def cmd_run(args) -> int:
    cfg = _build_config(args)
    system = harness.build_system(cfg)
    point = harness.estimate_pupe(cfg, args.ebn0, args.trials, system=system,
                                  workers=args.workers)
    result = harness.SweepResult(points=[point], target_pupe=cfg.target_pupe,
                                 min_ebn0_db=(point.eb_n0_db
                                              if point.pupe <= cfg.target_pupe
                                              else None),
                                 no_crossing=point.pupe > cfg.target_pupe)
    _emit(result, cfg, system, args)
    return 0


def cmd_sweep(args) -> int:
    cfg = _build_config(args)
    system = harness.build_system(cfg)
    result = harness.sweep(cfg, _parse_grid(args.grid), args.trials,
                           system=system, workers=args.workers)
    _emit(result, cfg, system, args)
    return 0


def cmd_minimize(args) -> int:
    cfg = _build_config(args)
    system = harness.build_system(cfg)
    result = harness.find_min_ebn0(cfg, args.bracket[0], args.bracket[1],
                                   args.trials, tol_db=args.tol_db,
                                   system=system, workers=args.workers)
    _emit(result, cfg, system, args)
    return 0


def cmd_plan(args) -> int:
    cfg = _build_config(args)
    plan = power_division.plan_for_config(cfg, m_max=args.m_max)
    text = json.dumps(plan.to_json_dict(), indent=2)
    print(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "plan.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uralink",
        description="Sparse-pattern unsourced random access link simulator")
    parser.add_argument("--backend", choices=["numba", "numpy"],
                        help="informational: prints the active kernel backend")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="estimate pupe at one Eb/N0")
    _add_config_args(p_run)
    _add_mc_args(p_run)
    p_run.add_argument("--ebn0", type=float, required=True,
                       help="operating point in dB")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="estimate pupe on an Eb/N0 grid")
    _add_config_args(p_sweep)
    _add_mc_args(p_sweep)
    p_sweep.add_argument("--grid", required=True,
                         help="comma list '4,6,8' or range 'start:stop:step'")
    p_sweep.set_defaults(func=cmd_sweep)

    p_min = sub.add_parser("minimize",
                           help="bisect the smallest Eb/N0 meeting the target")
    _add_config_args(p_min)
    _add_mc_args(p_min)
    p_min.add_argument("--bracket", type=float, nargs=2, required=True,
                       metavar=("LO_DB", "HI_DB"))
    p_min.add_argument("--tol-db", type=float, default=0.1)
    p_min.set_defaults(func=cmd_minimize)

    p_plan = sub.add_parser("plan", help="print the power-division plan")
    _add_config_args(p_plan)
    p_plan.add_argument("--m-max", type=int, default=16)
    p_plan.add_argument("--out", metavar="DIR")
    p_plan.set_defaults(func=cmd_plan)

    args = parser.parse_args(argv)
    if args.backend and args.backend != kernels.BACKEND:
        print(f"note: active kernel backend is {kernels.BACKEND} "
              f"(set URALINK_NO_NUMBA=1 to force numpy)", file=sys.stderr)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
