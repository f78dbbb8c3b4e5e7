"""Command-line interface: ``eulerblow {check,simulate,trace,sweep}``.

Exit codes: 0 ran to the horizon (or all hypotheses pass), 10 blow-up
detected, 20 run aborted, 1 configuration or usage error (or a failed
hypothesis check).
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import yaml

from . import pipeline
from .config import ConfigError, load_config, set_dotted
from .reports import write_csv, write_json

__all__ = ["main", "build_parser", "sweep"]

EXIT_USAGE = 1
SWEEP_COLUMNS = ("value", "N", "inf_y0", "predicted_T_bound", "detected_T", "status")


def build_parser():
    p = argparse.ArgumentParser(prog="eulerblow", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True, metavar="PATH")
        sp.add_argument("--out", metavar="DIR", help="output directory (default: config output.directory)")

    common(sub.add_parser("check", help="certify the hypotheses on the configured box"))
    common(sub.add_parser("simulate", help="run the solver, monitors and blow-up analysis"))
    tr = sub.add_parser("trace", help="trace characteristics through a stored run")
    common(tr)
    tr.add_argument("--seed-x", type=float, action="append", default=None, dest="seed_x")
    tr.add_argument("--direction", choices=("forward", "backward"), default="forward")
    sw = sub.add_parser("sweep", help="repeat simulate over one config value")
    common(sw)
    sw.add_argument("--axis", required=True, metavar="KEY", help="dotted config key")
    sw.add_argument("--values", required=True, metavar="CSV", help="comma-separated values")
    sw.add_argument("--workers", type=int, default=1)
    return p


def _parse_values(text):
    vals = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        vals.append(yaml.safe_load(tok))
    if not vals:
        raise ConfigError("empty value list", "--values")
    return vals


def _sweep_one(args):
    cfg, axis, value, out_dir = args
    c = set_dotted(cfg, axis, value)
    res = pipeline.simulate(c, out_dir)
    r = res.report
    return [value, r.N, r.inf_y0, r.predicted_T_bound, r.detected_T, r.status]


def sweep(cfg, axis, values, out_dir, workers=1):
    """Simulate once per value of ``axis``; returns the aggregated rows.

    Each run writes to its own subdirectory, so runs share no files.
    """
    if not values:
        raise ConfigError("empty value list", "--values")
    for v in values:
        set_dotted(cfg, axis, v)  # validate every value before launching
    jobs = [(cfg, axis, v, os.path.join(out_dir, f"run_{i:03d}")) for i, v in enumerate(values)]
    if workers <= 1:
        rows = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    os.makedirs(out_dir, exist_ok=True)
    write_csv(os.path.join(out_dir, "sweep.csv"), SWEEP_COLUMNS, rows)
    return rows


def _cmd_check(cfg, out):
    reports = pipeline.run_check(cfg)
    for rep in reports:
        for cond in rep.conditions:
            print(f"{cond.id:6s} {'PASS' if cond.passed else 'FAIL'}  {cond.status}  margin={cond.margin:.6g}")
    ok = all(r.passed for r in reports)
    if out:
        os.makedirs(out, exist_ok=True)
        write_json(os.path.join(out, "hypotheses.json"), {"passed": ok, "reports": [r.to_dict() for r in reports]})
    failed = [r.hypothesis for r in reports if not r.passed]
    print("all hypotheses pass" if ok else f"failed: {', '.join(failed)}")
    return 0 if ok else EXIT_USAGE


def _cmd_simulate(cfg, out):
    res = pipeline.simulate(cfg, out)
    r = res.report
    print(f"status={r.status} N={r.N:.6g} inf_y0={r.inf_y0:.6g} inf_q0={r.inf_q0:.6g} "
          f"criterion={r.criterion} predicted_T_bound={r.predicted_T_bound} detected_T={r.detected_T}")
    if res.trajectory.abort:
        print(f"aborted: {res.trajectory.abort['reason']} at t={res.trajectory.abort['t']}")
    if res.monitors.violations:
        print(f"MONITOR VIOLATIONS: {', '.join(res.monitors.violations)}")
    print(f"wrote {out}")
    return res.exit_code


def _cmd_trace(cfg, out, seeds, direction):
    seeds = seeds if seeds else cfg.seeds_x
    for fname, path in pipeline.trace_run(out, seeds, direction):
        print(f"{fname}: {path.status}, t_blowup={path.t_blowup:.6g}")
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        out = args.out or cfg.output.get("directory", "run")
        if args.command == "check":
            return _cmd_check(cfg, args.out)
        if args.command == "simulate":
            return _cmd_simulate(cfg, out)
        if args.command == "trace":
            return _cmd_trace(cfg, out, args.seed_x, args.direction)
        rows = sweep(cfg, args.axis, _parse_values(args.values), out, args.workers)
        for row in rows:
            print(",".join("" if v is None else str(v) for v in row))
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
