"""Command-line entry point: ``emberflow run | validate-front | presets | diff-series``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import EmberflowError
from .io import export_series, read_series_csv, write_front_csv
from .scenario import PRESETS, build_scenario, dumps, parse_document, preset_document
from .solver import front_velocity_errors, run

log = logging.getLogger("emberflow")


def _load(args):
    if args.preset and args.scenario:
        raise EmberflowError("give either a scenario file or --preset, not both")
    if args.preset:
        doc, base = preset_document(args.preset), Path(".")
    elif args.scenario:
        path = Path(args.scenario)
        try:
            text = path.read_text()
        except OSError as exc:
            raise EmberflowError(f"cannot read scenario {path}: {exc}") from exc
        doc, base = parse_document(text), path.parent
    else:
        raise EmberflowError("a scenario file or --preset is required")
    scenario, config = build_scenario(doc, base)
    config = replace(config, threads=args.threads)
    if getattr(args, "fixed_dt", None):
        config = replace(config, fixed_dt=args.fixed_dt)
    return scenario, config


def cmd_run(args) -> int:
    scenario, config = _load(args)
    t0 = time.perf_counter()
    snaps = run(scenario, config)
    elapsed = time.perf_counter() - t0
    series = export_series(snaps, scenario.grid, args.out)
    last = snaps[-1]
    print(f"{len(snaps)} snapshots, {last.steps} steps in {elapsed:.2f} s; "
          f"final burned area {last.burned_area:.6g}; wrote {series}")
    return 0


def cmd_validate_front(args) -> int:
    scenario, config = _load(args)
    snaps = run(scenario, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for k, s in enumerate(snaps):
        write_front_csv(out / f"front_{k}.csv", s.samples)
    errs = front_velocity_errors(snaps)
    if errs.size == 0:
        print("no front samples with both predicted and observed velocity", file=sys.stderr)
        return 1
    degenerate = sum(s.samples.n_degenerate for s in snaps)
    print(f"samples: {errs.size} (degenerate skipped: {degenerate})")
    print(f"median relative error: {np.median(errs):.6g}")
    print(f"p90 relative error: {np.percentile(errs, 90):.6g}")
    return 0


def cmd_presets(args) -> int:
    if args.show:
        sys.stdout.write(dumps(preset_document(args.show)))
    else:
        for name in PRESETS:
            print(name)
    return 0


def max_relative_area_deviation(a: dict, b: dict, floor: float = 1e-12) -> float:
    if len(a["t"]) != len(b["t"]) or not np.allclose(a["t"], b["t"], rtol=1e-12, atol=0):
        raise EmberflowError("series have different snapshot times")
    x, y = a["burned_area"], b["burned_area"]
    if x.size == 0:
        return 0.0
    return float(np.max(np.abs(x - y) / np.maximum(np.maximum(np.abs(x), np.abs(y)), floor)))


def cmd_diff_series(args) -> int:
    dev = max_relative_area_deviation(read_series_csv(args.a), read_series_csv(args.b))
    print(f"max relative area deviation: {dev:.6g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emberflow", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp):
        sp.add_argument("scenario", nargs="?", help="scenario document (TOML)")
        sp.add_argument("--preset", choices=list(PRESETS))
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--threads", type=int, default=1)

    r = sub.add_parser("run", help="integrate a scenario and export snapshots")
    scenario_args(r)
    r.add_argument("--fixed-dt", type=float, default=None)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate-front", help="compare predicted and observed front speeds")
    scenario_args(v)
    v.add_argument("--fixed-dt", type=float, default=None)
    v.set_defaults(func=cmd_validate_front)

    pr = sub.add_parser("presets", help="list presets or print one as a document")
    pr.add_argument("--show", choices=list(PRESETS))
    pr.set_defaults(func=cmd_presets)

    d = sub.add_parser("diff-series", help="max relative burned-area deviation of two series.csv files")
    d.add_argument("a")
    d.add_argument("b")
    d.set_defaults(func=cmd_diff_series)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except EmberflowError as exc:
        print(f"emberflow: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
