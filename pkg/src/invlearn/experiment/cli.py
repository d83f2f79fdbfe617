"""Command line front end: ``invlearn {run,nash,analyze,plot}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..equilibrium import nash_solve
from .batch import analyze_run, plot_run, run_experiment_batch
from .config import ConfigError, parse_config


def _add_common(p, config=True):
    if config:
        p.add_argument("--config", default="example1",
                       help="config file (INI or JSON) or shipped config name (default: example1)")
        p.add_argument("--seed", type=int, action="append", help="seed to run; repeatable, overrides the config")
        p.add_argument("--stages", type=int, help="number of stages, overrides the config")
    p.add_argument("--out", help="output directory, overrides the config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invlearn", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a batch of seeds and write CSV, SVG and summary files")
    _add_common(p)
    p.add_argument("--jobs", type=int, help="worker processes")

    p = sub.add_parser("nash", help="print the Nash equilibrium of a config")
    _add_common(p)
    p.add_argument("--json", action="store_true", help="print JSON instead of text")

    p = sub.add_parser("analyze", help="contraction, forbidden-region and likelihood report for stored runs")
    _add_common(p, config=False)
    p.add_argument("--no-profile", action="store_true", help="skip the log-likelihood profiles")

    p = sub.add_parser("plot", help="redraw SVG plots from stored runs")
    _add_common(p, config=False)
    p.add_argument("--kind", choices=("actions", "beliefs"), action="append")
    return parser


def _load(args):
    cfg = parse_config(args.config).with_overrides(seeds=args.seed, stages=args.stages, output=args.out)
    if getattr(args, "jobs", None):
        from dataclasses import replace
        cfg = replace(cfg, jobs=max(1, args.jobs))
    return cfg


def _need_out(args):
    if not args.out:
        raise ConfigError("--out", "the directory of a stored run is required")
    return args.out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "nash":
            y1, y2 = nash_solve(_load(args).game_params())
            if args.json:
                print(json.dumps({"y1": y1, "y2": y2}))
            else:
                print(f"y1* = {y1:.4f}\ny2* = {y2:.4f}")
        elif args.command == "run":
            summary = run_experiment_batch(_load(args))
            done = len(summary.rows) - len(summary.failures)
            print(f"{done}/{len(summary.rows)} seeds ok; nash = ({summary.nash[0]:.4f}, {summary.nash[1]:.4f}); "
                  f"outputs in {summary.output}")
            if summary.failures:
                _fail("SeedFailure", json.dumps({str(k): v for k, v in summary.failures.items()}))
                return 1
        elif args.command == "analyze":
            report = analyze_run(_need_out(args), with_profile=not args.no_profile)
            c = report["contraction"]
            print(f"nash = {report['nash']}")
            print(f"contraction depth {c['depth']}: gap {c['final_gap']:.4f}, nested={c['nested']}, "
                  f"b1={c['final_b1']}, b2={c['final_b2']}")
            print(f"forbidden regions: {json.dumps(report['forbidden_region'])}")
            for seed, r in report["runs"].items():
                extra = ""
                if "profile1_argmax" in r:
                    extra = f" profile argmax=({r['profile1_argmax']:.3f}, {r['profile2_argmax']:.3f})"
                print(f"seed {seed}: tail y=({r['y1_tail']:.3f}, {r['y2_tail']:.3f}) "
                      f"map=({r['map1_tail']:.3f}, {r['map2_tail']:.3f}) "
                      f"U hits=({r['y2_in_u1']}, {r['y1_in_u2']}){extra}")
        elif args.command == "plot":
            for path in plot_run(_need_out(args), tuple(args.kind or ("actions", "beliefs"))):
                print(path)
    except ConfigError as e:
        _fail("ConfigError", e.message, e.path)
        return 2
    except (OSError, ValueError, RuntimeError) as e:
        _fail(type(e).__name__, str(e))
        return 1
    return 0


def _fail(kind, message, path=None):
    payload = {"error": kind, "message": message}
    if path is not None:
        payload["path"] = path
    print(json.dumps(payload), file=sys.stderr)
