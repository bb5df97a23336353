"""Command line runner: ``nonlocalqm <subcommand> --config <path>``.

Exit status is 0 when the run completes (pass/fail flags live in the
summary), 2 for configuration errors and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import Config, ConfigError
from .experiments import RUNNERS, NumericalFailure, run_sweep
from .report import write_result

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SUBCOMMANDS = tuple(RUNNERS) + ("sweep",)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nonlocalqm", description="Run a configured numerical experiment.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="subcommand")
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="YAML experiment file")
        sp.add_argument("--outdir", default="results", help="root directory for result files")
        sp.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        sp.add_argument("--no-timestamp", action="store_true", help="write directly under <outdir>/<experiment>")
    return ap


def run(command: str, cfg: Config, seed: int):
    if command == "sweep":
        return run_sweep(cfg, lambda: np.random.default_rng(seed))
    return RUNNERS[command](cfg, np.random.default_rng(seed))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = Config.load(args.config)
        experiment = cfg.value("experiment", str)
        seed = args.seed if args.seed is not None else cfg.value("seed", int, 0)
        if not 0 <= seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer", cfg.source, cfg.line(("seed",)), "seed")
        started = time.perf_counter()
        result = run(args.command, cfg, seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure in {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    elapsed = time.perf_counter() - started
    out = Path(args.outdir) / experiment
    if not args.no_timestamp:
        out = out / _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%SZ")
    summary = {
        "experiment": experiment,
        "subcommand": args.command,
        "seed": seed,
        "version": __version__,
        "inputs": cfg.data,
        "metrics": result.metrics,
        "checks": [c.as_dict() for c in result.checks],
        "passed": result.passed,
    }
    write_result(out, summary, result.tables)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {args.command} {experiment}: {out} ({elapsed:.1f} s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
