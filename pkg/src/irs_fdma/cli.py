"""Command-line entry point.

    irs-fdma simulate --config run.yaml --drops 1000 --seed 7 --out-dir results/
    irs-fdma config > run.yaml
"""

import argparse
import logging
import sys
import time

from . import __version__
from .channel import write_channel_dump
from .config import SystemConfig, dump_config, load_config, parse_config
from .errors import SimulationError
from .montecarlo import default_channel_source, emit_report, run_trials
from .numerics import RngStream

log = logging.getLogger("irs_fdma")


def _parser():
    p = argparse.ArgumentParser(prog="irs-fdma", description="IRS-aided FDMA/TDMA/NOMA sum-rate Monte-Carlo simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run drops and write CSV reports")
    sim.add_argument("--config", metavar="PATH", help="YAML configuration (defaults when omitted)")
    sim.add_argument("--drops", type=int, help="number of drops (overrides config)")
    sim.add_argument("--seed", type=int, help="base seed (overrides config)")
    sim.add_argument("--schemes", help="comma-separated scheme list, e.g. FDMA,FDMA-EUS (overrides config)")
    sim.add_argument("--users", type=int, help="number of users K (overrides config)")
    sim.add_argument("--out-dir", default=".", help="directory for the CSV files (default: .)")
    sim.add_argument("--workers", type=int, default=1, help="worker processes; 0 = all cores")
    sim.add_argument("--dump-channels", metavar="PATH", help="also write every drop's channels to PATH")
    sim.add_argument("-q", "--quiet", action="store_true")

    sub.add_parser("config", help="print the default configuration as YAML")
    return p


def _build_config(args):
    cfg = load_config(args.config) if args.config else parse_config("")
    overrides = {}
    if args.drops is not None:
        overrides["n_drops"] = args.drops
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.schemes is not None:
        overrides["schemes"] = tuple(s for s in args.schemes.split(",") if s.strip())
    if args.users is not None:
        overrides["n_users"] = args.users
    return cfg.replace(**overrides) if overrides else cfg


def _simulate(args):
    cfg = _build_config(args)
    t0 = time.perf_counter()
    report = run_trials(cfg, workers=args.workers)
    paths = emit_report(report, args.out_dir)
    if args.dump_channels:
        write_channel_dump(
            args.dump_channels,
            ((d, default_channel_source(cfg, d, RngStream(cfg.seed, d))) for d in report.drops),
            cfg.seed,
        )
        paths["channels"] = args.dump_channels
    if not args.quiet:
        print(f"{len(report.drops)}/{cfg.n_drops} drops, K={cfg.n_users}, seed={cfg.seed}, "
              f"{time.perf_counter() - t0:.1f} s")
        print(f"{'scheme':<10} {'p05':>9} {'p50':>9} {'mean':>9}")
        for s, row in report.summary().items():
            print(f"{s!s:<10} {row['p05']:9.3f} {row['p50']:9.3f} {row['mean']:9.3f}")
        for name, path in paths.items():
            print(f"wrote {name}: {path}")
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "config":
            sys.stdout.write(dump_config(SystemConfig()))
            return 0
        return _simulate(args)
    except (SimulationError, OSError) as exc:
        print(f"irs-fdma: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
