"""Command line entry point ``levyest``.

Exit status: 0 on success, 1 on usage or configuration errors, 2 when a
computation fails.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from ..errors import InputError, LevyEstError
from ..sim import SeedSpec, simulate_increments
from . import report as rep
from .config import load_config
from .experiment import estimate_sample, run_experiment
from .tables import DEFAULT_K, design_table, run_parameter_table

OUT_ENV = "LEVYEST_OUT"
log = logging.getLogger("levyest")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _default_out() -> str:
    return os.environ.get(OUT_ENV, "levyest_out")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="levyest", description="Levy density estimation from high-frequency increments.")
    verb = p.add_mutually_exclusive_group()
    verb.add_argument("-q", "--quiet", action="store_true", help="only report errors")
    verb.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="experiment config (TOML)")
        sp.add_argument("--seed", type=int, help="override the master seed of the config")
        sp.add_argument("--out", default=None, help=f"output directory (default: ${OUT_ENV} or ./levyest_out)")

    sp = sub.add_parser("simulate", help="simulate increments and write them as CSV")
    common(sp)
    sp.add_argument("--stream", type=int, default=0, help="replication stream id")

    sp = sub.add_parser("estimate", help="estimate from an increments CSV")
    common(sp)
    sp.add_argument("--increments", required=True)

    sp = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    common(sp)
    sp.add_argument("--K", type=int, help="override the replication count")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("table", help="reproduce a bundled table")
    sp.add_argument("--which", type=int, choices=(1, 2, 3), required=True)
    sp.add_argument("--K", type=int, default=DEFAULT_K)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default=None)
    return p


def _config(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if getattr(args, "K", None) is not None:
        cfg = replace(cfg, replications=args.K)
    return cfg


def _cmd_simulate(args, out: Path) -> list:
    cfg = _config(args)
    sample = simulate_increments(cfg.model, cfg.n, cfg.delta, SeedSpec(cfg.master_seed, args.stream))
    out.mkdir(parents=True, exist_ok=True)
    return [rep.write_increments(sample, out / "increments.csv")]


def _cmd_estimate(args, out: Path) -> list:
    cfg = _config(args)
    sample = rep.read_increments(args.increments)
    cfg = replace(cfg, n=sample.n, delta=sample.delta)
    return rep.emit_estimates(estimate_sample(sample, cfg), out)


def _cmd_experiment(args, out: Path) -> list:
    cfg = _config(args)
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    return rep.emit_report(run_experiment(cfg, args.threads), args.format, out)


def _cmd_table(args, out: Path) -> list:
    out.mkdir(parents=True, exist_ok=True)
    if args.which == 3:
        path = out / "table3.csv"
        rep.write_csv(path, ("n", "delta", "n_delta", "n_delta2", "n_delta_3_2", "n_delta_7_4"), design_table())
        return [path]
    if args.K < 1 or args.threads < 1:
        raise UsageError("--K and --threads must be at least 1")
    rows = run_parameter_table(args.which, args.K, args.seed, args.threads)
    path = out / f"table{args.which}.csv"
    rep.write_csv(path, ("model", "n", "delta", "quantity", "mean", "sd"), rows)
    return [path]


COMMANDS = {"simulate": _cmd_simulate, "estimate": _cmd_estimate,
            "experiment": _cmd_experiment, "table": _cmd_table}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    level = logging.ERROR if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out or _default_out())
    try:
        written = COMMANDS[args.command](args, out)
    except (UsageError, InputError) as exc:
        print(f"levyest: {exc}", file=sys.stderr)
        return 1
    except (LevyEstError, ArithmeticError, ValueError, RuntimeError, OSError) as exc:
        print(f"levyest: {exc}", file=sys.stderr)
        return 2
    for path in written:
        log.info("wrote %s", path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
