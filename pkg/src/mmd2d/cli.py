"""Command-line entry point.

Exit codes: 0 success, 2 configuration (or oracle budget) error,
3 log-linear learning did not converge within its iteration budget.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .config import ConfigError, ExperimentConfig, load, parse_strategy, parse_value, preset_names, with_overrides
from .game import OracleBudgetError
from . import harness

log = logging.getLogger("mmd2d")

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", help="TOML config file or bundled preset name")
    p.add_argument("--seed", type=int, help="base seed (overrides run.seed)")
    p.add_argument("--trials", type=int, help="number of trials (overrides run.n_trials)")
    p.add_argument("--workers", type=int, help="worker processes (overrides run.workers)")
    p.add_argument("--out", default="results", help="output directory (default: %(default)s)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override one config value; repeatable")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mmd2d", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment")
    _common(p)
    p = sub.add_parser("sweep", help="run one experiment per value of a parameter")
    _common(p)
    p.add_argument("--param", required=True, help="parameter path, e.g. channel.blockage_beta")
    p.add_argument("--values", required=True, help="comma-separated values")
    p = sub.add_parser("compare", help="cross association algorithms with beamwidth strategies")
    _common(p)
    p.add_argument("--assoc", default="hpa,daa,mda,rpa")
    p.add_argument("--beam", default="lll,cbws:15,rbws")
    p = sub.add_parser("oracle-check", help="log-linear learning vs exhaustive search on small games")
    _common(p)
    p = sub.add_parser("validate", help="load and validate a config, print its digest")
    p.add_argument("config")
    sub.add_parser("presets", help="list bundled presets")
    return ap


def _configure(args) -> ExperimentConfig:
    cfg = load(args.config)
    over = {}
    for item in getattr(args, "set", []):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        over[key.strip()] = parse_value(value.strip())
    if getattr(args, "seed", None) is not None:
        over["run.seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        over["run.n_trials"] = args.trials
    if getattr(args, "workers", None) is not None:
        over["run.workers"] = args.workers
    return with_overrides(cfg, over) if over else cfg


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    command = " ".join(["mmd2d"] + list(sys.argv[1:] if argv is None else argv))
    try:
        if args.command == "presets":
            print("\n".join(preset_names()))
            return EXIT_OK
        cfg = _configure(args)
        if args.command == "validate":
            print(f"ok {cfg.digest()}")
            return EXIT_OK
        if args.command == "oracle-check":
            rows, traces = harness.oracle_check(cfg, trace=True)
            harness.write_oracle(rows, traces, args.out, args.format, cfg, command)
            ok = sum(r.optimal for r in rows)
            print(f"optimal {ok}/{len(rows)}; nash {sum(r.nash for r in rows)}/{len(rows)}; "
                  f"worst ratio {min((r.ratio for r in rows), default=1.0):.6f}")
            return EXIT_OK if all(r.converged for r in rows) else EXIT_NONCONVERGED
        if args.command == "run":
            exps = [harness.monte_carlo(cfg)]
        elif args.command == "sweep":
            values = [parse_value(v) for v in _split(args.values)]
            if not values:
                raise ConfigError("--values is empty")
            exps = harness.sweep(cfg, args.param, values)
        else:
            assoc, beams = _split(args.assoc), _split(args.beam)
            for b in beams:
                parse_strategy(b)
            exps = harness.compare(cfg, assoc, beams)
        out = harness.write_results(exps, args.out, args.format, command)
        for e in exps:
            s = e.summary
            print(f"{e.label}: d2d_bits {s['d2d_bits']['summary'].mean:.6g} "
                  f"(se {s['d2d_bits']['summary'].stderr:.3g}), "
                  f"mean_throughput {s['mean_throughput']['summary'].mean:.6g}")
        log.info("wrote %s", out)
        if not all(e.converged for e in exps):
            print("warning: log-linear learning hit its iteration budget", file=sys.stderr)
            return EXIT_NONCONVERGED
        return EXIT_OK
    except (ConfigError, OracleBudgetError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
