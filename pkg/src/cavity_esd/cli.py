"""Command-line front end: ``esd run``, ``esd figure`` and ``esd check``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .figures import FIGURE_IDS, UnknownFigureError
from .sweep import (
    ConfigError,
    config_from_mapping,
    load_config,
    records_to_csv,
    reproduce_figure,
    run_scenario,
)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2

log = logging.getLogger("cavity_esd")


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", help="Phi or Psi")
    p.add_argument("--beta-sq", help="comma list or start:stop:step")
    p.add_argument("--omega0", help="atomic frequency in units of g")
    p.add_argument("--delta", help="detuning omega0 - omega in units of g")
    p.add_argument("--engine", help="one of tcl_algebraic, tcl_riccati, tcl_direct, rabi, jc_rwa")
    p.add_argument("--compare", help="second engine for a cross-check run")
    p.add_argument("--gt-max", help="last gt sample")
    p.add_argument("--gt-step", help="gt spacing")
    p.add_argument("--n-cut", help="Fock truncation for the rabi engine")
    p.add_argument("--zero-threshold", help="concurrence regarded as zero")
    p.add_argument("--revival-threshold", help="minimum peak counted as a revival")
    p.add_argument("--out", help="CSV output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esd", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="config-driven concurrence sweep")
    run.add_argument("config", nargs="?", help="key=value scenario file")
    _add_scenario_flags(run)

    fig = sub.add_parser("figure", help="reproduce one figure dataset")
    fig.add_argument("id", help=f"one of {', '.join(FIGURE_IDS)}")
    fig.add_argument("--out", help="CSV output path (metadata goes to OUT.meta.json)")
    fig.add_argument("--n-beta", type=int, default=50)
    fig.add_argument("--n-gt", type=int, default=500)

    sub.add_parser("check", help="run the oracle cross-validation suite")
    return parser


_SCENARIO_KEYS = (
    "state", "beta_sq", "omega0", "delta", "engine", "compare", "gt_max", "gt_step",
    "n_cut", "zero_threshold", "revival_threshold", "out",
)


def _print_summary(summary: dict, stream) -> None:
    stream.write(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        if args.command == "run":
            overrides = {k: getattr(args, k) for k in _SCENARIO_KEYS}
            config = load_config(args.config, overrides) if args.config else config_from_mapping(overrides)
            result = run_scenario(config)
        elif args.command == "figure":
            result = reproduce_figure(args.id, args.out, n_beta=args.n_beta, n_gt=args.n_gt)
        else:
            from .checks import run_checks

            results = run_checks()
            failed = sum(not r.passed for r in results)
            print(f"{len(results) - failed}/{len(results)} checks passed")
            return EXIT_OK if failed == 0 else EXIT_NUMERIC
    except (ConfigError, UnknownFigureError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    summary = result.summary
    wrote_file = config.out if args.command == "run" else args.out
    if wrote_file:
        _print_summary(summary, sys.stdout)
    else:
        # no output path: dataset on stdout, summary on stderr
        sys.stdout.write(records_to_csv(result.records))
        _print_summary(summary, sys.stderr)
    return EXIT_NUMERIC if summary["errors"] else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
