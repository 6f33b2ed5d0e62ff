"""Command line interface: ``zurn <command> [options]``.

Every config key can be set by a flag; precedence is
config file < ZURN_SEED environment variable < flags.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, build_config, parse_labels
from .harness import COMMANDS, EXIT_CONFIG
from .urn import UrnOverflowError


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", metavar="PATH", help="key=value config file")
    p.add_argument("--preset", choices=["fig1", "fig2a", "fig2b", "d2"], help="named experiment preset")
    p.add_argument("--seed", type=int, metavar="S")
    p.add_argument("--realizations", type=int, metavar="M")
    p.add_argument("--additions", type=int, metavar="N")
    p.add_argument("--out", dest="output_dir", metavar="DIR")
    p.add_argument("--initial", dest="initial_labels", metavar="LABELS",
                   help="e.g. '-1 1' or '1 0; 0 1'")
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--checkpoints", metavar="N1 N2 ...",
                   help="whitespace-separated ball counts")
    p.add_argument("--workers", type=int, metavar="W")
    p.add_argument("--bigint", action="store_true", default=None,
                   help="arbitrary-precision labels instead of checked int64")
    p.add_argument("--pool-size", dest="pool_size", type=int)
    p.add_argument("--trials", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zurn",
        description="Simulation and verification lab for the integer addition urn.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "run realizations and dump labels, scaled-mean trace, summary"),
        ("a-distribution", "empirical distribution of the scaled-mean limit"),
        ("moments-check", "Monte Carlo moments vs the exact recursion"),
        ("limit-check", "quenched exponential and pooled gamma limit laws"),
        ("fixed-point", "distributional fixed-point battery"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common_flags(p)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    overrides = {
        key: getattr(args, key)
        for key in (
            "seed", "realizations", "additions", "output_dir", "d", "k",
            "workers", "bigint", "pool_size", "trials",
        )
        if getattr(args, key) is not None
    }
    if args.initial_labels is not None:
        overrides["initial_labels"] = parse_labels(args.initial_labels)
    if args.checkpoints is not None:
        overrides["checkpoints"] = [int(tok) for tok in args.checkpoints.replace(",", " ").split()]
    overrides["mode"] = args.command
    try:
        cfg = build_config(config_path=args.config, preset=args.preset, overrides=overrides)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UrnOverflowError as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
