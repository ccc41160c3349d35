#!/usr/bin/env python3
"""Recheck the closed-form oscillation identities from the command line.

Thin wrapper over `wedgecap verify-examples`; exists so the standard checks
can be run (and their artifacts collected) without remembering CLI flags.

Usage:
    python3 scripts/verify_examples.py [--gamma1 G1 --gamma2 G2]
                                       [--eps-floor X] [--out DIR]
"""

import argparse
import sys

from wedgecap.cli import main as cli_main


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--gamma1", type=float, default=None)
    parser.add_argument("--gamma2", type=float, default=None)
    parser.add_argument("--eps-floor", type=float, default=1e-10)
    parser.add_argument("--out", default="out/verify")
    args = parser.parse_args(argv)

    cli_args = ["verify-examples", "--out", args.out,
                "--eps-floor", repr(args.eps_floor)]
    if args.gamma1 is not None:
        cli_args += ["--gamma1", repr(args.gamma1)]
    if args.gamma2 is not None:
        cli_args += ["--gamma2", repr(args.gamma2)]
    return cli_main(cli_args)


if __name__ == "__main__":
    sys.exit(main())
