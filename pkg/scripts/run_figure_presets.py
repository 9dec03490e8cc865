#!/usr/bin/env python3
"""Regenerate every bundled figure preset as plot-ready CSV files.

Each preset lands in its own subdirectory of --out; multi-variant presets
(figures 2-4 carry an implicit and a Crank-Nicolson variant) get one nested
directory per variant.  Feed the CSVs to any plotting tool:

    x,u,phi columns; u is the transformed field, phi the physical one.
"""

import argparse
import sys

from siwave import cli
from siwave.presets import PRESETS


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="figures", help="output directory")
    parser.add_argument(
        "--only", choices=sorted(PRESETS), help="run a single preset"
    )
    args = parser.parse_args()
    names = [args.only] if args.only else sorted(PRESETS)
    for name in names:
        print(f"== {name}: {PRESETS[name].description}")
        code = cli.main(["run", "--preset", name, "--out", f"{args.out}/{name}"])
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
