#!/usr/bin/env python3
"""Emit the chamber-fan SVG diagrams for a range of wall depths.

Usage: python scripts/draw_chamber_fan.py [--max-range 4] [--out figures/]
"""

import argparse
import pathlib

from sixnodal.cli import cone_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-range", type=int, default=4)
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for k in range(1, args.max_range + 1):
        path = outdir / f"chambers_k{k}.svg"
        path.write_text(cone_svg(k))
        print(f"wrote {path} ({2 * k} chambers)")


if __name__ == "__main__":
    main()
