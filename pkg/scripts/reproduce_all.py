#!/usr/bin/env python3
"""Run the full reproduction suite for a sweep of seeds and collect reports.

Usage: python scripts/reproduce_all.py [--seeds 1 2 3] [--out reports/]
"""

import argparse
import json
import pathlib
import subprocess
import sys


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, nargs="+", default=[1])
    ap.add_argument("--out", default="reports")
    ap.add_argument("--precision", type=int, default=256)
    args = ap.parse_args()

    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for seed in args.seeds:
        cmd = [sys.executable, "-m", "sixnodal.cli", "reproduce", "--all",
               "--seed", str(seed), "--precision", str(args.precision),
               "--json"]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        path = outdir / f"reproduce_seed{seed}.json"
        path.write_text(proc.stdout)
        if proc.returncode == 0:
            report = json.loads(proc.stdout)
            n = len(report["checks"])
            print(f"seed {seed}: {n} checks pass -> {path}")
        else:
            failures += 1
            print(f"seed {seed}: FAILED (exit {proc.returncode}) -> {path}")
            if proc.stderr:
                print(proc.stderr, file=sys.stderr)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
