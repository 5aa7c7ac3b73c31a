#!/usr/bin/env python3
"""Run the full desk-scale evaluation protocol on a synthetic instance.

Generates the reference instance (200 customers, 500 items, 20 providers),
then produces:
  * an offline k-sweep over all four algorithms, for both fairness modes;
  * an online replay of a 10x-customers request stream, both modes.

Outputs land under --out as instance files plus one run directory per
(mode, fairness) combination, each holding trace.csv / summary.json /
per-algorithm recommendations. Everything is seeded; rerunning with the
same arguments reproduces the files byte for byte.
"""

import argparse
import sys
from pathlib import Path

from tfrom.cli import main as tfrom_cli


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="out", help="output directory (default: ./out)")
    parser.add_argument("--m", type=int, default=200)
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--l", type=int, default=20)
    parser.add_argument("--provider-size-skew", type=float, default=64.0)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--k-sweep", default="5,10,15,20")
    parser.add_argument("--online-k", default="10")
    parser.add_argument("--stream-multiplier", default="10")
    args = parser.parse_args()

    out = Path(args.out)
    instance = out / "instance"
    code = tfrom_cli(
        [
            "gen",
            "--m", str(args.m),
            "--n", str(args.n),
            "--l", str(args.l),
            "--provider-size-skew", str(args.provider_size_skew),
            "--seed", str(args.seed),
            "--out", str(instance),
        ]
    )
    if code != 0:
        return code

    common = [
        "--preferences", str(instance / "preferences.csv"),
        "--providers", str(instance / "providers.csv"),
        "--seed", str(args.seed),
    ]
    for fairness in ("uniform", "quality-weighted"):
        code = tfrom_cli(
            [
                "offline",
                *common,
                "--fairness", fairness,
                "--k", args.k_sweep,
                "--out", str(out / f"offline_{fairness}"),
            ]
        )
        if code != 0:
            return code
        code = tfrom_cli(
            [
                "online",
                *common,
                "--fairness", fairness,
                "--k", args.online_k,
                "--stream-multiplier", args.stream_multiplier,
                "--out", str(out / f"online_{fairness}"),
            ]
        )
        if code != 0:
            return code
    print(f"all runs complete under {out}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
