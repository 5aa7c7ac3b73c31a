"""Command-line interface.

Subcommands:
  gen      write a synthetic instance (preferences.csv, providers.csv)
  offline  batch k-sweep over algorithms
  online   request-stream replay
  metrics  recompute metrics from a saved recommendations.csv

Exit codes: 0 success, 1 validation or usage error, 2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .errors import InputFormatError, ValidationError
from .experiments import (
    ALGORITHMS,
    ExperimentConfig,
    run_offline_sweep,
    run_online_stream,
)
from .metrics import (
    customer_fairness,
    exposure,
    ndcg,
    quality,
    quality_weighted_provider_fairness,
    total_quality,
    uniform_provider_fairness,
)
from .model import original_rankings
from .synth import SCORE_DISTRIBUTIONS, generate_synthetic
from .targets import FairnessMode


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; remap to 1 (validation)
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _comma_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise _UsageError(f"expected a comma-separated integer list, got {text!r}")


def _comma_names(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> _Parser:
    parser = _Parser(prog="tfrom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic instance")
    gen.add_argument("--m", type=int, required=True, help="number of customers")
    gen.add_argument("--n", type=int, required=True, help="number of items")
    gen.add_argument("--l", type=int, required=True, help="number of providers")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--score-distribution", choices=SCORE_DISTRIBUTIONS, default="uniform")
    gen.add_argument("--provider-size-skew", type=float, default=1.0)
    gen.add_argument("--out", required=True, help="output directory")

    def run_flags(cmd, online: bool):
        cmd.add_argument("--preferences", required=True, help="preference triplet CSV")
        cmd.add_argument("--providers", required=True, help="item-to-provider CSV")
        cmd.add_argument(
            "--fairness",
            choices=[mode.value for mode in FairnessMode],
            default=FairnessMode.UNIFORM.value,
        )
        cmd.add_argument(
            "--algorithms",
            default=",".join(ALGORITHMS),
            help=f"comma-separated subset of {','.join(ALGORITHMS)}",
        )
        cmd.add_argument("--k", required=True, help="comma-separated list lengths")
        cmd.add_argument("--seed", type=int, default=0)
        if online:
            cmd.add_argument("--stream-multiplier", type=int, default=10)
            cmd.add_argument("--trace-every", type=int, default=None)
        cmd.add_argument("--out", required=True, help="output directory")

    run_flags(sub.add_parser("offline", help="batch k-sweep"), online=False)
    run_flags(sub.add_parser("online", help="request-stream replay"), online=True)

    met = sub.add_parser("metrics", help="recompute metrics from saved lists")
    met.add_argument("--preferences", required=True)
    met.add_argument("--providers", required=True)
    met.add_argument("--recommendations", required=True, help="saved recommendations.csv")
    met.add_argument("--out", required=True, help="output directory")
    return parser


def _echo_config(args, config: ExperimentConfig | None = None) -> dict:
    echo = {key: value for key, value in vars(args).items() if key != "command"}
    echo["command"] = args.command
    if config is not None:
        echo["fairness"] = config.fairness.value
        echo["algorithms"] = list(config.algorithms)
        echo["k"] = list(config.ks)
    return echo


def _cmd_gen(args) -> int:
    scores, assignments = generate_synthetic(
        args.m,
        args.n,
        args.l,
        score_distribution=args.score_distribution,
        provider_size_skew=args.provider_size_skew,
        seed=args.seed,
    )
    preferences, providers = fileio.write_instance_files(scores, assignments, args.out)
    print(f"wrote {preferences} and {providers}")
    return 0


def _load(args):
    matrix, catalog, labels = fileio.load_instance(args.preferences, args.providers)
    return matrix, catalog, labels


def _cmd_offline(args) -> int:
    matrix, catalog, labels = _load(args)
    config = ExperimentConfig(
        mode="offline",
        fairness=FairnessMode(args.fairness),
        algorithms=_comma_names(args.algorithms),
        ks=_comma_ints(args.k),
        seed=args.seed,
    )
    result = run_offline_sweep(config, matrix, catalog)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for (algo, k), lists in result.lists.items():
        cell = out / f"{algo}_k{k}"
        cell.mkdir(parents=True, exist_ok=True)
        fileio.write_recommendations(
            cell / "recommendations.csv",
            [(None, rec) for rec in lists],
            matrix,
            catalog,
            labels,
        )
    fileio.write_trace(out / "trace.csv", result.trace)
    fileio.write_summary(
        out / "summary.json",
        {
            "config": _echo_config(args, config),
            "instance": {"customers": matrix.m, "items": matrix.n, "providers": catalog.l},
            "results": [row.to_dict() for row in result.trace],
        },
    )
    print(f"wrote {out / 'trace.csv'} ({len(result.trace)} rows)")
    return 0


def _cmd_online(args) -> int:
    matrix, catalog, labels = _load(args)
    config = ExperimentConfig(
        mode="online",
        fairness=FairnessMode(args.fairness),
        algorithms=_comma_names(args.algorithms),
        ks=_comma_ints(args.k),
        seed=args.seed,
        stream_multiplier=args.stream_multiplier,
        trace_every=args.trace_every,
    )
    result = run_online_stream(config, matrix, catalog)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for algo, served in result.served.items():
        cell = out / algo
        cell.mkdir(parents=True, exist_ok=True)
        fileio.write_recommendations(
            cell / "recommendations.csv", served, matrix, catalog, labels
        )
    fileio.write_trace(out / "trace.csv", result.trace)
    fileio.write_summary(
        out / "summary.json",
        {
            "config": _echo_config(args, config),
            "instance": {"customers": matrix.m, "items": matrix.n, "providers": catalog.l},
            "results": [row.to_dict() for row in result.trace],
        },
    )
    print(f"wrote {out / 'trace.csv'} ({len(result.trace)} rows)")
    return 0


def _cmd_metrics(args) -> int:
    matrix, catalog, labels = _load(args)
    served = fileio.read_recommendations(args.recommendations, labels)
    originals = original_rankings(matrix)
    report = exposure([rec for _, rec in served], catalog)
    online = any(req is not None for req, _ in served)
    if online:
        avg_quality = np.zeros(matrix.m)
        rec_time = np.zeros(matrix.m, dtype=np.int64)
        for _, rec in served:
            u = rec.owner
            value = ndcg(u, rec, matrix, originals[u])
            avg_quality[u] = (avg_quality[u] * rec_time[u] + value) / (rec_time[u] + 1)
            rec_time[u] += 1
        served_mask = rec_time > 0
        results = {
            "mode": "online",
            "requests": len(served),
            "total_quality": float(np.dot(avg_quality, rec_time)),
            "ndcg_variance": float(np.var(avg_quality[served_mask])),
            "ndcg_variance_all": float(np.var(avg_quality)),
        }
    else:
        qreport = quality([rec for _, rec in served], matrix, originals)
        ndcg_var = customer_fairness(qreport)
        results = {
            "mode": "offline",
            "k": served[0][1].k,
            "total_quality": total_quality(qreport),
            "ndcg_variance": ndcg_var,
            "ndcg_variance_all": ndcg_var,
        }
    results["exposure_variance"] = uniform_provider_fairness(report)
    results["qw_ratio_variance"] = quality_weighted_provider_fairness(
        report, matrix, catalog
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_summary(
        out / "summary.json",
        {
            "config": _echo_config(args),
            "instance": {"customers": matrix.m, "items": matrix.n, "providers": catalog.l},
            "results": results,
        },
    )
    print(f"wrote {out / 'summary.json'}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "offline": _cmd_offline,
    "online": _cmd_online,
    "metrics": _cmd_metrics,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"tfrom: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (_UsageError, ValidationError) as exc:
        print(f"tfrom: error: {exc}", file=sys.stderr)
        return 1
    except (InputFormatError, OSError) as exc:
        print(f"tfrom: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
