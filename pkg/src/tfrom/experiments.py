"""Experiment protocols: batch k-sweeps and request-stream replays.

The batch protocol runs every (k, algorithm) cell on the same instance
and records one metric row per cell. The stream protocol samples a single
seeded request sequence (uniform over customers, with replacement) and
replays it through every algorithm independently, recording a metric row
every ``trace_every`` requests. Identical seeds reproduce byte-identical
traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import baselines, metrics
from .errors import ValidationError
from .model import (
    Catalog,
    PreferenceMatrix,
    RankedList,
    RecommendationList,
    original_rankings,
)
from .offline import tfrom_offline
from .online import OnlineState, serve_request
from .targets import FairnessMode

ALGORITHMS = ("tfrom", "topk", "random", "minexp")

# tags keep per-algorithm random streams decoupled from each other and
# from the request stream
_SEED_TAG = {"stream": 0, "tfrom": 1, "topk": 2, "random": 3, "minexp": 4}


@dataclass
class ExperimentConfig:
    mode: str
    fairness: FairnessMode
    algorithms: tuple[str, ...]
    ks: tuple[int, ...]
    seed: int
    stream_multiplier: int = 10
    trace_every: int | None = None

    def validate(self, n: int) -> None:
        if self.mode not in ("offline", "online"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if not self.algorithms:
            raise ValidationError("the algorithm set must not be empty")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValidationError(
                    f"unknown algorithm {name!r}; choose from {ALGORITHMS}"
                )
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValidationError("duplicate algorithm names")
        if not self.ks:
            raise ValidationError("at least one k value is required")
        for k in self.ks:
            if not 1 <= k <= n:
                raise ValidationError(f"k={k} outside valid range 1..{n}")
        if len(set(self.ks)) != len(self.ks):
            raise ValidationError("duplicate k values")
        if self.mode == "online" and len(self.ks) != 1:
            raise ValidationError("online runs take exactly one k value")
        if self.stream_multiplier < 1:
            raise ValidationError("stream multiplier must be >= 1")
        if self.trace_every is not None and self.trace_every < 1:
            raise ValidationError("trace granularity must be >= 1")


@dataclass(frozen=True)
class TraceRow:
    step: int
    algorithm: str
    total_quality: float
    ndcg_variance: float
    ndcg_variance_all: float
    exposure_variance: float
    qw_ratio_variance: float

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "algorithm": self.algorithm,
            "total_quality": self.total_quality,
            "ndcg_variance": self.ndcg_variance,
            "ndcg_variance_all": self.ndcg_variance_all,
            "exposure_variance": self.exposure_variance,
            "qw_ratio_variance": self.qw_ratio_variance,
        }


@dataclass
class OfflineSweepResult:
    trace: list[TraceRow]
    lists: dict[tuple[str, int], tuple[RecommendationList, ...]] = field(default_factory=dict)


@dataclass
class OnlineStreamResult:
    trace: list[TraceRow]
    served: dict[str, list[tuple[int, RecommendationList]]] = field(default_factory=dict)
    stream: np.ndarray | None = None


def _offline_cell(
    algo: str,
    k: int,
    config: ExperimentConfig,
    matrix: PreferenceMatrix,
    catalog: Catalog,
    originals: Sequence[RankedList],
) -> tuple[RecommendationList, ...]:
    if algo == "tfrom":
        return tfrom_offline(matrix, catalog, originals, k, config.fairness, config.seed).lists
    if algo == "topk":
        return tuple(baselines.top_k(originals[u], k) for u in range(matrix.m))
    if algo == "random":
        rng = np.random.default_rng([config.seed, _SEED_TAG["random"], k])
        return tuple(baselines.all_random(originals[u], k, rng) for u in range(matrix.m))
    ledger = np.zeros(catalog.l)
    return tuple(
        baselines.minimum_exposure(originals[u], matrix, catalog, ledger, k)
        for u in range(matrix.m)
    )


def run_offline_sweep(
    config: ExperimentConfig, matrix: PreferenceMatrix, catalog: Catalog
) -> OfflineSweepResult:
    """One metric row per (k, algorithm) cell; cells see identical inputs."""
    config.validate(matrix.n)
    originals = original_rankings(matrix)
    result = OfflineSweepResult(trace=[])
    for k in config.ks:
        for algo in config.algorithms:
            lists = _offline_cell(algo, k, config, matrix, catalog, originals)
            report = metrics.exposure(lists, catalog)
            qreport = metrics.quality(lists, matrix, originals)
            ndcg_var = metrics.customer_fairness(qreport)
            result.trace.append(
                TraceRow(
                    step=k,
                    algorithm=algo,
                    total_quality=metrics.total_quality(qreport),
                    ndcg_variance=ndcg_var,
                    ndcg_variance_all=ndcg_var,
                    exposure_variance=metrics.uniform_provider_fairness(report),
                    qw_ratio_variance=metrics.quality_weighted_provider_fairness(
                        report, matrix, catalog
                    ),
                )
            )
            result.lists[(algo, k)] = lists
    return result


class _StreamTracker:
    """Cumulative per-algorithm accounting, fed from served lists only."""

    def __init__(self, m: int, n: int, n_providers: int):
        self.per_item = np.zeros(n)
        self.per_provider = np.zeros(n_providers)
        self.avg_quality = np.zeros(m)
        self.rec_time = np.zeros(m, dtype=np.int64)

    def record(self, rec: RecommendationList, catalog: Catalog, request_ndcg: float) -> None:
        for pos, item in enumerate(rec.items):
            w = metrics.position_weight(pos + 1)
            self.per_item[item] += w
            self.per_provider[catalog.provider_of[item]] += w
        u = rec.owner
        t = int(self.rec_time[u])
        self.avg_quality[u] = (self.avg_quality[u] * t + request_ndcg) / (t + 1)
        self.rec_time[u] = t + 1

    def row(
        self, step: int, algo: str, matrix: PreferenceMatrix, catalog: Catalog
    ) -> TraceRow:
        served = self.rec_time > 0
        report = metrics.ExposureReport(
            per_item=self.per_item, per_provider=self.per_provider
        )
        return TraceRow(
            step=step,
            algorithm=algo,
            total_quality=float(np.dot(self.avg_quality, self.rec_time)),
            ndcg_variance=float(np.var(self.avg_quality[served])),
            ndcg_variance_all=float(np.var(self.avg_quality)),
            exposure_variance=metrics.uniform_provider_fairness(report),
            qw_ratio_variance=metrics.quality_weighted_provider_fairness(
                report, matrix, catalog
            ),
        )


def request_stream(seed: int, m: int, length: int) -> np.ndarray:
    """The seeded request sequence shared by every algorithm in a run."""
    return np.random.default_rng([seed, _SEED_TAG["stream"]]).integers(0, m, size=length)


def run_online_stream(
    config: ExperimentConfig, matrix: PreferenceMatrix, catalog: Catalog
) -> OnlineStreamResult:
    """Replay one request stream through each algorithm independently."""
    config.validate(matrix.n)
    m = matrix.m
    k = config.ks[0]
    originals = original_rankings(matrix)
    length = config.stream_multiplier * m
    every = config.trace_every if config.trace_every is not None else m
    stream = request_stream(config.seed, m, length)

    result = OnlineStreamResult(trace=[], stream=stream)
    for algo in config.algorithms:
        tracker = _StreamTracker(m, matrix.n, catalog.l)
        served: list[tuple[int, RecommendationList]] = []
        state = OnlineState.fresh(m, catalog.l)
        ledger = np.zeros(catalog.l)
        rng = np.random.default_rng([config.seed, _SEED_TAG["random"]])
        for idx, u in enumerate(stream):
            u = int(u)
            if algo == "tfrom":
                rec, state = serve_request(
                    state, u, matrix, catalog, originals[u], k, config.fairness
                )
            elif algo == "topk":
                rec = baselines.top_k(originals[u], k)
            elif algo == "random":
                rec = baselines.all_random(originals[u], k, rng)
            else:
                rec = baselines.minimum_exposure(originals[u], matrix, catalog, ledger, k)
            tracker.record(rec, catalog, metrics.ndcg(u, rec, matrix, originals[u]))
            served.append((idx, rec))
            if (idx + 1) % every == 0:
                result.trace.append(tracker.row(idx + 1, algo, matrix, catalog))
        result.served[algo] = served
    return result
