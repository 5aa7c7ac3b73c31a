"""Stateful per-request re-ranking with a growing exposure budget.

Requests arrive one at a time; provider exposure and per-customer quality
accumulate across the whole stream while the candidate pool resets on
every request. The exposure budget is recomputed before each request from
the number of requests *including* the incoming one, so the budget grows
in lock-step with the exposure about to be spent.

Pass 1 scans the customer's preference order and takes the first item
whose provider fits the slot weight under its budget (same slack rule as
the batch variant). Pass 2 fills any remaining slots with the head of the
remaining preference order, favoring quality over fairness for
vacancies. Early in a stream every budget is below a single slot weight,
so pass 1 selects nothing and the customer simply receives their top-k.

A state value is never mutated: serving returns a fresh state, so
snapshots can be kept, checkpointed, or replayed at will. Requests against
one logical stream must be serialized by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientItems, InvalidDimension, UnknownCustomer, ValidationError
from .metrics import dcg, position_weight
from .model import Catalog, PreferenceMatrix, RankedList, RecommendationList
from .offline import BUDGET_SLACK
from .targets import FairnessMode, fair_targets, online_total_exposure


@dataclass(frozen=True)
class OnlineState:
    """Cumulative stream state: provider exposure, per-customer running
    average quality, per-customer service counts, total requests served."""

    exposure: np.ndarray
    avg_quality: np.ndarray
    rec_time: np.ndarray
    c_num: int

    @classmethod
    def fresh(cls, m: int, n_providers: int) -> "OnlineState":
        return cls(
            exposure=np.zeros(n_providers),
            avg_quality=np.zeros(m),
            rec_time=np.zeros(m, dtype=np.int64),
            c_num=0,
        )

    def to_dict(self) -> dict:
        """JSON-serializable snapshot."""
        return {
            "exposure": self.exposure.tolist(),
            "avg_quality": self.avg_quality.tolist(),
            "rec_time": self.rec_time.tolist(),
            "c_num": int(self.c_num),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "OnlineState":
        return cls(
            exposure=np.array(payload["exposure"], dtype=np.float64),
            avg_quality=np.array(payload["avg_quality"], dtype=np.float64),
            rec_time=np.array(payload["rec_time"], dtype=np.int64),
            c_num=int(payload["c_num"]),
        )


def serve_request(
    state: OnlineState,
    u: int,
    matrix: PreferenceMatrix,
    catalog: Catalog,
    original: RankedList,
    k: int,
    mode: FairnessMode,
) -> tuple[RecommendationList, OnlineState]:
    """Serve one request for customer ``u`` and return (list, new state)."""
    m, n = matrix.m, matrix.n
    if not 0 <= u < m:
        raise UnknownCustomer(f"customer {u} outside universe of size {m}")
    if k < 1:
        raise InvalidDimension(f"list length must be >= 1, got {k}")
    if k > n:
        raise InsufficientItems(f"cannot build a length-{k} list from {n} items")
    if original.owner != u:
        raise ValidationError(f"original ranking owned by {original.owner}, not {u}")

    budgets = fair_targets(
        mode, online_total_exposure(state.c_num + 1, k), catalog, matrix
    ).per_provider

    pool = original.items
    pool_providers = catalog.provider_of[pool]
    used = np.zeros(n, dtype=bool)
    exposure = state.exposure.copy()

    ideal = dcg(u, pool[:k], matrix)
    out = [-1] * k
    q_temp = 0.0

    def place(rank: int, pos: int) -> None:
        nonlocal q_temp
        item = int(pool[pos])
        p = int(pool_providers[pos])
        w = position_weight(rank)
        out[rank - 1] = item
        exposure[p] += w
        q_temp += float(matrix.scores[u, item]) / (math.log2(rank + 1) * ideal)
        used[pos] = True

    for rank in range(1, k + 1):
        fits = exposure + position_weight(rank) <= budgets + BUDGET_SLACK
        candidates = fits[pool_providers] & ~used
        pos = int(candidates.argmax())
        if candidates[pos]:
            place(rank, pos)

    for rank in range(1, k + 1):
        if out[rank - 1] == -1:
            place(rank, int((~used).argmax()))

    avg_quality = state.avg_quality.copy()
    rec_time = state.rec_time.copy()
    t = int(rec_time[u])
    avg_quality[u] = (avg_quality[u] * t + q_temp) / (t + 1)
    rec_time[u] = t + 1

    new_state = OnlineState(
        exposure=exposure,
        avg_quality=avg_quality,
        rec_time=rec_time,
        c_num=state.c_num + 1,
    )
    return RecommendationList(owner=u, items=tuple(out)), new_state
