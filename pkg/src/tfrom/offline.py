"""Two-phase batch re-ranking under per-provider exposure budgets.

The batch budget is the full exposure of m lists of length k, split across
providers by the chosen fairness mode. Lists are filled one rank at a
time, synchronized across customers: every customer receives their rank-r
item before anyone receives a rank-(r+1) item.

Phase 1 walks ranks 1..k. At rank 1 customers are visited in a seeded
random order; at later ranks in descending order of the quality they have
accumulated so far (ascending customer id on ties), so whoever has lost
the least quality is asked to absorb the next loss. Each customer scans
their not-yet-recommended items in original preference order and takes
the first one whose provider still has budget for this slot's weight. If
no provider fits, the slot is left open.

Phase 2 revisits open slots from high ranks to low, customers in
ascending id, and fills each with the remaining item whose provider
currently has the least exposure (ties: higher score, then lower item
id). No budget check applies, so every list ends up with k items.

Budget admission uses a small slack to absorb floating-point
accumulation; the slack is part of the algorithm contract, so reference
interpreters must apply the same comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InsufficientItems, InvalidDimension, ValidationError
from .metrics import dcg, position_weight
from .model import Catalog, PreferenceMatrix, RankedList, RecommendationList
from .targets import FairnessMode, FairTargets, fair_targets, total_exposure

BUDGET_SLACK = 1e-12


@dataclass(frozen=True)
class PlacementEvent:
    """One item placement, recorded in execution order for replay checks."""

    phase: int
    rank: int
    customer: int
    item: int
    provider: int
    weight: float
    exposure_before: float
    budget: Optional[float]


@dataclass(frozen=True)
class OfflineRun:
    """Full result of one batch re-ranking."""

    lists: tuple[RecommendationList, ...]
    ledger: np.ndarray
    quality: np.ndarray
    skipped: frozenset[tuple[int, int]]
    targets: FairTargets
    events: tuple[PlacementEvent, ...]


def _check_originals(originals: Sequence[RankedList], m: int) -> None:
    if len(originals) != m:
        raise ValidationError(f"expected {m} original rankings, got {len(originals)}")
    for u, ranked in enumerate(originals):
        if ranked.owner != u:
            raise ValidationError(f"original ranking at index {u} owned by {ranked.owner}")


def tfrom_offline(
    matrix: PreferenceMatrix,
    catalog: Catalog,
    originals: Sequence[RankedList],
    k: int,
    mode: FairnessMode,
    seed,
) -> OfflineRun:
    """Re-rank all customers at once under fair-exposure budgets.

    ``seed`` fixes the rank-1 visit order (a seeded shuffle); everything
    else is deterministic, so identical inputs reproduce the run exactly.
    """
    m, n = matrix.m, matrix.n
    if k < 1:
        raise InvalidDimension(f"list length must be >= 1, got {k}")
    if k > n:
        raise InsufficientItems(f"cannot build length-{k} lists from {n} items")
    _check_originals(originals, m)

    budget = fair_targets(mode, total_exposure(m, k), catalog, matrix)
    budgets = budget.per_provider

    pools = np.stack([ranked.items for ranked in originals])
    pool_providers = catalog.provider_of[pools]
    taken = np.zeros((m, n), dtype=bool)

    ideal = np.array([dcg(u, originals[u].items[:k], matrix) for u in range(m)])
    exposure = np.zeros(catalog.l)
    q = np.zeros(m)
    slots = np.full((m, k), -1, dtype=np.int64)

    events: list[PlacementEvent] = []
    skipped: set[tuple[int, int]] = set()

    def place(phase: int, rank: int, u: int, pos: int, w: float) -> None:
        item = int(pools[u, pos])
        p = int(pool_providers[u, pos])
        events.append(
            PlacementEvent(
                phase=phase,
                rank=rank,
                customer=u,
                item=item,
                provider=p,
                weight=w,
                exposure_before=float(exposure[p]),
                budget=float(budgets[p]) if phase == 1 else None,
            )
        )
        slots[u, rank - 1] = item
        exposure[p] += w
        q[u] += float(matrix.scores[u, item]) / (math.log2(rank + 1) * ideal[u])
        taken[u, pos] = True

    for rank in range(1, k + 1):
        w = position_weight(rank)
        if rank == 1:
            visit = np.random.default_rng(seed).permutation(m)
        else:
            visit = sorted(range(m), key=lambda u: (-q[u], u))
        for u in visit:
            u = int(u)
            fits = exposure + w <= budgets + BUDGET_SLACK
            candidates = fits[pool_providers[u]] & ~taken[u]
            pos = int(candidates.argmax())
            if candidates[pos]:
                place(1, rank, u, pos, w)
            else:
                skipped.add((u, rank))

    for rank in range(1, k + 1):
        w = position_weight(rank)
        for u in range(m):
            if slots[u, rank - 1] != -1:
                continue
            open_pos = np.flatnonzero(~taken[u])
            load = exposure[pool_providers[u, open_pos]]
            open_pos = open_pos[load == load.min()]
            score = matrix.scores[u, pools[u, open_pos]]
            open_pos = open_pos[score == score.max()]
            pos = int(open_pos[pools[u, open_pos].argmin()])
            place(2, rank, u, pos, w)

    lists = tuple(
        RecommendationList(owner=u, items=tuple(int(i) for i in slots[u]))
        for u in range(m)
    )
    return OfflineRun(
        lists=lists,
        ledger=exposure,
        quality=q,
        skipped=frozenset(skipped),
        targets=budget,
        events=tuple(events),
    )
