"""Comparison re-rankers: pure preference, pure chance, pure exposure parity.

All three work per customer and emit valid recommendation lists; they are
usable in both the batch and the streaming protocols. ``minimum_exposure``
carries a mutable exposure ledger across calls, under the same
one-request-at-a-time contract as the streaming re-ranker.
"""

from __future__ import annotations

import numpy as np

from .errors import InsufficientItems
from .metrics import position_weight
from .model import Catalog, PreferenceMatrix, RankedList, RecommendationList


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise InsufficientItems(f"cannot build a length-{k} list from {n} items")


def top_k(original: RankedList, k: int) -> RecommendationList:
    """The first k items of the customer's own ranking (maximal quality)."""
    _check_k(k, original.items.size)
    return RecommendationList(owner=original.owner, items=tuple(int(i) for i in original.items[:k]))


def all_random(original: RankedList, k: int, seed) -> RecommendationList:
    """k distinct items drawn uniformly from the full ranking, in draw order.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, including an
    existing generator (useful for drawing many lists from one stream).
    """
    _check_k(k, original.items.size)
    rng = np.random.default_rng(seed)
    drawn = rng.choice(original.items, size=k, replace=False)
    return RecommendationList(owner=original.owner, items=tuple(int(i) for i in drawn))


def minimum_exposure(
    original: RankedList,
    matrix: PreferenceMatrix,
    catalog: Catalog,
    ledger: np.ndarray,
    k: int,
) -> RecommendationList:
    """Fill each slot from the currently least-exposed provider.

    Per rank: choose the provider with minimal ledger exposure that still
    has an unrecommended item for this customer (ties: lowest provider id),
    then that provider's best-scoring remaining item (ties: lowest item
    id). The ledger is updated in place with the slot weights, so passing
    the same array across customers or requests accumulates exposure
    globally.
    """
    n = original.items.size
    _check_k(k, n)
    u = original.owner
    used = np.zeros(n, dtype=bool)
    out = []
    for rank in range(1, k + 1):
        available = ~used
        load = np.full(catalog.l, np.inf)
        has_items = np.unique(catalog.provider_of[available])
        load[has_items] = ledger[has_items]
        p = int(load.argmin())
        members = np.flatnonzero((catalog.provider_of == p) & available)
        scores = matrix.scores[u, members]
        members = members[scores == scores.max()]
        item = int(members.min())
        out.append(item)
        used[item] = True
        ledger[p] += position_weight(rank)
    return RecommendationList(owner=u, items=tuple(out))
