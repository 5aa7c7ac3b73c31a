"""Core instance types: preference scores, the provider catalog, rankings.

An *instance* is a dense non-negative relevance matrix (customers x items)
plus a catalog assigning every item to exactly one provider. All types are
immutable after construction and safe to share across threads; the
re-rankers and metrics build on them without further validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    EmptyRow,
    InvalidShape,
    NegativeScore,
    NonFiniteScore,
    UnknownCustomer,
)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PreferenceMatrix:
    """Dense m x n grid of finite, non-negative relevance scores.

    Every row contains at least one strictly positive score; rows that are
    all zero are rejected at construction because a customer without any
    relevant item has an undefined ideal list quality.
    """

    scores: np.ndarray

    @property
    def m(self) -> int:
        return self.scores.shape[0]

    @property
    def n(self) -> int:
        return self.scores.shape[1]


@dataclass(frozen=True)
class Catalog:
    """Item-to-provider assignment with the inverse per-provider item sets.

    Provider ids are contiguous ``0..l-1``; ``provider_labels`` preserves
    the external labels they were compacted from, for output files.
    """

    provider_of: np.ndarray
    items_of: tuple[tuple[int, ...], ...]
    provider_labels: tuple = ()

    @property
    def n(self) -> int:
        return int(self.provider_of.size)

    @property
    def l(self) -> int:
        return len(self.items_of)

    @property
    def sizes(self) -> np.ndarray:
        """Number of items offered by each provider."""
        return np.array([len(items) for items in self.items_of], dtype=np.int64)


@dataclass(frozen=True)
class RankedList:
    """A customer's full ranking: all n items in descending relevance order,
    ties broken by ascending item id."""

    owner: int
    items: np.ndarray


@dataclass(frozen=True)
class RecommendationList:
    """The length-k list finally shown to one customer."""

    owner: int
    items: tuple[int, ...]

    def __post_init__(self):
        if len(self.items) < 1:
            raise InvalidShape("a recommendation list must hold at least one item")
        if len(set(self.items)) != len(self.items):
            raise InvalidShape(
                f"duplicate items in recommendation list for customer {self.owner}"
            )

    @property
    def k(self) -> int:
        return len(self.items)


def validate_recommendation_list(rec: RecommendationList, n: int) -> None:
    """Check that every entry is a valid item id for an n-item instance."""
    for item in rec.items:
        if not 0 <= item < n:
            raise InvalidShape(f"item id {item} outside universe of size {n}")


def build_instance(
    scores, provider_assignments: Sequence
) -> tuple[PreferenceMatrix, Catalog]:
    """Validate raw inputs and assemble an immutable instance.

    ``provider_assignments`` maps each item index to an arbitrary hashable
    provider label; labels are compacted to contiguous ids in order of
    first appearance (a label with no items simply never materializes).

    Raises NonFiniteScore, NegativeScore or EmptyRow when the grid violates
    the score contract, and InvalidShape on dimension mismatches.
    """
    grid = np.array(scores, dtype=np.float64, copy=True)
    if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
        raise InvalidShape(f"expected a non-empty 2-d score grid, got shape {grid.shape}")
    m, n = grid.shape
    assignments = list(provider_assignments)
    if len(assignments) != n:
        raise InvalidShape(
            f"{len(assignments)} provider assignments for {n} items"
        )
    if not np.isfinite(grid).all():
        bad = np.argwhere(~np.isfinite(grid))[0]
        raise NonFiniteScore(f"score at (customer {bad[0]}, item {bad[1]}) is not finite")
    if (grid < 0).any():
        bad = np.argwhere(grid < 0)[0]
        raise NegativeScore(f"score at (customer {bad[0]}, item {bad[1]}) is negative")
    zero_rows = np.flatnonzero(~(grid > 0).any(axis=1))
    if zero_rows.size:
        raise EmptyRow(f"customer {zero_rows[0]} has no positive relevance score")

    label_to_id: dict = {}
    labels: list = []
    provider_of = np.empty(n, dtype=np.int64)
    for item, label in enumerate(assignments):
        pid = label_to_id.get(label)
        if pid is None:
            pid = len(labels)
            label_to_id[label] = pid
            labels.append(label)
        provider_of[item] = pid
    items_of = tuple(
        tuple(int(i) for i in np.flatnonzero(provider_of == p)) for p in range(len(labels))
    )

    matrix = PreferenceMatrix(scores=_readonly(grid))
    catalog = Catalog(
        provider_of=_readonly(provider_of),
        items_of=items_of,
        provider_labels=tuple(labels),
    )
    return matrix, catalog


def original_ranking(matrix: PreferenceMatrix, u: int) -> RankedList:
    """Full descending-score permutation for one customer.

    Ties are broken by ascending item id, so the result is deterministic
    for identical inputs.
    """
    if not 0 <= u < matrix.m:
        raise UnknownCustomer(f"customer {u} outside universe of size {matrix.m}")
    order = np.argsort(-matrix.scores[u], kind="stable")
    return RankedList(owner=u, items=_readonly(order))


def original_rankings(matrix: PreferenceMatrix) -> list[RankedList]:
    """Original ranking for every customer, indexed by customer id."""
    return [original_ranking(matrix, u) for u in range(matrix.m)]
