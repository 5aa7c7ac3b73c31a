"""Delimited-text instance files and result tables.

Instances arrive as two headered CSV files: preference triplets
(customer, item, score) and an item-to-provider map (item, provider).
External ids are arbitrary strings, mapped to contiguous indices in order
of first appearance; the mapping is kept so output files carry the
original labels. Numeric output uses 17 significant digits, enough for an
exact float64 round-trip and therefore bit-stable golden files.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateTripletWarning,
    MissingProviderForItem,
    ParseError,
    UnknownItemInProviderFile,
)
from .model import Catalog, PreferenceMatrix, RecommendationList, build_instance


@dataclass(frozen=True)
class InstanceLabels:
    """External labels for each internal index, per universe."""

    customers: tuple[str, ...]
    items: tuple[str, ...]
    providers: tuple[str, ...]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _open_rows(path) -> tuple[list[str], "csv.reader", object]:
    handle = open(path, newline="", encoding="utf-8")
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        handle.close()
        raise ParseError("empty file", path=path, line=1)
    return [h.strip().lower() for h in header], reader, handle


def _columns(header: list[str], required: Sequence[str], path) -> list[int]:
    positions = []
    for name in required:
        try:
            positions.append(header.index(name))
        except ValueError:
            raise ParseError(f"missing required column {name!r}", path=path, line=1)
    return positions


def load_instance(preferences_path, providers_path):
    """Read and validate an instance from its two files.

    Returns ``(PreferenceMatrix, Catalog, InstanceLabels)``. Duplicate
    (customer, item) rows keep the last score and emit a warning; an item
    without a provider row, or a provider row for an unknown item, is an
    error.
    """
    customer_ids: dict[str, int] = {}
    item_ids: dict[str, int] = {}
    triplets: dict[tuple[int, int], float] = {}

    header, reader, handle = _open_rows(preferences_path)
    with handle:
        c_col, i_col, s_col = _columns(header, ("customer", "item", "score"), preferences_path)
        width = max(c_col, i_col, s_col) + 1
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            line = reader.line_num
            if len(row) < width:
                raise ParseError(
                    f"expected at least {width} fields, got {len(row)}",
                    path=preferences_path,
                    line=line,
                )
            customer = row[c_col].strip()
            item = row[i_col].strip()
            try:
                score = float(row[s_col])
            except ValueError:
                raise ParseError(
                    f"score {row[s_col]!r} is not a number",
                    path=preferences_path,
                    line=line,
                )
            u = customer_ids.setdefault(customer, len(customer_ids))
            i = item_ids.setdefault(item, len(item_ids))
            if (u, i) in triplets:
                warnings.warn(
                    f"duplicate rating for customer {customer!r}, item {item!r}; "
                    "keeping the last value",
                    DuplicateTripletWarning,
                )
            triplets[(u, i)] = score

    if not triplets:
        raise ParseError("no data rows", path=preferences_path, line=1)

    provider_by_item: dict[int, str] = {}
    header, reader, handle = _open_rows(providers_path)
    with handle:
        i_col, p_col = _columns(header, ("item", "provider"), providers_path)
        width = max(i_col, p_col) + 1
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            line = reader.line_num
            if len(row) < width:
                raise ParseError(
                    f"expected at least {width} fields, got {len(row)}",
                    path=providers_path,
                    line=line,
                )
            item = row[i_col].strip()
            if item not in item_ids:
                raise UnknownItemInProviderFile(
                    f"{providers_path}:{line}: item {item!r} does not occur in the preference data"
                )
            i = item_ids[item]
            if i in provider_by_item:
                warnings.warn(
                    f"duplicate provider row for item {item!r}; keeping the last value",
                    DuplicateTripletWarning,
                )
            provider_by_item[i] = row[p_col].strip()

    m, n = len(customer_ids), len(item_ids)
    missing = [i for i in range(n) if i not in provider_by_item]
    if missing:
        label = next(lab for lab, i in item_ids.items() if i == missing[0])
        raise MissingProviderForItem(f"item {label!r} has no provider assignment")

    scores = np.zeros((m, n))
    for (u, i), score in triplets.items():
        scores[u, i] = score
    assignments = [provider_by_item[i] for i in range(n)]
    matrix, catalog = build_instance(scores, assignments)
    labels = InstanceLabels(
        customers=tuple(customer_ids),
        items=tuple(item_ids),
        providers=tuple(str(lab) for lab in catalog.provider_labels),
    )
    return matrix, catalog, labels


def default_labels(m: int, n: int, l: int) -> InstanceLabels:
    """Plain stringified indices, used for synthetic instances."""
    return InstanceLabels(
        customers=tuple(str(u) for u in range(m)),
        items=tuple(str(i) for i in range(n)),
        providers=tuple(str(p) for p in range(l)),
    )


def write_instance_files(scores: np.ndarray, assignments: np.ndarray, out_dir) -> tuple[Path, Path]:
    """Write preference triplets and the provider map; zero scores are omitted."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    preferences = out / "preferences.csv"
    providers = out / "providers.csv"
    with open(preferences, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["customer", "item", "score"])
        for u in range(scores.shape[0]):
            row = scores[u]
            for i in np.flatnonzero(row != 0.0):
                writer.writerow([u, i, _fmt(row[i])])
    with open(providers, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["item", "provider"])
        for i, p in enumerate(assignments):
            writer.writerow([i, int(p)])
    return preferences, providers


def write_recommendations(
    path,
    served: Iterable[tuple[int | None, RecommendationList]],
    matrix: PreferenceMatrix,
    catalog: Catalog,
    labels: InstanceLabels,
) -> None:
    """Write served lists, one row per slot.

    ``served`` yields (request_index, list) pairs; a request index of None
    means a batch result, and the request column is omitted entirely.
    """
    served = list(served)
    online = any(req is not None for req, _ in served)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        head = ["customer", "rank", "item", "provider", "score"]
        writer.writerow(["request"] + head if online else head)
        for req, rec in served:
            u = rec.owner
            for pos, item in enumerate(rec.items):
                row = [
                    labels.customers[u],
                    pos + 1,
                    labels.items[item],
                    labels.providers[int(catalog.provider_of[item])],
                    _fmt(matrix.scores[u, item]),
                ]
                writer.writerow(([req] + row) if online else row)


def read_recommendations(path, labels: InstanceLabels):
    """Read lists back as (request_index_or_None, RecommendationList) pairs."""
    customer_idx = {label: u for u, label in enumerate(labels.customers)}
    item_idx = {label: i for i, label in enumerate(labels.items)}
    header, reader, handle = _open_rows(path)
    with handle:
        online = "request" in header
        cols = ["customer", "rank", "item"]
        if online:
            cols = ["request"] + cols
        positions = _columns(header, cols, path)
        groups: dict[tuple, list[tuple[int, int]]] = {}
        order: list[tuple] = []
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            try:
                values = [row[c].strip() for c in positions]
            except IndexError:
                raise ParseError("truncated row", path=path, line=line)
            if online:
                req, customer, rank, item = values
                key = (int(req), customer)
            else:
                customer, rank, item = values
                key = (None, customer)
            if customer not in customer_idx:
                raise ParseError(f"unknown customer {customer!r}", path=path, line=line)
            if item not in item_idx:
                raise ParseError(f"unknown item {item!r}", path=path, line=line)
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append((int(rank), item_idx[item]))
    out = []
    for key in order:
        slots = sorted(groups[key])
        rec = RecommendationList(
            owner=customer_idx[key[1]], items=tuple(item for _, item in slots)
        )
        out.append((key[0], rec))
    return out


def write_trace(path, rows) -> None:
    """Metric trace as CSV, one row per (step, algorithm) pair."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "step",
                "algorithm",
                "total_quality",
                "ndcg_variance",
                "ndcg_variance_all",
                "exposure_variance",
                "qw_ratio_variance",
            ]
        )
        for row in rows:
            writer.writerow(
                [
                    row.step,
                    row.algorithm,
                    _fmt(row.total_quality),
                    _fmt(row.ndcg_variance),
                    _fmt(row.ndcg_variance_all),
                    _fmt(row.exposure_variance),
                    _fmt(row.qw_ratio_variance),
                ]
            )


def write_summary(path, payload: dict) -> None:
    """Deterministic JSON: sorted keys, no timestamps."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
