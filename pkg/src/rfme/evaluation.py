"""Clustering quality against ground truth: adjusted Rand index and purity.

Both metrics take two labelings over the same key set (mappings, or
equal-length sequences treated as being keyed by position). ARI is
computed from the pair-counting contingency table in exact integer
arithmetic; only the final ratio is floating point.
"""

from __future__ import annotations

from math import comb
from typing import Hashable, Mapping, Sequence

from .errors import KeyMismatch


def _as_mapping(labeling) -> Mapping[Hashable, Hashable]:
    if isinstance(labeling, Mapping):
        return labeling
    return dict(enumerate(labeling))


def _aligned(a, b) -> tuple[list, list]:
    a, b = _as_mapping(a), _as_mapping(b)
    if set(a) != set(b):
        raise KeyMismatch("labelings cover different key sets")
    keys = sorted(a, key=repr)
    return [a[k] for k in keys], [b[k] for k in keys]


def _contingency(xs: Sequence, ys: Sequence) -> dict[tuple, int]:
    table: dict[tuple, int] = {}
    for pair in zip(xs, ys):
        table[pair] = table.get(pair, 0) + 1
    return table


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected partition agreement in [-1, 1]; 1 means identical
    up to label renaming. Two trivial identical partitions score 1."""
    xs, ys = _aligned(a, b)
    n = len(xs)
    table = _contingency(xs, ys)
    row_sums: dict = {}
    col_sums: dict = {}
    for (x, y), c in table.items():
        row_sums[x] = row_sums.get(x, 0) + c
        col_sums[y] = col_sums.get(y, 0) + c
    sum_cells = sum(comb(c, 2) for c in table.values())
    sum_rows = sum(comb(c, 2) for c in row_sums.values())
    sum_cols = sum(comb(c, 2) for c in col_sums.values())
    pairs = comb(n, 2)
    # ARI = (index - expected) / (max_index - expected); multiplying
    # through by 2*pairs keeps both sides exact integers.
    numerator = 2 * (sum_cells * pairs - sum_rows * sum_cols)
    denominator = (sum_rows + sum_cols) * pairs - 2 * sum_rows * sum_cols
    if denominator == 0:
        return 1.0
    return numerator / denominator


def cluster_purity(assignments, truth) -> float:
    """Fraction of items whose cluster's majority truth class matches."""
    xs, ys = _aligned(assignments, truth)
    clusters: dict = {}
    for x, y in zip(xs, ys):
        clusters.setdefault(x, {}).setdefault(y, 0)
        clusters[x][y] += 1
    hits = sum(max(counts.values()) for counts in clusters.values())
    return hits / len(xs)
