"""Maps the four fitted clusters onto named marketing segments.

The rule is a deterministic stand-in for eyeballing cluster mean tables:
rank clusters by an FME composite (mean of min-max-normalized frequency,
monetary, and engagement means). The top two composites are HighValue
and Promising; of the bottom two, the more recent cluster is
NeedsAttention and the staler one NeedsActivation.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyCluster, WrongClusterCount
from .clustering import KMeansModel


class Segment(Enum):
    HIGH_VALUE = "HighValue"
    PROMISING = "Promising"
    NEEDS_ATTENTION = "NeedsAttention"
    NEEDS_ACTIVATION = "NeedsActivation"


@dataclass(frozen=True)
class ClusterProfile:
    cluster_id: int
    recency_mean: float
    frequency_mean: float
    monetary_mean: float
    engagement_mean: float
    count: int
    share: float


def profile_clusters(
    model: KMeansModel, vectors: np.ndarray, assignments: Sequence[int]
) -> list[ClusterProfile]:
    """Raw-space per-cluster feature means, counts, and shares."""
    vectors = np.asarray(vectors, dtype=float)
    assignments = np.asarray(assignments)
    n = len(vectors)
    profiles = []
    for c in range(model.k):
        members = vectors[assignments == c]
        if len(members) == 0:
            raise EmptyCluster(f"cluster {c} has no members")
        means = members.mean(axis=0)
        profiles.append(
            ClusterProfile(
                cluster_id=c,
                recency_mean=float(means[0]),
                frequency_mean=float(means[1]),
                monetary_mean=float(means[2]),
                engagement_mean=float(means[3]),
                count=len(members),
                share=len(members) / n,
            )
        )
    return profiles


def _minmax(values: Sequence[float]) -> list[float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.0 for _ in values]
    return [(v - lo) / (hi - lo) for v in values]


def label_clusters(profiles: Sequence[ClusterProfile]) -> dict[int, Segment]:
    """Bijection cluster id -> Segment for exactly four profiles.

    Composite ties break toward higher monetary then higher frequency;
    the recency tie between the bottom two breaks toward higher
    frequency for NeedsAttention.
    """
    if len(profiles) != 4:
        raise WrongClusterCount(f"segment labeling needs 4 clusters, got {len(profiles)}")
    f_norm = _minmax([p.frequency_mean for p in profiles])
    m_norm = _minmax([p.monetary_mean for p in profiles])
    e_norm = _minmax([p.engagement_mean for p in profiles])
    composite = {
        p.cluster_id: (f_norm[i] + m_norm[i] + e_norm[i]) / 3.0 for i, p in enumerate(profiles)
    }
    by_composite = sorted(
        profiles,
        key=lambda p: (
            -composite[p.cluster_id],
            -p.monetary_mean,
            -p.frequency_mean,
            p.cluster_id,
        ),
    )
    top, second, *rest = by_composite
    rest_sorted = sorted(rest, key=lambda p: (p.recency_mean, -p.frequency_mean, p.cluster_id))
    return {
        top.cluster_id: Segment.HIGH_VALUE,
        second.cluster_id: Segment.PROMISING,
        rest_sorted[0].cluster_id: Segment.NEEDS_ATTENTION,
        rest_sorted[1].cluster_id: Segment.NEEDS_ACTIVATION,
    }


def segment_names(profiles: Sequence[ClusterProfile]) -> dict[int, str]:
    """Segment names for k = 4, neutral "cluster-i" names otherwise."""
    if len(profiles) == 4:
        return {c: seg.value for c, seg in label_clusters(profiles).items()}
    return {p.cluster_id: f"cluster-{p.cluster_id}" for p in profiles}


def write_segment_report(
    profiles: Sequence[ClusterProfile], names: Mapping[int, str], path
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "cluster_id",
                "segment",
                "recency_mean",
                "frequency_mean",
                "monetary_mean",
                "engagement_mean",
                "count",
                "share",
            ]
        )
        for p in profiles:
            writer.writerow(
                [
                    p.cluster_id,
                    names[p.cluster_id],
                    repr(p.recency_mean),
                    repr(p.frequency_mean),
                    repr(p.monetary_mean),
                    repr(p.engagement_mean),
                    p.count,
                    repr(p.share),
                ]
            )
