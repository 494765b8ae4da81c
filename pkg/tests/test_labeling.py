"""Cluster profiling and the segment naming rule."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from rfme.clustering import kmeans_fit
from rfme.errors import EmptyCluster, WrongClusterCount
from rfme.labeling import (
    ClusterProfile,
    Segment,
    label_clusters,
    profile_clusters,
    segment_names,
    write_segment_report,
)

# (recency, frequency, monetary, engagement) cluster means from two
# independent reference tables, with their expected segment names.
APP_MEANS = {
    "NeedsActivation": (29, 3, 7, 3),
    "NeedsAttention": (19, 4, 7, 3),
    "Promising": (23, 20, 73, 25),
    "HighValue": (24, 57, 242, 77),
}
WEB_MEANS = {
    "NeedsActivation": (26, 1, 2, 2),
    "NeedsAttention": (16, 2, 3, 3),
    "Promising": (21, 11, 31, 21),
    "HighValue": (21, 41, 123, 75),
}


def profiles_from(means_by_name, order):
    names = list(means_by_name)
    return [
        ClusterProfile(
            cluster_id=i,
            recency_mean=float(means_by_name[names[j]][0]),
            frequency_mean=float(means_by_name[names[j]][1]),
            monetary_mean=float(means_by_name[names[j]][2]),
            engagement_mean=float(means_by_name[names[j]][3]),
            count=10,
            share=0.25,
        )
        for i, j in enumerate(order)
    ], [names[j] for j in order]


@pytest.mark.parametrize("means", [APP_MEANS, WEB_MEANS], ids=["app", "web"])
def test_reference_tables_label_correctly_under_any_order(means):
    for order in itertools.permutations(range(4)):
        profiles, expected = profiles_from(means, order)
        got = label_clusters(profiles)
        assert [got[i].value for i in range(4)] == expected


def test_label_requires_exactly_four():
    profiles, _ = profiles_from(APP_MEANS, (0, 1, 2))
    with pytest.raises(WrongClusterCount):
        label_clusters(profiles)


def test_labels_are_a_bijection():
    profiles, _ = profiles_from(WEB_MEANS, (3, 1, 0, 2))
    got = label_clusters(profiles)
    assert sorted(got) == [0, 1, 2, 3]
    assert set(got.values()) == set(Segment)


def test_recency_splits_the_low_fme_pair():
    # Two identical low-FME profiles except recency: the fresher one is
    # NeedsAttention, the staler one NeedsActivation.
    profiles = [
        ClusterProfile(0, 30.0, 2.0, 5.0, 2.0, 10, 0.25),
        ClusterProfile(1, 5.0, 2.0, 5.0, 2.0, 10, 0.25),
        ClusterProfile(2, 10.0, 20.0, 80.0, 30.0, 10, 0.25),
        ClusterProfile(3, 10.0, 50.0, 200.0, 70.0, 10, 0.25),
    ]
    got = label_clusters(profiles)
    assert got[0] is Segment.NEEDS_ACTIVATION
    assert got[1] is Segment.NEEDS_ATTENTION
    assert got[3] is Segment.HIGH_VALUE
    assert got[2] is Segment.PROMISING


def test_composite_tie_breaks_on_monetary():
    # Clusters 2 and 3 tie on the FME composite; higher monetary wins
    # HighValue.
    profiles = [
        ClusterProfile(0, 10.0, 1.0, 10.0, 5.0, 10, 0.25),
        ClusterProfile(1, 20.0, 1.0, 10.0, 5.0, 10, 0.25),
        ClusterProfile(2, 10.0, 5.0, 50.0, 9.0, 10, 0.25),
        ClusterProfile(3, 10.0, 5.0, 90.0, 7.0, 10, 0.25),
    ]
    f = [1.0, 1.0, 5.0, 5.0]
    m = [10.0, 10.0, 50.0, 90.0]
    e = [5.0, 5.0, 9.0, 7.0]

    def norm(vals, i):
        return (vals[i] - min(vals)) / (max(vals) - min(vals))

    c2 = (norm(f, 2) + norm(m, 2) + norm(e, 2)) / 3
    c3 = (norm(f, 3) + norm(m, 3) + norm(e, 3)) / 3
    assert c2 == pytest.approx(c3)
    got = label_clusters(profiles)
    assert got[3] is Segment.HIGH_VALUE
    assert got[2] is Segment.PROMISING


def test_all_equal_fme_is_still_deterministic():
    profiles = [
        ClusterProfile(i, float(10 + i), 2.0, 5.0, 2.0, 10, 0.25) for i in range(4)
    ]
    got = label_clusters(profiles)
    assert set(got.values()) == set(Segment)
    # Composite all zero: HighValue/Promising fall to the lowest ids,
    # then recency orders the rest.
    assert got[0] is Segment.HIGH_VALUE
    assert got[1] is Segment.PROMISING
    assert got[2] is Segment.NEEDS_ATTENTION
    assert got[3] is Segment.NEEDS_ACTIVATION


def test_profile_clusters_means_and_shares():
    X = np.array(
        [
            [10.0, 1, 5, 1],
            [12.0, 3, 7, 3],
            [40.0, 50, 200, 60],
            [2.0, 20, 90, 30],
        ]
    )
    model, labels = kmeans_fit(X, 2, seed=0)
    profiles = profile_clusters(model, X, labels)
    assert sum(p.count for p in profiles) == 4
    assert sum(p.share for p in profiles) == pytest.approx(1.0)
    for p in profiles:
        members = X[labels == p.cluster_id]
        assert p.recency_mean == pytest.approx(members[:, 0].mean())
        assert p.monetary_mean == pytest.approx(members[:, 2].mean())


def test_profile_clusters_rejects_empty_cluster():
    X = np.array([[0.0, 0, 0, 0], [1.0, 1, 1, 1]])
    model, _ = kmeans_fit(X, 2, seed=0)
    with pytest.raises(EmptyCluster):
        profile_clusters(model, X, np.zeros(2, dtype=int))


def test_segment_names_for_other_k():
    profiles = [
        ClusterProfile(i, 1.0, 1.0, 1.0, 1.0, 5, 1 / 3) for i in range(3)
    ]
    assert segment_names(profiles) == {0: "cluster-0", 1: "cluster-1", 2: "cluster-2"}


def test_segment_names_for_four():
    profiles, expected = profiles_from(APP_MEANS, (0, 1, 2, 3))
    names = segment_names(profiles)
    assert [names[i] for i in range(4)] == expected


def test_write_segment_report(tmp_path):
    profiles, _ = profiles_from(APP_MEANS, (0, 1, 2, 3))
    names = segment_names(profiles)
    path = tmp_path / "segments.csv"
    write_segment_report(profiles, names, path)
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "cluster_id,segment,recency_mean,frequency_mean,monetary_mean,"
        "engagement_mean,count,share"
    )
    assert lines[1] == "0,NeedsActivation,29.0,3.0,7.0,3.0,10,0.25"
    assert len(lines) == 5
