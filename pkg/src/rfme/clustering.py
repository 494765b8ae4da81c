"""From-scratch K-means: k-means++ seeding, Lloyd iterations, WCSS,
elbow curves over a k range, and automatic knee selection.

Determinism contract: given identical (points, k, seed, n_init) the fit
is bit-identical regardless of worker count. The assignment step is
chunked with a fixed chunk size, chunks are merged in order, and
centroid sums are accumulated from the global label vector in a single
fixed-order reduction, so no floating-point sum depends on thread
scheduling. The RNG is numpy's PCG64; restart streams come from
SeedSequence(seed).spawn(n_init).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import (
    EmptyInput,
    FeatureOrderMismatch,
    IndexOutOfRange,
    KExceedsDistinctPoints,
    ModelMissing,
)
from .features import FEATURE_ORDER

DEFAULT_N_INIT = 10
DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-4

# Fixed assignment chunk size, independent of worker count.
_CHUNK = 4096


@dataclass(frozen=True)
class StandardizationParams:
    """Per-feature z-score parameters fitted on training data.

    A degenerate feature (std 0) keeps std 1 so scaling reduces to the
    mean shift on it.
    """

    mean: np.ndarray
    std: np.ndarray

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "StandardizationParams":
        return cls(mean=np.asarray(d["mean"], dtype=float), std=np.asarray(d["std"], dtype=float))

    @classmethod
    def identity(cls, dim: int) -> "StandardizationParams":
        return cls(mean=np.zeros(dim), std=np.ones(dim))


def standardize_fit(points: np.ndarray) -> StandardizationParams:
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise EmptyInput("cannot fit standardization on zero rows")
    mean = points.mean(axis=0)
    std = points.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return StandardizationParams(mean=mean, std=std)


def standardize_apply(params: StandardizationParams, points: np.ndarray) -> np.ndarray:
    return (np.asarray(points, dtype=float) - params.mean) / params.std


@dataclass(frozen=True)
class KMeansModel:
    k: int
    centroids: np.ndarray  # (k, dim), standardized space
    standardization: StandardizationParams
    seed: int
    n_init: int
    max_iter: int
    tol: float
    iterations_run: int
    converged: bool
    wcss: float
    feature_order: tuple[str, ...] = FEATURE_ORDER
    wcss_history: tuple[float, ...] = ()
    segment_by_cluster: dict | None = None

    @property
    def raw_centroids(self) -> np.ndarray:
        """Centroids mapped back to raw feature space for reporting."""
        return self.centroids * self.standardization.std + self.standardization.mean

    def with_segments(self, segment_by_cluster: dict) -> "KMeansModel":
        return replace(self, segment_by_cluster=dict(segment_by_cluster))


def _assign_chunk(chunk: np.ndarray, centroids: np.ndarray):
    diff = chunk[:, None, :] - centroids[None, :, :]
    dists = np.einsum("nkd,nkd->nk", diff, diff)
    labels = dists.argmin(axis=1)  # argmin takes the lowest index on ties
    return labels, dists[np.arange(len(chunk)), labels]


def _assign(points: np.ndarray, centroids: np.ndarray, workers: int = 1):
    """Nearest-centroid assignment, chunked for bounded memory.

    Chunk boundaries are fixed so results are byte-identical for any
    worker count.
    """
    chunks = [points[i : i + _CHUNK] for i in range(0, len(points), _CHUNK)]
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _assign_chunk(c, centroids), chunks))
    else:
        parts = [_assign_chunk(c, centroids) for c in chunks]
    labels = np.concatenate([p[0] for p in parts])
    dists = np.concatenate([p[1] for p in parts])
    return labels, dists


def _means(points: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster means via one fixed-order accumulation."""
    sums = np.zeros((k, points.shape[1]))
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=k)
    means = sums.copy()
    nonempty = counts > 0
    means[nonempty] /= counts[nonempty, None]
    return means, counts


def _repair_empty(labels, dists, counts):
    """Relocate the worst-fit point (farthest from its assigned centroid)
    into each empty cluster, smallest empty index first. The subsequent
    mean step places the empty centroid on the relocated point."""
    for j in np.flatnonzero(counts == 0):
        movable = counts[labels] > 1
        candidate_dists = np.where(movable, dists, -np.inf)
        i = int(candidate_dists.argmax())
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
        dists[i] = 0.0
    return labels, dists, counts


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ D^2 seeding: each next center is drawn with probability
    proportional to squared distance from the nearest chosen center."""
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centers[0] = points[first]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # distinct points usually keep this positive, but squared
            # distances can underflow to zero; fall back to uniform
            idx = int(rng.integers(n))
        else:
            cum = np.cumsum(closest / total)
            idx = int(np.searchsorted(cum, rng.random(), side="right"))
            idx = min(idx, n - 1)
        centers[c] = points[idx]
        closest = np.minimum(closest, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(points, init_centroids, max_iter, tol, workers):
    """One Lloyd run. Returns (centroids, labels, wcss, history, converged, iterations)."""
    centroids = init_centroids.copy()
    k = len(centroids)
    history = []
    converged = False
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        labels, dists = _assign(points, centroids, workers)
        new_centroids, counts = _means(points, labels, k)
        if (counts == 0).any():
            labels, dists, counts = _repair_empty(labels, dists, counts)
            new_centroids, counts = _means(points, labels, k)
        diff = points - new_centroids[labels]
        history.append(float(np.einsum("nd,nd->", diff, diff)))
        shift = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if shift <= tol:
            converged = True
            break
    # Canonicalize: final assignment against final centroids, then one
    # more mean step so each centroid is exactly the mean of its members.
    labels, dists = _assign(points, centroids, workers)
    final_centroids, counts = _means(points, labels, k)
    if (counts == 0).any():
        labels, dists, counts = _repair_empty(labels, dists, counts)
        final_centroids, counts = _means(points, labels, k)
    diff = points - final_centroids[labels]
    wcss_final = float(np.einsum("nd,nd->", diff, diff))
    history.append(wcss_final)
    return final_centroids, labels, wcss_final, history, converged, iterations


def _distinct_count(points: np.ndarray) -> int:
    return len(np.unique(points, axis=0))


def _fit_prepared(points_std, k, seed_seqs, max_iter, tol, workers):
    """Best-of-restarts k-means on already-standardized points."""
    best = None
    for seq in seed_seqs:
        rng = np.random.Generator(np.random.PCG64(seq))
        init = _kmeans_pp_init(points_std, k, rng)
        result = _lloyd(points_std, init, max_iter, tol, workers)
        if best is None or result[2] < best[2]:
            best = result
    return best


def kmeans_fit(
    points: np.ndarray,
    k: int,
    seed: int,
    n_init: int = DEFAULT_N_INIT,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    standardize: bool = True,
    workers: int = 1,
) -> tuple[KMeansModel, np.ndarray]:
    """Fit k-means on raw feature points; returns (model, assignments).

    Runs n_init independent k-means++ starts and keeps the run with the
    lowest WCSS (first such run on a tie).
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise EmptyInput("kmeans_fit needs a non-empty 2-D array")
    if k < 1:
        raise ValueError("k must be >= 1")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    distinct = _distinct_count(points)
    if k > distinct:
        raise KExceedsDistinctPoints(f"k={k} but only {distinct} distinct points")

    params = standardize_fit(points) if standardize else StandardizationParams.identity(points.shape[1])
    points_std = standardize_apply(params, points)
    seed_seqs = np.random.SeedSequence(seed).spawn(n_init)
    centroids, labels, wcss_value, history, converged, iterations = _fit_prepared(
        points_std, k, seed_seqs, max_iter, tol, workers
    )
    model = KMeansModel(
        k=k,
        centroids=centroids,
        standardization=params,
        seed=seed,
        n_init=n_init,
        max_iter=max_iter,
        tol=tol,
        iterations_run=iterations,
        converged=converged,
        wcss=wcss_value,
        wcss_history=tuple(history),
    )
    return model, labels


def kmeans_predict(model: KMeansModel, points: np.ndarray, workers: int = 1) -> np.ndarray:
    """Assign raw-space points to the model's nearest centroids; ties go
    to the lowest centroid index."""
    points_std = standardize_apply(model.standardization, np.asarray(points, dtype=float))
    labels, _ = _assign(points_std, model.centroids, workers)
    return labels


def wcss(points: np.ndarray, centroids: np.ndarray, assignments: Sequence[int]) -> float:
    points = np.asarray(points, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    assignments = np.asarray(assignments)
    if len(assignments) and (assignments.min() < 0 or assignments.max() >= len(centroids)):
        raise IndexOutOfRange("assignment refers to a missing centroid")
    diff = points - centroids[assignments]
    return float(np.einsum("nd,nd->", diff, diff))


@dataclass(frozen=True)
class ElbowCurve:
    points: tuple[tuple[int, float], ...]  # (k, wcss)
    selected_k: int

    def wcss_values(self) -> list[float]:
        return [w for _, w in self.points]


def select_knee(ks: Sequence[int], wcss_values: Sequence[float]) -> int:
    """Pick the k maximizing the discrete second difference
    wcss(k-1) - 2*wcss(k) + wcss(k+1); ties go to the smaller k.

    Curves with fewer than 3 points have no interior, so the smallest k
    is returned.
    """
    if len(ks) < 3:
        return ks[0]
    w = np.asarray(wcss_values, dtype=float)
    second = w[:-2] - 2.0 * w[1:-1] + w[2:]
    return ks[1 + int(second.argmax())]


def elbow_curve(
    points: np.ndarray,
    k_min: int = 1,
    k_max: int = 7,
    seed: int = 0,
    n_init: int = DEFAULT_N_INIT,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    standardize: bool = True,
    workers: int = 1,
) -> ElbowCurve:
    """WCSS-vs-k curve over k_min..k_max with knee selection.

    Every k is fitted with the same spawned restart seeds, so the curve
    is a controlled comparison across k.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or len(points) == 0:
        raise EmptyInput("elbow_curve needs a non-empty 2-D array")
    if k_min < 1 or k_min > k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    if n_init < 1:
        raise ValueError("n_init must be >= 1")
    distinct = _distinct_count(points)
    if k_max > distinct:
        raise KExceedsDistinctPoints(f"k_max={k_max} but only {distinct} distinct points")

    params = standardize_fit(points) if standardize else StandardizationParams.identity(points.shape[1])
    points_std = standardize_apply(params, points)
    seed_seqs = np.random.SeedSequence(seed).spawn(n_init)
    ks = list(range(k_min, k_max + 1))
    curve = []
    for k in ks:
        _, _, wcss_value, _, _, _ = _fit_prepared(points_std, k, seed_seqs, max_iter, tol, workers)
        curve.append((k, wcss_value))
    selected = select_knee(ks, [w for _, w in curve])
    return ElbowCurve(points=tuple(curve), selected_k=selected)


def save_model(model: KMeansModel, path) -> None:
    """Write the model artifact as a single JSON document."""
    doc = {
        "k": model.k,
        "feature_order": list(model.feature_order),
        "centroids_standardized": model.centroids.tolist(),
        "centroids_raw": model.raw_centroids.tolist(),
        "standardization": model.standardization.to_dict(),
        "seed": model.seed,
        "n_init": model.n_init,
        "max_iter": model.max_iter,
        "tol": model.tol,
        "iterations_run": model.iterations_run,
        "converged": model.converged,
        "wcss": model.wcss,
        "segment_by_cluster": (
            None
            if model.segment_by_cluster is None
            else {str(c): s for c, s in model.segment_by_cluster.items()}
        ),
    }
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path) -> KMeansModel:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError:
        raise ModelMissing(f"model artifact not found: {path}")
    order = tuple(doc["feature_order"])
    if order != FEATURE_ORDER:
        raise FeatureOrderMismatch(f"artifact order {order} != {FEATURE_ORDER}")
    segments = doc.get("segment_by_cluster")
    if segments is not None:
        segments = {int(c): s for c, s in segments.items()}
    return KMeansModel(
        k=doc["k"],
        centroids=np.asarray(doc["centroids_standardized"], dtype=float),
        standardization=StandardizationParams.from_dict(doc["standardization"]),
        seed=doc["seed"],
        n_init=doc["n_init"],
        max_iter=doc["max_iter"],
        tol=doc["tol"],
        iterations_run=doc["iterations_run"],
        converged=doc["converged"],
        wcss=doc["wcss"],
        feature_order=order,
        segment_by_cluster=segments,
    )


def write_elbow_csv(curve: ElbowCurve, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("k,wcss,selected\n")
        for k, w in curve.points:
            flag = "true" if k == curve.selected_k else "false"
            handle.write(f"{k},{w!r},{flag}\n")
