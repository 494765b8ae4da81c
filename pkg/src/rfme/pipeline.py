"""End-to-end orchestration: ingest, split, features, cluster, label,
reports, and figures.

Training and scoring write into one output directory. Training produces
model.json, segments_train.csv, elbow.csv, scatter_rf.csv,
scatter_me.csv, run_report.json, and rendered PNGs of the elbow and both
scatters. Scoring reads only the model artifact (no training state) and
writes the *_test counterparts.

Reports deliberately exclude the input path, raw event totals, and the
worker count, so byte-identical artifacts mean semantically identical
runs regardless of where the input lived or how many threads ran.
"""

from __future__ import annotations

import csv
import json
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import plots
from .clustering import (
    ElbowCurve,
    KMeansModel,
    _distinct_count,
    elbow_curve,
    kmeans_fit,
    kmeans_predict,
    load_model,
    save_model,
    write_elbow_csv,
)
from .config import RunConfig, require_test_span, require_train_span
from .evaluation import adjusted_rand_index, cluster_purity
from .events import EventLog, Platform, UserEvent, load_event_log, write_event_log
from .features import (
    MonetaryWeights,
    RfmeVector,
    WindowSpec,
    build_feature_matrix,
    feature_array,
)
from .labeling import ClusterProfile, profile_clusters, segment_names, write_segment_report
from .synth import SynthConfig, generate, read_labels_csv, write_truth_csv


def _filter_events(log: EventLog, platform: str, start: date, end: date) -> list[UserEvent]:
    return [
        e
        for e in log
        if (platform == "both" or e.platform.value == platform)
        and start <= e.timestamp.date() <= end
    ]


def _effective_window(window_days: int, start: date, end: date) -> tuple[int, bool]:
    span_days = (end - start).days + 1
    if span_days < window_days:
        return span_days, True
    return window_days, False


def _write_scatter_csv(path, rows: Iterable[tuple[str, int, int, str]], x_name: str, y_name: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["user_id", x_name, y_name, "segment"])
        for row in rows:
            writer.writerow(row)


def _write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _profile_rows(profiles: Sequence[ClusterProfile], names: dict[int, str]) -> list[dict]:
    return [
        {
            "cluster_id": p.cluster_id,
            "segment": names[p.cluster_id],
            "recency_mean": p.recency_mean,
            "frequency_mean": p.frequency_mean,
            "monetary_mean": p.monetary_mean,
            "engagement_mean": p.engagement_mean,
            "count": p.count,
            "share": p.share,
        }
        for p in profiles
    ]


def _split_section(
    n_users: int, start: date, end: date, window_days: int, effective: int, clipped: bool,
    profiles: Sequence[ClusterProfile], names: dict[int, str],
) -> dict:
    return {
        "user_count": n_users,
        "span": {"start": start.isoformat(), "end": end.isoformat()},
        "window": {
            "configured_days": window_days,
            "effective_days": effective,
            "clipped": clipped,
        },
        "segments": _profile_rows(profiles, names),
    }


def _export_split(
    out: Path,
    suffix: str,
    vectors: Sequence[RfmeVector],
    labels: np.ndarray,
    names: dict[int, str],
) -> None:
    """Scatter CSVs and PNGs for one split; suffix is "" or "_test"."""
    segs = [names[int(c)] for c in labels]
    rf_rows = [(v.user_id, v.recency, v.frequency, s) for v, s in zip(vectors, segs)]
    me_rows = [(v.user_id, v.monetary, v.engagement, s) for v, s in zip(vectors, segs)]
    _write_scatter_csv(out / f"scatter_rf{suffix}.csv", rf_rows, "recency", "frequency")
    _write_scatter_csv(out / f"scatter_me{suffix}.csv", me_rows, "monetary", "engagement")
    split = "test" if suffix else "train"
    plots.render_scatter(
        [(r, f, s) for _, r, f, s in rf_rows],
        "recency (days)", "frequency (sessions)",
        f"Recency vs frequency ({split})", out / f"scatter_rf{suffix}.png",
    )
    plots.render_scatter(
        [(m, e, s) for _, m, e, s in me_rows],
        "monetary", "engagement",
        f"Monetary vs engagement ({split})", out / f"scatter_me{suffix}.png",
    )


def run_train(config: RunConfig) -> tuple[KMeansModel, dict]:
    """Train on the configured train span; returns (model, run report)."""
    require_train_span(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log, _rejects = load_event_log(config.input, config.format)

    events = _filter_events(log, config.platform, config.train_start, config.train_end)
    effective, clipped = _effective_window(config.window_days, config.train_start, config.train_end)
    window = WindowSpec(reference_date=config.train_end, window_days=effective)
    weights = MonetaryWeights(config.pdp_weight, config.lead_weight)
    vectors = build_feature_matrix(events, window, config.gap, weights)
    X = feature_array(vectors)

    if config.k is None:
        k_max = min(config.k_max, _distinct_count(X))
        k_max = max(k_max, config.k_min)
        curve = elbow_curve(
            X,
            k_min=config.k_min,
            k_max=k_max,
            seed=config.seed,
            n_init=config.n_init,
            max_iter=config.max_iter,
            tol=config.tol,
            standardize=config.standardize,
            workers=config.workers,
        )
        k = curve.selected_k
    else:
        k = config.k
        curve = None

    model, labels = kmeans_fit(
        X,
        k,
        seed=config.seed,
        n_init=config.n_init,
        max_iter=config.max_iter,
        tol=config.tol,
        standardize=config.standardize,
        workers=config.workers,
    )
    profiles = profile_clusters(model, X, labels)
    names = segment_names(profiles)
    model = model.with_segments(names)

    if curve is None:
        curve = ElbowCurve(points=((k, model.wcss),), selected_k=k)
    save_model(model, out / "model.json")
    write_elbow_csv(curve, out / "elbow.csv")
    plots.render_elbow(curve, out / "elbow.png")
    write_segment_report(profiles, names, out / "segments_train.csv")
    _export_split(out, "", vectors, labels, names)

    report = {
        "train": _split_section(
            len(vectors), config.train_start, config.train_end,
            config.window_days, effective, clipped, profiles, names,
        ),
        "elbow": {
            "mode": "fixed" if config.k is not None else "auto",
            "points": [[k_, w] for k_, w in curve.points],
            "selected_k": curve.selected_k,
        },
        "model": {
            "k": model.k,
            "seed": model.seed,
            "n_init": model.n_init,
            "max_iter": model.max_iter,
            "tol": model.tol,
            "iterations_run": model.iterations_run,
            "converged": model.converged,
            "wcss": model.wcss,
            "standardize": config.standardize,
        },
        "settings": {
            "platform": config.platform,
            "format": config.format,
            "gap_minutes": config.gap_minutes,
            "pdp_weight": config.pdp_weight,
            "lead_weight": config.lead_weight,
        },
    }
    _write_json(out / "run_report.json", report)
    return model, report


def _profiles_for_scoring(
    k: int, X: np.ndarray, labels: np.ndarray
) -> list[ClusterProfile]:
    """Like profile_clusters but tolerates clusters with no test members
    (they simply get no report row)."""
    n = len(X)
    profiles = []
    for c in range(k):
        members = X[labels == c]
        if len(members) == 0:
            continue
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


def run_score(config: RunConfig, model_path) -> dict:
    """Score the configured test span with a trained artifact. Reads no
    training state beyond the artifact itself."""
    require_test_span(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model = load_model(model_path)

    log, _rejects = load_event_log(config.input, config.format)
    events = _filter_events(log, config.platform, config.test_start, config.test_end)
    effective, clipped = _effective_window(config.window_days, config.test_start, config.test_end)
    window = WindowSpec(reference_date=config.test_end, window_days=effective)
    weights = MonetaryWeights(config.pdp_weight, config.lead_weight)
    vectors = build_feature_matrix(events, window, config.gap, weights)
    X = feature_array(vectors)
    labels = kmeans_predict(model, X, workers=config.workers)

    names = model.segment_by_cluster or {c: f"cluster-{c}" for c in range(model.k)}
    names = {int(c): str(s) for c, s in names.items()}
    profiles = _profiles_for_scoring(model.k, X, labels)
    write_segment_report(profiles, names, out / "segments_test.csv")
    _export_split(out, "_test", vectors, labels, names)

    report = {
        "test": _split_section(
            len(vectors), config.test_start, config.test_end,
            config.window_days, effective, clipped, profiles, names,
        ),
        "model": {"k": model.k, "seed": model.seed, "wcss": model.wcss},
    }
    _write_json(out / "run_report_test.json", report)
    return report


def run_synth(config: SynthConfig, out_dir) -> tuple[Path, Path]:
    """Generate a synthetic corpus; writes events.<format> and truth.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log, truth = generate(
        config.specs,
        config.n_users,
        config.window,
        config.seed,
        platform=Platform(config.platform),
    )
    events_path = out / ("events.csv" if config.format == "csv" else "events.jsonl")
    write_event_log(log, events_path, config.format)
    truth_path = out / "truth.csv"
    write_truth_csv(truth, truth_path)
    return events_path, truth_path


def run_eval(pred_path, truth_path) -> dict:
    """Compare two user_id,segment files; returns {n, ari, purity}."""
    pred = read_labels_csv(pred_path)
    truth = read_labels_csv(truth_path)
    return {
        "n": len(pred),
        "ari": adjusted_rand_index(pred, truth),
        "purity": cluster_purity(pred, truth),
    }
