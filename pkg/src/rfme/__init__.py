"""Customer segmentation from clickstream logs: RFME features, K-means
clustering with elbow-based k selection, and marketing segment labels.
"""

from .clustering import (
    ElbowCurve,
    KMeansModel,
    StandardizationParams,
    elbow_curve,
    kmeans_fit,
    kmeans_predict,
    load_model,
    save_model,
    select_knee,
    wcss,
)
from .config import RunConfig, build_run_config, parse_kv_file
from .errors import RfmeError
from .evaluation import adjusted_rand_index, cluster_purity
from .events import (
    EventLog,
    EventType,
    Platform,
    RejectionReport,
    UserEvent,
    load_event_log,
    parse_event_line,
    serialize_event_line,
    write_event_log,
)
from .features import (
    FEATURE_ORDER,
    MonetaryWeights,
    RfmeVector,
    WindowSpec,
    build_feature_matrix,
    compute_engagement,
    compute_frequency,
    compute_monetary,
    compute_recency,
    feature_array,
)
from .labeling import ClusterProfile, Segment, label_clusters, profile_clusters, segment_names
from .pipeline import run_eval, run_score, run_synth, run_train
from .sessions import Session, sessionize
from .synth import DEFAULT_ARCHETYPES, ArchetypeSpec, SynthConfig, expected_means, generate

__version__ = "0.1.0"

__all__ = [
    "ArchetypeSpec",
    "ClusterProfile",
    "ElbowCurve",
    "EventLog",
    "EventType",
    "FEATURE_ORDER",
    "KMeansModel",
    "MonetaryWeights",
    "DEFAULT_ARCHETYPES",
    "Platform",
    "RejectionReport",
    "RfmeError",
    "RfmeVector",
    "RunConfig",
    "Segment",
    "Session",
    "StandardizationParams",
    "SynthConfig",
    "UserEvent",
    "WindowSpec",
    "adjusted_rand_index",
    "build_feature_matrix",
    "build_run_config",
    "cluster_purity",
    "compute_engagement",
    "compute_frequency",
    "compute_monetary",
    "compute_recency",
    "elbow_curve",
    "expected_means",
    "feature_array",
    "generate",
    "kmeans_fit",
    "kmeans_predict",
    "label_clusters",
    "load_event_log",
    "load_model",
    "parse_event_line",
    "parse_kv_file",
    "profile_clusters",
    "run_eval",
    "run_score",
    "run_synth",
    "run_train",
    "save_model",
    "segment_names",
    "select_knee",
    "serialize_event_line",
    "sessionize",
    "wcss",
    "write_event_log",
]
