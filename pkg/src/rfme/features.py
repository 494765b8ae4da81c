"""RFME feature computation over a trailing window of whole UTC days.

Recency is days since the user's latest in-window session start;
frequency is the in-window session count; monetary is a weighted count
of PDP views and leads across all in-window sessions (leads weighted 7x
by default, since roughly seven PDP views produce one lead); engagement
counts (session, activity-type) pairs, so a single session contributes
at most 5 no matter how many events it holds.

A session belongs to the window iff its start date does. Users with no
in-window session are excluded rather than given sentinel values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyWindow, NoActivityInWindow
from .events import EventLog
from .sessions import DEFAULT_GAP, Session, sessionize

FEATURE_ORDER = ("recency", "frequency", "monetary", "engagement")


@dataclass(frozen=True)
class WindowSpec:
    """Trailing window [reference_date - window_days + 1, reference_date]."""

    reference_date: date
    window_days: int = 45

    def __post_init__(self):
        if self.window_days < 1:
            raise ValueError("window_days must be >= 1")

    @property
    def start_date(self) -> date:
        return self.reference_date - timedelta(days=self.window_days - 1)

    def contains(self, day: date) -> bool:
        return self.start_date <= day <= self.reference_date


@dataclass(frozen=True)
class MonetaryWeights:
    pdp_weight: int = 1
    lead_weight: int = 7

    def __post_init__(self):
        if self.pdp_weight <= 0 or self.lead_weight <= 0:
            raise ValueError("weights must be positive")


@dataclass(frozen=True, slots=True)
class RfmeVector:
    user_id: str
    recency: int
    frequency: int
    monetary: int
    engagement: int


def compute_recency(sessions: Sequence[Session], reference_date: date) -> int:
    """Calendar days between reference_date and the latest session start."""
    if not sessions:
        raise NoActivityInWindow("recency undefined for a user with no sessions")
    last_day = max(s.start.date() for s in sessions)
    return (reference_date - last_day).days


def compute_frequency(sessions: Sequence[Session]) -> int:
    return len(sessions)


def compute_monetary(pdp_total: int, lead_total: int, weights: MonetaryWeights = MonetaryWeights()) -> int:
    return pdp_total * weights.pdp_weight + lead_total * weights.lead_weight


def compute_engagement(sessions: Sequence[Session]) -> int:
    """Sum over sessions of the number of distinct activity types in each."""
    return sum(s.activity_count for s in sessions)


def build_feature_matrix(
    log: EventLog,
    window: WindowSpec,
    gap=DEFAULT_GAP,
    weights: MonetaryWeights = MonetaryWeights(),
) -> list[RfmeVector]:
    """Sessionize, window, and emit one RfmeVector per active user,
    sorted by user_id. Raises EmptyWindow when no user qualifies."""
    per_user: dict[str, list[Session]] = {}
    for session in sessionize(log, gap):
        if window.contains(session.start.date()):
            per_user.setdefault(session.user_id, []).append(session)

    vectors = []
    for user_id in sorted(per_user):
        sessions = per_user[user_id]
        pdp_total = sum(s.pdp_view_count for s in sessions)
        lead_total = sum(s.lead_drop_count for s in sessions)
        vectors.append(
            RfmeVector(
                user_id=user_id,
                recency=compute_recency(sessions, window.reference_date),
                frequency=compute_frequency(sessions),
                monetary=compute_monetary(pdp_total, lead_total, weights),
                engagement=compute_engagement(sessions),
            )
        )
    if not vectors:
        raise EmptyWindow(
            f"no user has a session in [{window.start_date}, {window.reference_date}]"
        )
    return vectors


def feature_array(vectors: Sequence[RfmeVector]) -> np.ndarray:
    """(n, 4) float array in FEATURE_ORDER."""
    return np.array(
        [[v.recency, v.frequency, v.monetary, v.engagement] for v in vectors],
        dtype=float,
    )


def write_features_csv(vectors: Iterable[RfmeVector], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["user_id"] + list(FEATURE_ORDER))
        for v in vectors:
            writer.writerow([v.user_id, v.recency, v.frequency, v.monetary, v.engagement])
