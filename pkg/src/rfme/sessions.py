"""Inactivity-gap sessionization.

A session is a maximal run of one user's time-ordered events in which no
inter-event gap strictly exceeds the threshold. A gap of exactly the
threshold therefore continues the session, and events sharing a
timestamp always land in the same session. Output order is canonical
(user_id, then start time) so results do not depend on input order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable

from .events import ACTIVITY_TYPES, EventLog, EventType, UserEvent

DEFAULT_GAP = timedelta(minutes=30)


@dataclass(frozen=True, slots=True)
class Session:
    user_id: str
    start: datetime
    end: datetime
    event_count: int
    activity_flags: frozenset[EventType]
    pdp_view_count: int
    lead_drop_count: int

    @property
    def activity_count(self) -> int:
        """Number of distinct activity types performed, 0..5."""
        return len(self.activity_flags)


def _close_session(user_id: str, events: list[UserEvent]) -> Session:
    flags = frozenset(e.event_type for e in events) & frozenset(ACTIVITY_TYPES)
    return Session(
        user_id=user_id,
        start=events[0].timestamp,
        end=events[-1].timestamp,
        event_count=len(events),
        activity_flags=flags,
        pdp_view_count=sum(e.event_type is EventType.PDP_VIEW for e in events),
        lead_drop_count=sum(e.event_type is EventType.LEAD_DROPPED for e in events),
    )


def sessionize(events: EventLog | Iterable[UserEvent], gap: timedelta = DEFAULT_GAP) -> list[Session]:
    """Group events into per-user sessions; returns sessions sorted by
    (user_id, start). Empty input yields an empty list."""
    if gap <= timedelta(0):
        raise ValueError("gap must be positive")
    by_user: dict[str, list[UserEvent]] = {}
    for event in events:
        by_user.setdefault(event.user_id, []).append(event)

    sessions: list[Session] = []
    for user_id in sorted(by_user):
        rows = sorted(by_user[user_id], key=lambda e: e.timestamp)
        current = [rows[0]]
        for event in rows[1:]:
            if event.timestamp - current[-1].timestamp > gap:
                sessions.append(_close_session(user_id, current))
                current = [event]
            else:
                current.append(event)
        sessions.append(_close_session(user_id, current))
    return sessions


def write_sessions_csv(sessions: Iterable[Session], path) -> None:
    """Optional session dump for inspection."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "user_id",
                "start",
                "end",
                "event_count",
                "pdp_views",
                "leads",
                "flag_filter",
                "flag_pdp",
                "flag_lead",
                "flag_crf",
                "flag_shortlist",
            ]
        )
        for s in sessions:
            writer.writerow(
                [
                    s.user_id,
                    s.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
                    s.end.strftime("%Y-%m-%dT%H:%M:%SZ"),
                    s.event_count,
                    s.pdp_view_count,
                    s.lead_drop_count,
                ]
                + [int(t in s.activity_flags) for t in ACTIVITY_TYPES]
            )
