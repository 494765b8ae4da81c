"""Canonical event record, event-type vocabulary, and validated ingestion.

Events arrive as CSV (header required) or JSONL with the schema
``user_id,timestamp,event_type,platform``. Timestamps are RFC 3339 and
normalized to UTC at second precision. Bad lines are collected into a
rejection report instead of aborting the load; only a file with zero
valid records is fatal.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    AllRecordsRejected,
    EmptyUserId,
    InputIoError,
    MalformedRecord,
    UnknownEventType,
)


class EventType(Enum):
    """The closed six-token event vocabulary.

    The first five are the activity types that feed the engagement
    feature; OTHER_VISIT captures remaining visits (search pages and the
    like) that count toward recency and frequency but no activity.
    """

    FILTER_APPLIED = "filter_applied"
    PDP_VIEW = "pdp_view"
    LEAD_DROPPED = "lead_dropped"
    CRF_OPENED = "crf_opened"
    SHORTLISTED = "shortlisted"
    OTHER_VISIT = "other_visit"


# Activity types, in the fixed order used by session flags and reports.
ACTIVITY_TYPES = (
    EventType.FILTER_APPLIED,
    EventType.PDP_VIEW,
    EventType.LEAD_DROPPED,
    EventType.CRF_OPENED,
    EventType.SHORTLISTED,
)


class Platform(Enum):
    WEB = "web"
    APP = "app"


CSV_HEADER = "user_id,timestamp,event_type,platform"
_FIELDS = ("user_id", "timestamp", "event_type", "platform")


@dataclass(frozen=True, slots=True)
class UserEvent:
    user_id: str
    timestamp: datetime
    event_type: EventType
    platform: Platform


@dataclass(frozen=True)
class EventLog:
    """A batch of events plus the [min, max] timestamp span they cover."""

    events: tuple[UserEvent, ...]
    source_span: tuple[datetime, datetime] | None

    @classmethod
    def from_events(cls, events: Iterable[UserEvent]) -> "EventLog":
        evs = tuple(events)
        if not evs:
            return cls(events=(), source_span=None)
        lo = min(e.timestamp for e in evs)
        hi = max(e.timestamp for e in evs)
        return cls(events=evs, source_span=(lo, hi))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[UserEvent]:
        return iter(self.events)


@dataclass
class RejectionReport:
    """Rejected record numbers grouped by error class name.

    Record numbers are 1-based over data records; the CSV header line is
    not a record and does not count.
    """

    by_error: dict[str, list[int]] = field(default_factory=dict)

    def add(self, error: Exception, record_number: int) -> None:
        self.by_error.setdefault(type(error).__name__, []).append(record_number)

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.by_error.values())


def _parse_timestamp(raw: str) -> datetime:
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise MalformedRecord(f"unparseable timestamp: {raw!r}")
    if ts.tzinfo is None:
        raise MalformedRecord(f"timestamp lacks a UTC offset: {raw!r}")
    # Second precision: anything finer is noise for day-level features.
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _build_event(fields: dict[str, object]) -> UserEvent:
    user_id = str(fields["user_id"])
    if not user_id:
        raise EmptyUserId("record with empty user_id")
    timestamp = _parse_timestamp(str(fields["timestamp"]))
    token = str(fields["event_type"])
    try:
        event_type = EventType(token)
    except ValueError:
        raise UnknownEventType(f"unknown event_type token: {token!r}")
    try:
        platform = Platform(str(fields["platform"]))
    except ValueError:
        raise MalformedRecord(f"unknown platform token: {fields['platform']!r}")
    return UserEvent(user_id, timestamp, event_type, platform)


def parse_event_line(line: str, format: str = "csv") -> UserEvent:
    """Parse one record in the given format ("csv" or "jsonl").

    Raises MalformedRecord, UnknownEventType, or EmptyUserId.
    """
    if format == "csv":
        rows = list(csv.reader([line]))
        if not rows or len(rows[0]) != len(_FIELDS):
            raise MalformedRecord(f"expected {len(_FIELDS)} fields: {line!r}")
        return _build_event(dict(zip(_FIELDS, rows[0])))
    if format == "jsonl":
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise MalformedRecord(f"invalid JSON: {line!r}")
        if not isinstance(obj, dict) or any(k not in obj for k in _FIELDS):
            raise MalformedRecord(f"object missing required fields: {line!r}")
        return _build_event(obj)
    raise ValueError(f"unknown format: {format!r}")


def serialize_event_line(event: UserEvent, format: str = "csv") -> str:
    """Inverse of parse_event_line; round-trips exactly."""
    ts = event.timestamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    if format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="").writerow(
            [event.user_id, ts, event.event_type.value, event.platform.value]
        )
        return buf.getvalue()
    if format == "jsonl":
        return json.dumps(
            {
                "user_id": event.user_id,
                "timestamp": ts,
                "event_type": event.event_type.value,
                "platform": event.platform.value,
            },
            sort_keys=True,
        )
    raise ValueError(f"unknown format: {format!r}")


def load_event_log(path, format: str = "csv") -> tuple[EventLog, RejectionReport]:
    """Load a whole event file, collecting rejects instead of failing.

    Raises InputIoError for unreadable files and AllRecordsRejected when
    not a single record parses (including empty files).
    """
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unknown format: {format!r}")
    events: list[UserEvent] = []
    report = RejectionReport()
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise InputIoError(f"cannot read {path}: {exc}")
    with handle:
        record_number = 0
        saw_header = format != "csv"
        for raw in handle:
            line = raw.rstrip("\r\n")
            if not saw_header:
                saw_header = True
                if line != CSV_HEADER:
                    report.add(MalformedRecord("bad header"), 0)
                continue
            record_number += 1
            try:
                events.append(parse_event_line(line, format))
            except (MalformedRecord, UnknownEventType, EmptyUserId) as exc:
                report.add(exc, record_number)
    if not events:
        raise AllRecordsRejected(
            f"{path}: no valid records among {record_number} ({format} schema mismatch?)"
        )
    return EventLog.from_events(events), report


def write_event_log(events: Iterable[UserEvent], path, format: str = "csv") -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        if format == "csv":
            handle.write(CSV_HEADER + "\n")
        for event in events:
            handle.write(serialize_event_line(event, format) + "\n")
