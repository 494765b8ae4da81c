"""Shared test helpers: compact event construction and tiny corpora."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest

from rfme.events import EventType, Platform, UserEvent

REF = "2022-03-01"


def ts(text: str) -> datetime:
    """'2022-03-01 10:30' or '2022-03-01 10:30:15' -> aware UTC datetime."""
    if len(text) == 16:
        text += ":00"
    return datetime.fromisoformat(text.replace(" ", "T")).replace(tzinfo=timezone.utc)


def ev(uid: str, when: str, etype: str = "pdp_view", platform: str = "app") -> UserEvent:
    return UserEvent(uid, ts(when), EventType(etype), Platform(platform))


@pytest.fixture
def two_user_log():
    """u1: two sessions (one pdp+lead, one filter); u2: one pdp session."""
    return [
        ev("u1", "2022-02-20 10:00", "pdp_view"),
        ev("u1", "2022-02-20 10:05", "lead_dropped"),
        ev("u1", "2022-02-25 09:00", "filter_applied"),
        ev("u2", "2022-02-28 18:00", "pdp_view"),
    ]
