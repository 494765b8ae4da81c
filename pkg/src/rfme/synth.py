"""Synthetic clickstream generator with labeled behavioral archetypes.

Each archetype pins a user share, a Poisson visit rate, a uniform range
of last-visit day offsets, per-session activity probabilities, and mean
event counts for PDP views and leads. Generation is deterministic: user
counts come from largest-remainder apportionment and every user draws
from an RNG stream spawned from (master seed, user index).

A user's recency is pinned exactly: one session is forced onto the
drawn last-visit day and all other sessions land on that day or earlier
within the window. Days hold eight session slots three hours apart, so
sessions never bleed into each other or across midnight.

The default parameter set echoes the published four-segment profile
(HighValue around F 57 / M 242 / E 77 down to NeedsActivation around
F 3 / M 7 / E 3). Shares and recency bands are chosen so the four
groups are recoverable and the WCSS elbow lands at k = 4; see the
module docs for the analytic means each archetype targets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta, timezone
from typing import Mapping, Sequence

import numpy as np

from .config import parse_kv_file
from .errors import ConfigInvalid, InvalidSpec
from .events import EventLog, EventType, Platform, UserEvent
from .features import MonetaryWeights, WindowSpec
from .labeling import Segment

# Session slots within a day: 01:00, 04:00, ..., 22:00 UTC. Three hours
# apart so a 30-minute inactivity gap can never merge two slots.
_SLOTS_PER_DAY = 8
_SLOT_HOURS = (1, 4, 7, 10, 13, 16, 19, 22)
_EVENT_SPACING = timedelta(seconds=15)


@dataclass(frozen=True)
class ArchetypeSpec:
    name: Segment
    user_share: float
    visit_rate: float  # Poisson mean for in-window sessions per user
    recency_lo: int  # uniform range of last-visit day offsets
    recency_hi: int
    p_filter: float
    p_pdp: float
    p_lead: float
    p_crf: float
    p_shortlist: float
    mean_pdp_views: float = 1.0  # per PDP-active session, >= 1
    mean_leads: float = 1.0  # per lead-active session, >= 1

    @property
    def activity_probs(self) -> tuple[float, float, float, float, float]:
        return (self.p_filter, self.p_pdp, self.p_lead, self.p_crf, self.p_shortlist)


# Default mix: four behaviorally separated groups, from a small
# heavy-usage segment down to a dormant one. Rates tuned so clustering
# the resulting feature vectors recovers the groups.
DEFAULT_ARCHETYPES: tuple[ArchetypeSpec, ...] = (
    ArchetypeSpec(
        name=Segment.HIGH_VALUE,
        user_share=0.05,
        visit_rate=57.0,
        recency_lo=0,
        recency_hi=4,
        p_filter=0.10,
        p_pdp=0.90,
        p_lead=0.215,
        p_crf=0.06,
        p_shortlist=0.07,
        mean_pdp_views=2.8,
        mean_leads=1.15,
    ),
    ArchetypeSpec(
        name=Segment.PROMISING,
        user_share=0.60,
        visit_rate=20.0,
        recency_lo=0,
        recency_hi=9,
        p_filter=0.08,
        p_pdp=0.85,
        p_lead=0.22,
        p_crf=0.05,
        p_shortlist=0.05,
        mean_pdp_views=2.2,
        mean_leads=1.15,
    ),
    ArchetypeSpec(
        name=Segment.NEEDS_ATTENTION,
        user_share=0.25,
        visit_rate=4.0,
        recency_lo=0,
        recency_hi=6,
        p_filter=0.05,
        p_pdp=0.55,
        p_lead=0.09,
        p_crf=0.03,
        p_shortlist=0.03,
        mean_pdp_views=2.0,
        mean_leads=1.03,
    ),
    ArchetypeSpec(
        name=Segment.NEEDS_ACTIVATION,
        user_share=0.10,
        visit_rate=3.0,
        recency_lo=32,
        recency_hi=44,
        p_filter=0.12,
        p_pdp=0.60,
        p_lead=0.13,
        p_crf=0.07,
        p_shortlist=0.08,
        mean_pdp_views=2.2,
        mean_leads=1.11,
    ),
)


def validate_specs(specs: Sequence[ArchetypeSpec], window: WindowSpec) -> None:
    if not specs:
        raise InvalidSpec("need at least one archetype")
    total_share = sum(s.user_share for s in specs)
    if abs(total_share - 1.0) > 1e-9:
        raise InvalidSpec(f"user shares sum to {total_share}, not 1")
    for spec in specs:
        if not 0.0 <= spec.user_share <= 1.0:
            raise InvalidSpec(f"{spec.name.value}: share out of [0, 1]")
        if spec.visit_rate < 0:
            raise InvalidSpec(f"{spec.name.value}: negative visit_rate")
        if not 0 <= spec.recency_lo <= spec.recency_hi <= window.window_days - 1:
            raise InvalidSpec(
                f"{spec.name.value}: recency range [{spec.recency_lo}, {spec.recency_hi}] "
                f"outside window offsets [0, {window.window_days - 1}]"
            )
        for p in spec.activity_probs:
            if not 0.0 <= p <= 1.0:
                raise InvalidSpec(f"{spec.name.value}: activity probability {p} out of [0, 1]")
        if spec.mean_pdp_views < 1.0 or spec.mean_leads < 1.0:
            raise InvalidSpec(f"{spec.name.value}: per-active-session means must be >= 1")


def apportion(shares: Sequence[float], n: int) -> list[int]:
    """Largest-remainder apportionment of n users to shares; ties go to
    the earlier archetype."""
    quotas = [s * n for s in shares]
    counts = [math.floor(q) for q in quotas]
    remainder = n - sum(counts)
    order = sorted(range(len(shares)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def expected_means(
    spec: ArchetypeSpec, weights: MonetaryWeights = MonetaryWeights()
) -> dict[str, float]:
    """Analytic per-user feature expectations implied by the archetype's
    own distributions (capacity clipping ignored; it is negligible for
    sane rates)."""
    lam = spec.visit_rate
    frequency = lam + math.exp(-lam)  # sessions are max(1, Poisson)
    per_session_m = (
        spec.p_pdp * spec.mean_pdp_views * weights.pdp_weight
        + spec.p_lead * spec.mean_leads * weights.lead_weight
    )
    per_session_e = sum(spec.activity_probs)
    return {
        "recency": (spec.recency_lo + spec.recency_hi) / 2.0,
        "frequency": frequency,
        "monetary": frequency * per_session_m,
        "engagement": frequency * per_session_e,
    }


def _user_sessions(rng: np.random.Generator, spec: ArchetypeSpec, window: WindowSpec):
    """Draw one user's session slots as (day_offset, slot) pairs; the
    first pair is the pinned last-visit day."""
    w = window.window_days
    recency = int(rng.integers(spec.recency_lo, spec.recency_hi + 1))
    wanted = max(1, int(rng.poisson(spec.visit_rate)))
    capacity = _SLOTS_PER_DAY * (w - recency)
    count = min(wanted, capacity)
    # pool of slots on days [recency, w-1], excluding the pinned (recency, 0)
    extra = rng.choice(capacity - 1, size=count - 1, replace=False) if count > 1 else np.empty(0, dtype=int)
    slots = [(recency, 0)]
    for raw in extra:
        day, slot = divmod(int(raw) + 1, _SLOTS_PER_DAY)
        slots.append((recency + day, slot))
    return recency, slots


def _session_events(
    rng: np.random.Generator,
    spec: ArchetypeSpec,
    user_id: str,
    start: datetime,
    platform: Platform,
) -> list[UserEvent]:
    """One session's events: a visit marker plus Bernoulli-gated activity
    bursts, at fixed 15-second spacing."""
    kinds: list[EventType] = [EventType.OTHER_VISIT]
    active = rng.random(5) < np.array(spec.activity_probs)
    if active[0]:
        kinds.append(EventType.FILTER_APPLIED)
    if active[1]:
        kinds.extend([EventType.PDP_VIEW] * (1 + int(rng.poisson(spec.mean_pdp_views - 1.0))))
    if active[3]:
        kinds.append(EventType.CRF_OPENED)
    if active[2]:
        kinds.extend([EventType.LEAD_DROPPED] * (1 + int(rng.poisson(spec.mean_leads - 1.0))))
    if active[4]:
        kinds.append(EventType.SHORTLISTED)
    return [
        UserEvent(user_id, start + i * _EVENT_SPACING, kind, platform)
        for i, kind in enumerate(kinds)
    ]


def generate(
    specs: Sequence[ArchetypeSpec],
    n_users: int,
    window: WindowSpec,
    seed: int,
    platform: Platform = Platform.APP,
) -> tuple[EventLog, dict[str, Segment]]:
    """Generate (EventLog, ground truth). Deterministic given seed; every
    user has at least one in-window session and all events fall inside
    the window span."""
    if n_users < 1:
        raise InvalidSpec("n_users must be >= 1")
    validate_specs(specs, window)
    counts = apportion([s.user_share for s in specs], n_users)
    id_width = max(6, len(str(n_users - 1)))
    children = np.random.SeedSequence(seed).spawn(n_users)

    events: list[UserEvent] = []
    truth: dict[str, Segment] = {}
    user_index = 0
    for spec, count in zip(specs, counts):
        for _ in range(count):
            user_id = f"u{user_index:0{id_width}d}"
            rng = np.random.Generator(np.random.PCG64(children[user_index]))
            _, slots = _user_sessions(rng, spec, window)
            user_events: list[UserEvent] = []
            for day_offset, slot in slots:
                day = window.reference_date - timedelta(days=day_offset)
                start = datetime.combine(
                    day, time(hour=_SLOT_HOURS[slot]), tzinfo=timezone.utc
                )
                user_events.extend(_session_events(rng, spec, user_id, start, platform))
            user_events.sort(key=lambda e: e.timestamp)
            events.extend(user_events)
            truth[user_id] = spec.name
            user_index += 1
    return EventLog.from_events(events), truth


def write_truth_csv(truth: Mapping[str, Segment], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["user_id", "segment"])
        for user_id in sorted(truth):
            writer.writerow([user_id, truth[user_id].value])


def read_labels_csv(path) -> dict[str, str]:
    """Read user-to-segment labels from any CSV carrying `user_id` and
    `segment` columns (truth files, segment reports, scatter exports)."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or "user_id" not in header or "segment" not in header:
            raise ConfigInvalid(f"{path}: expected user_id and segment columns")
        uid_col = header.index("user_id")
        seg_col = header.index("segment")
        return {row[uid_col]: row[seg_col] for row in reader if row}


_SEGMENT_TOKENS = {
    "high_value": Segment.HIGH_VALUE,
    "promising": Segment.PROMISING,
    "needs_attention": Segment.NEEDS_ATTENTION,
    "needs_activation": Segment.NEEDS_ACTIVATION,
}

_ARCH_FIELDS = (
    "share",
    "visit_rate",
    "recency_lo",
    "recency_hi",
    "p_filter",
    "p_pdp",
    "p_lead",
    "p_crf",
    "p_shortlist",
    "mean_pdp_views",
    "mean_leads",
)


@dataclass(frozen=True)
class SynthConfig:
    specs: tuple[ArchetypeSpec, ...]
    n_users: int
    seed: int
    reference_date: date
    window_days: int = 45
    platform: str = "app"
    format: str = "csv"

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.reference_date, self.window_days)


def parse_synth_spec(path, overrides: dict[str, object] | None = None) -> SynthConfig:
    """Read a generator spec file: top-level run keys plus dotted
    `archetype.<name>.<field>` keys."""
    raw = parse_kv_file(path)
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}

    arch_raw: dict[str, dict[str, str]] = {}
    top: dict[str, str] = {}
    for key, value in raw.items():
        if key.startswith("archetype."):
            parts = key.split(".")
            if len(parts) != 3:
                raise ConfigInvalid(f"bad archetype key: {key!r}")
            _, name, field_name = parts
            if name not in _SEGMENT_TOKENS:
                raise ConfigInvalid(f"unknown archetype name: {name!r}")
            if field_name not in _ARCH_FIELDS:
                raise ConfigInvalid(f"unknown archetype field: {field_name!r}")
            arch_raw.setdefault(name, {})[field_name] = value
        else:
            top[key] = value

    specs = []
    for name, fields_raw in arch_raw.items():
        missing = set(_ARCH_FIELDS) - set(fields_raw)
        if missing:
            raise ConfigInvalid(f"archetype {name}: missing fields {sorted(missing)}")
        try:
            specs.append(
                ArchetypeSpec(
                    name=_SEGMENT_TOKENS[name],
                    user_share=float(fields_raw["share"]),
                    visit_rate=float(fields_raw["visit_rate"]),
                    recency_lo=int(fields_raw["recency_lo"]),
                    recency_hi=int(fields_raw["recency_hi"]),
                    p_filter=float(fields_raw["p_filter"]),
                    p_pdp=float(fields_raw["p_pdp"]),
                    p_lead=float(fields_raw["p_lead"]),
                    p_crf=float(fields_raw["p_crf"]),
                    p_shortlist=float(fields_raw["p_shortlist"]),
                    mean_pdp_views=float(fields_raw["mean_pdp_views"]),
                    mean_leads=float(fields_raw["mean_leads"]),
                )
            )
        except ValueError:
            raise ConfigInvalid(f"archetype {name}: unparseable numeric field")
    if not specs:
        specs = list(DEFAULT_ARCHETYPES)

    def pick(key, parser, default=None, required=False):
        if key in overrides:
            value = overrides[key]
            if not isinstance(value, str):
                return value
            source = value
        elif key in top:
            source = top[key]
        else:
            if required:
                raise ConfigInvalid(f"generator spec is missing required key: {key}")
            return default
        try:
            return parser(source)
        except ValueError:
            raise ConfigInvalid(f"{key}: cannot parse {source!r}")

    config = SynthConfig(
        specs=tuple(specs),
        n_users=pick("n_users", int, required=True),
        seed=pick("seed", int, required=True),
        reference_date=pick("reference_date", date.fromisoformat, required=True),
        window_days=pick("window_days", int, default=45),
        platform=pick("platform", str, default="app"),
        format=pick("format", str, default="csv"),
    )
    if config.platform not in ("web", "app"):
        raise ConfigInvalid("platform must be web or app")
    if config.format not in ("csv", "jsonl"):
        raise ConfigInvalid("format must be csv or jsonl")
    return config


def write_synth_spec(config: SynthConfig, path) -> None:
    """Write a spec file that parse_synth_spec reads back identically."""
    lines = [
        f"n_users = {config.n_users}",
        f"seed = {config.seed}",
        f"reference_date = {config.reference_date.isoformat()}",
        f"window_days = {config.window_days}",
        f"platform = {config.platform}",
        f"format = {config.format}",
    ]
    token_by_segment = {seg: tok for tok, seg in _SEGMENT_TOKENS.items()}
    for spec in config.specs:
        name = token_by_segment[spec.name]
        values = {
            "share": spec.user_share,
            "visit_rate": spec.visit_rate,
            "recency_lo": spec.recency_lo,
            "recency_hi": spec.recency_hi,
            "p_filter": spec.p_filter,
            "p_pdp": spec.p_pdp,
            "p_lead": spec.p_lead,
            "p_crf": spec.p_crf,
            "p_shortlist": spec.p_shortlist,
            "mean_pdp_views": spec.mean_pdp_views,
            "mean_leads": spec.mean_leads,
        }
        for field_name in _ARCH_FIELDS:
            lines.append(f"archetype.{name}.{field_name} = {values[field_name]}")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
