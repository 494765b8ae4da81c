"""Run configuration: flat key-value files plus CLI overrides.

Config files are plain text, one ``key = value`` per line, ``#`` for
comments. Every key can be overridden by the CLI flag of the same name
(underscores become dashes). Dotted keys are allowed; the generator uses
them for archetype parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from datetime import date, timedelta

from .errors import ConfigInvalid, InputIoError


def parse_kv_file(path) -> dict[str, str]:
    """Parse a flat key-value document into raw strings."""
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise InputIoError(f"cannot read {path}: {exc}")
    out: dict[str, str] = {}
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalid(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _parse_date(value: str, key: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError:
        raise ConfigInvalid(f"{key}: expected YYYY-MM-DD, got {value!r}")


def _parse_bool(value: str, key: str) -> bool:
    token = value.strip().lower()
    if token in ("true", "1", "yes", "on"):
        return True
    if token in ("false", "0", "no", "off"):
        return False
    raise ConfigInvalid(f"{key}: expected a boolean, got {value!r}")


@dataclass
class RunConfig:
    input: str
    format: str = "csv"
    platform: str = "both"
    train_start: date | None = None
    train_end: date | None = None
    test_start: date | None = None
    test_end: date | None = None
    window_days: int = 45
    gap_minutes: int = 30
    pdp_weight: int = 1
    lead_weight: int = 7
    k: int | None = None  # None = auto elbow over [k_min, k_max]
    k_min: int = 1
    k_max: int = 7
    seed: int | None = None
    n_init: int = 10
    max_iter: int = 300
    tol: float = 1e-4
    standardize: bool = True
    workers: int = 1
    out_dir: str = "."

    @property
    def gap(self) -> timedelta:
        return timedelta(minutes=self.gap_minutes)


_PARSERS = {
    "input": str,
    "format": str,
    "platform": str,
    "train_start": _parse_date,
    "train_end": _parse_date,
    "test_start": _parse_date,
    "test_end": _parse_date,
    "window_days": int,
    "gap_minutes": int,
    "pdp_weight": int,
    "lead_weight": int,
    "k": int,
    "k_min": int,
    "k_max": int,
    "seed": int,
    "n_init": int,
    "max_iter": int,
    "tol": float,
    "standardize": _parse_bool,
    "workers": int,
    "out_dir": str,
}


def _parse_value(key: str, text: str) -> object:
    parser = _PARSERS[key]
    try:
        return parser(text, key) if parser in (_parse_date, _parse_bool) else parser(text)
    except ConfigInvalid:
        raise
    except ValueError:
        raise ConfigInvalid(f"{key}: cannot parse {text!r}")


def build_run_config(raw: dict[str, str], overrides: dict[str, object] | None = None) -> RunConfig:
    """Typed RunConfig from raw file strings plus overrides (CLI flags
    win over the file). String overrides are parsed like file values;
    already-typed overrides are taken as-is."""
    known = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigInvalid(f"unknown config keys: {sorted(unknown)}")
    values: dict[str, object] = {}
    for key, text in raw.items():
        values[key] = _parse_value(key, text)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ConfigInvalid(f"unknown override: {key}")
        values[key] = _parse_value(key, value) if isinstance(value, str) else value
    if "input" not in values:
        raise ConfigInvalid("config is missing required key: input")
    config = RunConfig(**values)
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    if config.format not in ("csv", "jsonl"):
        raise ConfigInvalid(f"format must be csv or jsonl, got {config.format!r}")
    if config.platform not in ("web", "app", "both"):
        raise ConfigInvalid(f"platform must be web, app, or both, got {config.platform!r}")
    if config.window_days < 1:
        raise ConfigInvalid("window_days must be >= 1")
    if config.gap_minutes <= 0:
        raise ConfigInvalid("gap_minutes must be positive")
    if config.pdp_weight <= 0 or config.lead_weight <= 0:
        raise ConfigInvalid("monetary weights must be positive")
    if not 1 <= config.k_min <= config.k_max:
        raise ConfigInvalid("need 1 <= k_min <= k_max")
    if config.k is not None and config.k < 1:
        raise ConfigInvalid("k must be >= 1")
    if config.n_init < 1 or config.max_iter < 1:
        raise ConfigInvalid("n_init and max_iter must be >= 1")
    if config.tol < 0:
        raise ConfigInvalid("tol must be >= 0")
    if config.workers < 1:
        raise ConfigInvalid("workers must be >= 1")
    for name in ("train", "test"):
        start = getattr(config, f"{name}_start")
        end = getattr(config, f"{name}_end")
        if (start is None) != (end is None):
            raise ConfigInvalid(f"{name} span needs both start and end")
        if start is not None and start > end:
            raise ConfigInvalid(f"{name} span is empty: {start} > {end}")
    if config.train_end is not None and config.test_start is not None:
        if config.train_end >= config.test_start:
            raise ConfigInvalid("train end must precede test start")


def require_train_span(config: RunConfig) -> None:
    if config.train_start is None:
        raise ConfigInvalid("training requires train_start and train_end")
    if config.seed is None:
        raise ConfigInvalid("training requires an explicit seed")


def require_test_span(config: RunConfig) -> None:
    if config.test_start is None:
        raise ConfigInvalid("scoring requires test_start and test_end")
