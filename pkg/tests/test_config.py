"""Key-value config parsing, typing, validation, and overrides."""

from __future__ import annotations

from datetime import date, timedelta

import pytest

from rfme.config import (
    RunConfig,
    build_run_config,
    parse_kv_file,
    require_test_span,
    require_train_span,
    validate_config,
)
from rfme.errors import ConfigInvalid, InputIoError


def write(tmp_path, text):
    path = tmp_path / "run.conf"
    path.write_text(text)
    return path


def test_parse_kv_file(tmp_path):
    path = write(
        tmp_path,
        "# a comment\n"
        "input = events.csv\n"
        "\n"
        "window_days = 30  # trailing comment\n",
    )
    assert parse_kv_file(path) == {"input": "events.csv", "window_days": "30"}


def test_parse_kv_rejects_garbage(tmp_path):
    path = write(tmp_path, "input events.csv\n")
    with pytest.raises(ConfigInvalid) as err:
        parse_kv_file(path)
    assert ":1:" in str(err.value)


def test_parse_kv_missing_file(tmp_path):
    with pytest.raises(InputIoError):
        parse_kv_file(tmp_path / "absent.conf")


def test_defaults():
    config = build_run_config({"input": "x.csv"})
    assert config.window_days == 45
    assert config.gap_minutes == 30
    assert config.pdp_weight == 1
    assert config.lead_weight == 7
    assert config.k is None
    assert (config.k_min, config.k_max) == (1, 7)
    assert config.n_init == 10
    assert config.standardize is True
    assert config.gap == timedelta(minutes=30)


def test_typing_from_strings():
    config = build_run_config(
        {
            "input": "x.csv",
            "train_start": "2022-01-01",
            "train_end": "2022-01-20",
            "k": "4",
            "tol": "1e-5",
            "standardize": "false",
        }
    )
    assert config.train_start == date(2022, 1, 1)
    assert config.k == 4
    assert config.tol == 1e-5
    assert config.standardize is False


def test_unknown_key_rejected():
    with pytest.raises(ConfigInvalid):
        build_run_config({"input": "x.csv", "clusters": "4"})


def test_missing_input_rejected():
    with pytest.raises(ConfigInvalid):
        build_run_config({"window_days": "45"})


def test_unparseable_value_rejected():
    with pytest.raises(ConfigInvalid):
        build_run_config({"input": "x.csv", "window_days": "six"})
    with pytest.raises(ConfigInvalid):
        build_run_config({"input": "x.csv", "train_start": "01/02/2022"})
    with pytest.raises(ConfigInvalid):
        build_run_config({"input": "x.csv", "standardize": "maybe"})


def test_overrides_win_and_are_typed():
    config = build_run_config(
        {"input": "x.csv", "window_days": "45"},
        {"window_days": "20", "k": 3, "seed": None},
    )
    assert config.window_days == 20
    assert config.k == 3
    assert config.seed is None


def test_unknown_override_rejected():
    with pytest.raises(ConfigInvalid):
        build_run_config({"input": "x.csv"}, {"clusters": "4"})


@pytest.mark.parametrize(
    "patch",
    [
        {"format": "xml"},
        {"platform": "desktop"},
        {"window_days": "0"},
        {"gap_minutes": "0"},
        {"pdp_weight": "0"},
        {"k_min": "0"},
        {"k_min": "5", "k_max": "3"},
        {"k": "0"},
        {"n_init": "0"},
        {"max_iter": "0"},
        {"tol": "-1"},
        {"workers": "0"},
    ],
)
def test_validation_rejections(patch):
    raw = {"input": "x.csv"}
    raw.update(patch)
    with pytest.raises(ConfigInvalid):
        build_run_config(raw)


def test_span_validation():
    with pytest.raises(ConfigInvalid):
        build_run_config({"input": "x.csv", "train_start": "2022-01-10"})
    with pytest.raises(ConfigInvalid):
        build_run_config(
            {"input": "x.csv", "train_start": "2022-01-10", "train_end": "2022-01-05"}
        )
    with pytest.raises(ConfigInvalid):
        build_run_config(
            {
                "input": "x.csv",
                "train_start": "2022-01-01",
                "train_end": "2022-01-20",
                "test_start": "2022-01-20",
                "test_end": "2022-01-31",
            }
        )


def test_train_and_test_requirements():
    config = build_run_config(
        {
            "input": "x.csv",
            "train_start": "2022-01-01",
            "train_end": "2022-01-20",
            "seed": "5",
        }
    )
    require_train_span(config)
    with pytest.raises(ConfigInvalid):
        require_test_span(config)

    no_seed = build_run_config(
        {"input": "x.csv", "train_start": "2022-01-01", "train_end": "2022-01-20"}
    )
    with pytest.raises(ConfigInvalid):
        require_train_span(no_seed)


def test_validate_config_direct():
    validate_config(RunConfig(input="x.csv"))
    with pytest.raises(ConfigInvalid):
        validate_config(RunConfig(input="x.csv", platform="tv"))
