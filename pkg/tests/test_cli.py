"""The rfme command group end to end via click's test runner."""

from __future__ import annotations

import json
from datetime import date

import pytest
from click.testing import CliRunner

from rfme.cli import main
from rfme.clustering import load_model
from rfme.events import write_event_log
from rfme.features import WindowSpec
from rfme.synth import DEFAULT_ARCHETYPES, generate


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workspace(tmp_path):
    window = WindowSpec(date(2022, 3, 1), 45)
    log, _ = generate(DEFAULT_ARCHETYPES, 150, window, seed=20)
    events = tmp_path / "events.csv"
    write_event_log(log, events)
    config = tmp_path / "run.conf"
    config.write_text(
        f"input = {events}\n"
        "platform = app\n"
        "train_start = 2022-01-16\n"
        "train_end = 2022-03-01\n"
        "k = 4\n"
        "seed = 6\n"
        f"out_dir = {tmp_path / 'out'}\n"
    )
    return tmp_path, config


def test_train_happy_path(runner, workspace):
    tmp_path, config = workspace
    result = runner.invoke(main, ["train", "--config", str(config)])
    assert result.exit_code == 0, result.output
    assert "selected k: 4" in result.output
    assert (tmp_path / "out" / "model.json").exists()


def test_train_without_seed_fails_cleanly(runner, workspace):
    tmp_path, config = workspace
    stripped = "".join(
        line for line in config.read_text().splitlines(keepends=True)
        if not line.startswith("seed")
    )
    config.write_text(stripped)
    result = runner.invoke(main, ["train", "--config", str(config)])
    assert result.exit_code == 1
    assert "seed" in result.output


def test_flag_overrides_config(runner, workspace):
    tmp_path, config = workspace
    out2 = tmp_path / "out2"
    result = runner.invoke(
        main,
        ["train", "--config", str(config), "--k", "2", "--out-dir", str(out2)],
    )
    assert result.exit_code == 0, result.output
    assert load_model(out2 / "model.json").k == 2


def test_underscore_flag_spelling_accepted(runner, workspace):
    tmp_path, config = workspace
    out3 = tmp_path / "out3"
    result = runner.invoke(
        main,
        ["train", "--config", str(config), "--out_dir", str(out3), "--window_days", "30"],
    )
    assert result.exit_code == 0, result.output
    report = json.loads((out3 / "run_report.json").read_text())
    assert report["train"]["window"]["configured_days"] == 30


def test_invalid_config_value_fails_cleanly(runner, workspace):
    _, config = workspace
    result = runner.invoke(main, ["train", "--config", str(config), "--platform", "tv"])
    assert result.exit_code == 1
    assert "ConfigInvalid" in result.output


def test_missing_input_file_fails_cleanly(runner, workspace):
    tmp_path, config = workspace
    result = runner.invoke(
        main, ["train", "--config", str(config), "--input", str(tmp_path / "nope.csv")]
    )
    assert result.exit_code == 1
    assert "InputIoError" in result.output


def test_score_and_eval_flow(runner, tmp_path):
    train_window = WindowSpec(date(2022, 3, 1), 45)
    test_window = WindowSpec(date(2022, 4, 20), 45)
    train_log, _ = generate(DEFAULT_ARCHETYPES, 150, train_window, seed=21)
    test_log, test_truth = generate(DEFAULT_ARCHETYPES, 150, test_window, seed=22)
    events = tmp_path / "events.csv"
    write_event_log(list(train_log) + list(test_log), events)

    from rfme.synth import write_truth_csv

    truth_path = tmp_path / "truth.csv"
    write_truth_csv(test_truth, truth_path)

    out = tmp_path / "out"
    config = tmp_path / "run.conf"
    config.write_text(
        f"input = {events}\n"
        "platform = app\n"
        "train_start = 2022-01-16\n"
        "train_end = 2022-03-01\n"
        "test_start = 2022-03-07\n"
        "test_end = 2022-04-20\n"
        "k = 4\n"
        "seed = 6\n"
        f"out_dir = {out}\n"
    )
    runner = CliRunner()
    assert runner.invoke(main, ["train", "--config", str(config)]).exit_code == 0

    result = runner.invoke(
        main, ["score", "--config", str(config), "--model", str(out / "model.json")]
    )
    assert result.exit_code == 0, result.output
    assert (out / "segments_test.csv").exists()

    result = runner.invoke(
        main,
        [
            "eval",
            "--pred", str(out / "scatter_rf_test.csv"),
            "--truth", str(truth_path),
        ],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert set(payload) == {"ari", "purity", "n"}
    assert payload["n"] == 150


def test_score_missing_model_fails_cleanly(runner, workspace):
    tmp_path, config = workspace
    result = runner.invoke(
        main,
        ["score", "--config", str(config), "--model", str(tmp_path / "no.json"),
         "--test-start", "2022-03-07", "--test-end", "2022-04-20"],
    )
    assert result.exit_code == 1
    assert "ModelMissing" in result.output


def test_synth_subcommand(runner, tmp_path):
    spec = tmp_path / "gen.spec"
    spec.write_text("n_users = 30\nseed = 3\nreference_date = 2022-03-01\n")
    result = runner.invoke(
        main, ["synth", "--spec", str(spec), "--out", str(tmp_path / "gen")]
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "gen" / "events.csv").exists()
    assert (tmp_path / "gen" / "truth.csv").exists()


def test_synth_overrides(runner, tmp_path):
    spec = tmp_path / "gen.spec"
    spec.write_text("n_users = 30\nseed = 3\nreference_date = 2022-03-01\n")
    result = runner.invoke(
        main,
        ["synth", "--spec", str(spec), "--out", str(tmp_path / "gen"),
         "--n-users", "5", "--format", "jsonl"],
    )
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "gen" / "events.jsonl").read_text().splitlines()
    users = {json.loads(line)["user_id"] for line in lines}
    assert len(users) == 5


def test_help_lists_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for sub in ("train", "score", "synth", "eval"):
        assert sub in result.output
