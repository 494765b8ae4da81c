"""Command-line interface.

Subcommands: train, score, synth, eval. Train and score read a flat
key = value config file; every config key can be overridden by a flag
of the same name (both --window-days and --window_days are accepted).
"""

from __future__ import annotations

import json
import sys

import click

from .config import build_run_config, parse_kv_file
from .errors import RfmeError
from .pipeline import run_eval, run_score, run_synth, run_train
from .synth import parse_synth_spec


def _fail(err: Exception) -> None:
    click.echo(f"error: {type(err).__name__}: {err}", err=True)
    sys.exit(1)


def _run_options(command):
    """Attach one override flag per run-config key."""
    opts = [
        click.option("--input", "input", default=None, help="Event log path."),
        click.option("--format", "format", default=None, help="Log format: csv or jsonl."),
        click.option("--platform", default=None, help="Platform filter: web, app, or both."),
        click.option("--train-start", "--train_start", "train_start", default=None),
        click.option("--train-end", "--train_end", "train_end", default=None),
        click.option("--test-start", "--test_start", "test_start", default=None),
        click.option("--test-end", "--test_end", "test_end", default=None),
        click.option("--window-days", "--window_days", "window_days", default=None),
        click.option("--gap-minutes", "--gap_minutes", "gap_minutes", default=None),
        click.option("--pdp-weight", "--pdp_weight", "pdp_weight", default=None),
        click.option("--lead-weight", "--lead_weight", "lead_weight", default=None),
        click.option("--k", default=None, help="Fixed cluster count; omit for auto elbow."),
        click.option("--k-min", "--k_min", "k_min", default=None),
        click.option("--k-max", "--k_max", "k_max", default=None),
        click.option("--seed", default=None, help="PRNG seed; required for train."),
        click.option("--n-init", "--n_init", "n_init", default=None),
        click.option("--max-iter", "--max_iter", "max_iter", default=None),
        click.option("--tol", default=None),
        click.option("--standardize", default=None, help="true or false."),
        click.option("--workers", default=None),
        click.option("--out-dir", "--out_dir", "out_dir", default=None),
    ]
    for opt in reversed(opts):
        command = opt(command)
    return command


def _load_config(config_path: str, overrides: dict):
    raw = parse_kv_file(config_path)
    return build_run_config(raw, overrides)


@click.group()
def main() -> None:
    """RFME segmentation pipeline: features, clustering, labeling."""


@main.command()
@click.option("--config", required=True, type=click.Path(), help="Key = value config file.")
@_run_options
def train(config: str, **overrides) -> None:
    """Fit segments on the train span and write all artifacts."""
    try:
        cfg = _load_config(config, overrides)
        model, report = run_train(cfg)
    except RfmeError as err:
        _fail(err)
        return
    click.echo(f"selected k: {model.k}")
    for row in report["train"]["segments"]:
        click.echo(f"  {row['segment']}: {row['count']} users")
    click.echo(f"artifacts written to {cfg.out_dir}")


@main.command()
@click.option("--config", required=True, type=click.Path(), help="Key = value config file.")
@click.option("--model", "model_path", required=True, type=click.Path(), help="Trained model.json.")
@_run_options
def score(config: str, model_path: str, **overrides) -> None:
    """Assign test-span users with a trained model."""
    try:
        cfg = _load_config(config, overrides)
        report = run_score(cfg, model_path)
    except RfmeError as err:
        _fail(err)
        return
    for row in report["test"]["segments"]:
        click.echo(f"  {row['segment']}: {row['count']} users")
    click.echo(f"artifacts written to {cfg.out_dir}")


@main.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(), help="Generator spec file.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--n-users", "--n_users", "n_users", default=None)
@click.option("--seed", default=None)
@click.option("--reference-date", "--reference_date", "reference_date", default=None)
@click.option("--window-days", "--window_days", "window_days", default=None)
@click.option("--platform", default=None)
@click.option("--format", "format", default=None)
def synth(spec_path: str, out_dir: str, **overrides) -> None:
    """Generate a labeled synthetic event corpus."""
    try:
        cfg = parse_synth_spec(spec_path, overrides)
        events_path, truth_path = run_synth(cfg, out_dir)
    except RfmeError as err:
        _fail(err)
        return
    click.echo(f"events: {events_path}")
    click.echo(f"truth: {truth_path}")


@main.command("eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(), help="Predicted user_id,segment CSV.")
@click.option("--truth", "truth_path", required=True, type=click.Path(), help="Ground-truth user_id,segment CSV.")
def eval_cmd(pred_path: str, truth_path: str) -> None:
    """Score predicted segments against ground truth (ARI and purity)."""
    try:
        result = run_eval(pred_path, truth_path)
    except RfmeError as err:
        _fail(err)
        return
    click.echo(json.dumps(result, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
