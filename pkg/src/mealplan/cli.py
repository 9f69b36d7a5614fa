"""Command-line interface: validate, stats, simulate, recommend, serve.

Exit codes: 0 success, 1 validation or domain failure, 2 I/O or config
failure. Subcommands that use randomness honor --seed; when omitted a seed
is drawn and printed so the run can be reproduced.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import warnings
from pathlib import Path

import click
import numpy as np

from .bandits import BanditParams, BanditState, FeatureSchema, bandit_train
from .domain import default_day_config, horizon_bounds, plan_to_json, profile_from_json
from .metrics import score_plan
from .recipes import (
    DatasetError,
    DatasetFormatError,
    SchemaViolationError,
    dataset_stats,
    fixture_path,
    load_dataset,
    round_half_up,
)
from .recommend import RecommenderKind, SequentialState, recommend
from .simulate import (
    ExperimentSpec,
    emit_report,
    run_experiment,
    run_manifest,
)

EXIT_VALIDATION = 1
EXIT_IO = 2


def _load_or_exit(path: str, mode: str = "full"):
    try:
        return load_dataset(path, mode=mode)
    except OSError as err:
        click.echo(f"error: cannot read {path}: {err}", err=True)
        sys.exit(EXIT_IO)
    except DatasetFormatError as err:
        click.echo(f"parse error: {err}", err=True)
        sys.exit(EXIT_VALIDATION)
    except SchemaViolationError as err:
        for v in err.violations:
            click.echo(v, err=True)
        sys.exit(EXIT_VALIDATION)


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = int.from_bytes(os.urandom(4), "little")
        click.echo(f"seed: {seed}")
    return seed


@click.group()
@click.version_option(package_name="mealplan")
def main():
    """Meal plan recommendation toolkit."""


@main.command()
@click.argument("dataset_path", type=click.Path())
@click.option("--mode", type=click.Choice(["full", "metadata-only"]), default="full")
def validate(dataset_path, mode):
    """Validate a recipe dataset file; exit 0 when clean."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        ds = _load_or_exit(dataset_path, mode)
    for w in caught:
        click.echo(f"warning: {w.message}")
    click.echo(f"{len(ds)} recipes OK")


@main.command()
@click.argument("dataset_path", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
@click.option("--category", default=None, help="Restrict to one category.")
def stats(dataset_path, fmt, category):
    """Per-category flag percentages and recipe counts."""
    ds = _load_or_exit(dataset_path)
    rows = dataset_stats(ds)
    if category is not None:
        rows = [r for r in rows if r.category == category]
        if not rows:
            click.echo(f"error: no recipes in category {category!r}", err=True)
            sys.exit(EXIT_VALIDATION)
    if fmt == "json":
        click.echo(
            json.dumps(
                [{"category": r.category, "count": r.count, "pct": dict(r.pct)} for r in rows],
                indent=1,
            )
        )
        return
    flags = list(ds.flag_names)
    header = ["category"] + [f"{f} %" for f in flags] + ["recipes"]
    table = [
        [r.category] + [f"{r.pct[f]:.2f}" for f in flags] + [str(r.count)]
        for r in rows
    ]
    widths = [max(len(header[i]), *(len(row[i]) for row in table)) for i in range(len(header))]
    click.echo("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip())
    for row in table:
        click.echo("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="Experiment spec JSON; defaults to the standard grid.")
@click.option("--dataset", "dataset_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--algorithms", default=None, help="Comma-separated subset, e.g. 'sequential'.")
@click.option("--seed", type=int, default=None, help="Override the experiment's base seed.")
@click.option("--replications", type=int, default=None)
@click.option("--workers", type=int, default=None,
              help="Parallel cell processes; defaults to the CPU count.")
def simulate(config_path, dataset_path, out_dir, algorithms, seed, replications, workers):
    """Run the experiment grid and write csv + json + run manifest."""
    if config_path is not None:
        try:
            doc = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as err:
            click.echo(f"error: cannot read {config_path}: {err}", err=True)
            sys.exit(EXIT_IO)
        except json.JSONDecodeError as err:
            click.echo(f"parse error in {config_path}: {err}", err=True)
            sys.exit(EXIT_VALIDATION)
        spec = ExperimentSpec.from_json(doc)
    else:
        spec = ExperimentSpec()
    overrides = {}
    if algorithms is not None:
        try:
            overrides["algorithms"] = tuple(
                RecommenderKind(tok.strip()) for tok in algorithms.split(",") if tok.strip()
            )
        except ValueError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(EXIT_VALIDATION)
    if seed is not None:
        overrides["base_seed"] = seed
    if replications is not None:
        overrides["replications"] = replications
    if overrides:
        spec = ExperimentSpec.from_json({**spec.to_json(), **{
            k: (v if k != "algorithms" else [a.value for a in v]) for k, v in overrides.items()
        }})

    dataset_path = dataset_path or str(fixture_path())
    ds = _load_or_exit(dataset_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if workers is None:
        workers = os.cpu_count() or 1
    try:
        rows = run_experiment(spec, ds, default_day_config(), max_workers=workers)
    except DatasetError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_VALIDATION)

    (out / "results.csv").write_text(emit_report(rows, "csv"), encoding="utf-8")
    (out / "results.json").write_text(emit_report(rows, "json"), encoding="utf-8")
    sha = hashlib.sha256(Path(dataset_path).read_bytes()).hexdigest()
    manifest = run_manifest(spec, dataset_path, sha)
    (out / "run-manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(rows)} rows to {out}/results.csv")


@main.command()
@click.option("--profile", "profile_path", type=click.Path(), required=True)
@click.option("--days", type=int, required=True)
@click.option("--algo", type=click.Choice([k.value for k in RecommenderKind]), default="random")
@click.option("--seed", type=int, default=None)
@click.option("--dataset", "dataset_path", type=click.Path(), default=None)
@click.option("--episodes", type=int, default=200, help="Bandit training episodes.")
def recommend_cmd(profile_path, days, algo, seed, dataset_path, episodes):
    """Generate one plan for a profile and print it with its scores."""
    low, high = horizon_bounds()
    if not (low <= days <= high):
        click.echo(f"error: --days must be within [{low}, {high}]", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        doc = json.loads(Path(profile_path).read_text(encoding="utf-8"))
    except OSError as err:
        click.echo(f"error: cannot read {profile_path}: {err}", err=True)
        sys.exit(EXIT_IO)
    except json.JSONDecodeError as err:
        click.echo(f"parse error in {profile_path}: {err}", err=True)
        sys.exit(EXIT_VALIDATION)
    try:
        profile = profile_from_json(doc)
    except ValueError as err:
        click.echo(f"invalid profile: {err}", err=True)
        sys.exit(EXIT_VALIDATION)

    ds = _load_or_exit(dataset_path or str(fixture_path()))
    cfg = default_day_config()
    seed = _resolve_seed(seed)
    rng = np.random.default_rng(seed)
    kind = RecommenderKind(algo)

    state = None
    if kind is RecommenderKind.SEQUENTIAL:
        state = SequentialState()
    elif kind is RecommenderKind.BANDIT:
        click.echo(f"training bandit: {episodes} episodes")
        state = BanditState(FeatureSchema.for_dataset(ds), BanditParams(), seed=seed)
        bandit_train(state, ds, cfg, [profile], episodes=episodes, horizon=days)

    try:
        plan = recommend(kind, ds, cfg, profile, days, state=state, rng=rng)
    except DatasetError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_VALIDATION)
    report = score_plan(plan, ds, cfg, profile)

    for d, day in enumerate(plan_to_json(plan, cfg)["days"]):
        click.echo(f"day {d + 1}:")
        for meal in day:
            names = ", ".join(f"{rid} ({ds.get(rid).name})" for rid in meal["recipe_ids"])
            click.echo(f"  {meal['meal']}: {names}")
    click.echo("scores:")
    for name, value in (
        ("dm", report.dm), ("mc", report.mc), ("uc", report.uc), ("G", report.G),
    ):
        click.echo(f"  {name}: {round_half_up(value, 4):.4f}")
    for name in ("uc_dm", "uc_mc", "dm_mc", "uc_dm_mc"):
        click.echo(f"  {name}: {round_half_up(report.combos[name], 4):.4f}")


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
def serve(config_path):
    """Run the HTTP service."""
    import uvicorn

    from .service import ServiceConfig, create_app

    try:
        config = ServiceConfig.load(config_path)
        app = create_app(config)
    except (OSError, DatasetError, json.JSONDecodeError, ValueError) as err:
        click.echo(f"startup failure: {err}", err=True)
        sys.exit(EXIT_IO)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    main()
