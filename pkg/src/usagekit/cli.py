"""Command-line entry points for every pipeline stage.

Each command is a thin wrapper over library calls; identical inputs produce
identical outputs to in-process use. Exit codes: 0 ok, 2 bad input,
3 internal error.
"""
from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Tuple

import click

from usagekit.errors import UsageKitError


def _runtime(ctx) -> "Runtime":
    from usagekit.service.runtime import Runtime, ServiceConfig

    params = ctx.obj
    return Runtime(
        ServiceConfig(
            data_root=params["data_root"],
            taxonomy_path=params["taxonomy"],
            screen_model_path=params["screen_model"],
            widget_model_path=params["widget_model"],
            k=params["k"],
            rec_threshold=params["rec_threshold"],
        )
    )


@click.group()
@click.option(
    "--data-root",
    type=click.Path(path_type=Path),
    default=Path("usagekit-data"),
    envvar="USAGEKIT_DATA",
    show_default=True,
    help="Directory holding analyzed recordings, models, and classifiers.",
)
@click.option(
    "--taxonomy",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="Category taxonomy TOML (defaults to the built-in one).",
)
@click.option(
    "--screen-model",
    type=click.Path(path_type=Path),
    default=None,
    help="Screen classifier file (default: DATA_ROOT/classifiers/screen.model).",
)
@click.option(
    "--widget-model",
    type=click.Path(path_type=Path),
    default=None,
    help="Widget classifier file (default: DATA_ROOT/classifiers/widget.model).",
)
@click.option("--k", type=int, default=5, show_default=True,
              help="Suggestions per prompt.")
@click.option("--rec-threshold", type=int, default=5, show_default=True,
              help="Stop adding recommendation tiers once this many are found.")
@click.pass_context
def cli(ctx, data_root, taxonomy, screen_model, widget_model, k, rec_threshold):
    """Turn screen recordings into usage models and guided UI tests."""
    ctx.obj = {
        "data_root": data_root,
        "taxonomy": taxonomy,
        "screen_model": screen_model,
        "widget_model": widget_model,
        "k": k,
        "rec_threshold": rec_threshold,
    }


# -- analysis -----------------------------------------------------------------


@cli.command()
@click.argument(
    "recording_dirs",
    nargs=-1,
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
)
@click.option("-o", "--out-root", type=click.Path(path_type=Path), default=None,
              help="Write under this directory instead of the data root.")
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Analyze this many recordings in parallel.")
@click.pass_context
def analyze(ctx, recording_dirs: Tuple[Path, ...], out_root, jobs):
    """Extract touch events and GUI triples from recording directories."""
    from usagekit.analyze import analyze_recording
    from usagekit.video.frames import recording_id

    root = out_root or (ctx.obj["data_root"] / "assets" / "recordings")

    def run(rec_dir: Path):
        rec_id = recording_id(rec_dir)
        return analyze_recording(rec_dir, root / rec_id)

    if jobs > 1 and len(recording_dirs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            summaries = list(pool.map(run, recording_dirs))
    else:
        summaries = [run(d) for d in recording_dirs]
    for s in summaries:
        click.echo(
            f"{s['recording_id']}: {s['events']} events, "
            f"{s['retained']} retained -> {root / s['recording_id']}"
        )


@cli.group()
def fixtures():
    """Synthetic apps, recordings, and labeled datasets."""


@fixtures.command("generate")
@click.argument(
    "spec_file", required=False,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
@click.option("-o", "--out", type=click.Path(path_type=Path),
              default=Path("fixtures"), show_default=True)
@click.option("--seed", type=int, default=None,
              help="Override the spec's RNG seed.")
def fixtures_generate(spec_file, out, seed):
    """Write a fixture tree: apps/, recordings/, truth/, datasets/."""
    import dataclasses

    from usagekit.fixtures.generate import (
        FixtureSpec,
        generate_fixture_tree,
        load_fixture_spec,
    )

    spec = load_fixture_spec(spec_file) if spec_file else FixtureSpec()
    if seed is not None:
        spec = dataclasses.replace(spec, seed=seed)
    manifest = generate_fixture_tree(spec, out)
    recs = manifest["recordings"]
    click.echo(
        f"{len(recs)} recordings over {len(spec.apps)} apps "
        f"(seed {spec.seed}) -> {out}"
    )


# -- classifiers ----------------------------------------------------------------


def _load_examples(dataset: Path, target: str):
    from usagekit.fixtures.generate import load_dataset

    examples = load_dataset(dataset)
    schema = examples[0].features.schema_id
    if not schema.startswith(target):
        raise click.UsageError(
            f"{dataset} holds {schema!r} features; expected a {target} dataset"
        )
    return examples


def _taxonomy_version(taxonomy_path: Optional[Path]) -> str:
    from usagekit.classify.taxonomy import default_taxonomy, load_taxonomy

    tax = load_taxonomy(taxonomy_path) if taxonomy_path else default_taxonomy()
    return tax.version


@cli.command()
@click.argument(
    "dataset", type=click.Path(exists=True, file_okay=False, path_type=Path)
)
@click.option("--kind", type=click.Choice(["knn", "linear"]), default="knn",
              show_default=True)
@click.option("--target", type=click.Choice(["screen", "widget"]), required=True)
@click.option("-o", "--out", type=click.Path(path_type=Path), default=None,
              help="Model file (default: DATA_ROOT/classifiers/TARGET.model).")
@click.option("--seed", type=int, default=7, show_default=True)
@click.pass_context
def train(ctx, dataset, kind, target, out, seed):
    """Fit a screen or widget classifier on a labeled dataset."""
    from usagekit.classify.models import TrainConfig, save_model
    from usagekit.classify.models import train as train_model

    examples = _load_examples(dataset, target)
    model = train_model(
        examples,
        kind,
        taxonomy_version=_taxonomy_version(ctx.obj["taxonomy"]),
        config=TrainConfig(seed=seed),
    )
    out = out or (ctx.obj["data_root"] / "classifiers" / f"{target}.model")
    save_model(model, out)
    click.echo(f"{kind} {target} classifier on {len(examples)} examples -> {out}")


@cli.command("eval-classifier")
@click.argument(
    "dataset", type=click.Path(exists=True, file_okay=False, path_type=Path)
)
@click.option("--loo", is_flag=True,
              help="Leave-one-app-out cross validation (the only mode).")
@click.option("--kind", type=click.Choice(["knn", "linear"]), default="knn",
              show_default=True)
@click.option("--target", type=click.Choice(["screen", "widget"]), required=True)
@click.option("-o", "--out", type=click.Path(path_type=Path), default=None,
              help="Accuracy CSV (default: DATASET.accuracy.csv).")
@click.pass_context
def eval_classifier(ctx, dataset, loo, kind, target, out):
    """Score a classifier with leave-one-app-out accuracy."""
    from usagekit.classify.evaluate import (
        evaluate_leave_one_app_out,
        write_accuracy_csv,
    )

    if not loo:
        raise click.UsageError("pass --loo; no other evaluation mode exists")
    examples = _load_examples(dataset, target)
    rows = evaluate_leave_one_app_out(
        examples, kind, taxonomy_version=_taxonomy_version(ctx.obj["taxonomy"])
    )
    out = out or dataset.with_suffix(".accuracy.csv")
    write_accuracy_csv(rows, out)
    for row in rows:
        click.echo(f"{row.app_id:>10}  top-{row.k}  {row.accuracy:.3f}")
    click.echo(f"-> {out}")


# -- models ------------------------------------------------------------------


@cli.command()
@click.argument("recording_id")
@click.option("--usage", required=True, help="Usage this recording demonstrates.")
@click.option("--auto-top1", is_flag=True,
              help="Accept every top-1 suggestion (simulates the developer).")
@click.pass_context
def label(ctx, recording_id, usage, auto_top1):
    """Label an analyzed recording and store its usage model."""
    if not auto_top1:
        raise click.UsageError(
            "interactive labeling lives in the web UI; pass --auto-top1"
        )
    runtime = _runtime(ctx)
    runtime.classifiers()  # fail early, before opening the session
    session = runtime.open_label_session(recording_id, usage)
    result = None
    for item in session.items:
        if not item.screen_suggestions:
            raise UsageKitError(
                f"no screen suggestion for item {item.index} of {recording_id}"
            )
        screen_label = item.screen_suggestions[0][0]
        widget_label = None
        if item.widget is not None:
            if not item.widget_suggestions:
                raise UsageKitError(
                    f"no widget suggestion for item {item.index} of {recording_id}"
                )
            widget_label = item.widget_suggestions[0][0]
        result = runtime.apply_label(session, screen_label, widget_label)
    click.echo(
        f"{len(session.items)} items auto-labeled -> model {result['model_id']}"
    )


@cli.command()
@click.option("--usage", required=True)
@click.pass_context
def merge(ctx, usage):
    """Merge every stored model for a usage and store the result."""
    runtime = _runtime(ctx)
    merged = runtime.db.merged_model(usage)
    model_id = runtime.db.store(merged)
    click.echo(
        f"{len(merged.provenance)} recordings, {len(merged.states)} states, "
        f"{len(merged.transitions)} transitions -> model {model_id}"
    )


# -- generation -----------------------------------------------------------------


def _greedy_session(usage, adapter, runtime):
    """Drive a session taking the top suggestion at every prompt."""
    from usagekit.errors import (
        NoMatchingState,
        NoRecommendation,
    )
    from usagekit.generate.session import (
        SessionStatus,
        choose_screen,
        choose_widget,
        fail_session,
        provide_text,
        start_session,
    )

    session = start_session(
        usage,
        adapter,
        runtime.db,
        runtime.classifiers(),
        k=runtime.config.k,
        rec_threshold=runtime.config.rec_threshold,
    )
    for _ in range(30):
        if session.status in (SessionStatus.COMPLETED, SessionStatus.FAILED):
            break
        if session.status is SessionStatus.AWAITING_SCREEN_CHOICE:
            for sugg in session.screen_suggestions:
                try:
                    choose_screen(session, sugg.name)
                    break
                except NoMatchingState:
                    continue
                except NoRecommendation:
                    break
            else:
                fail_session(session, "no suggested screen matches a model state")
        elif session.status is SessionStatus.AWAITING_WIDGET_CHOICE:
            choose_widget(session, session.recommendations[0].wid)
        elif session.status is SessionStatus.AWAITING_TEXT_INPUT:
            pending = session.pending
            provide_text(session, pending.widget.text or "input")
    else:
        fail_session(session, "no end state within 30 choices")
    return session


@cli.command()
@click.option("--usage", required=True)
@click.option("--adapter", "adapter_ref", required=True,
              help='Device adapter: "script:<app-file>" or "cmd:<command>".')
@click.option("--oracle", type=click.Path(exists=True, dir_okay=False,
                                          path_type=Path), default=None,
              help="Answer prompts from this ground-truth recording instead "
                   "of greedily taking top suggestions.")
@click.option("-o", "--out", type=click.Path(path_type=Path), default=None,
              help="Output directory (default: DATA_ROOT/generated/USAGE).")
@click.pass_context
def generate(ctx, usage, adapter_ref, oracle, out):
    """Generate a usage test by driving a device through the merged model."""
    from usagekit.generate.oracle import (
        oracle_inputs_from_truth,
        run_oracle_session,
        write_step_log,
    )
    from usagekit.generate.session import save_script, session_script
    from usagekit.fixtures.generate import load_truth

    runtime = _runtime(ctx)
    adapter = runtime.build_adapter(adapter_ref)
    out = out or (ctx.obj["data_root"] / "generated" / usage)
    out.mkdir(parents=True, exist_ok=True)

    if oracle:
        trace, wids, texts = oracle_inputs_from_truth(load_truth(oracle))
        result = run_oracle_session(
            usage,
            adapter,
            runtime.db,
            trace,
            runtime.classifiers(),
            wids=wids,
            texts=texts,
            k=runtime.config.k,
            rec_threshold=runtime.config.rec_threshold,
        )
        write_step_log(result.steps, out / "steps.csv")
        if result.completed:
            save_script(result.script, out / "script.toml")
            click.echo(
                f"Completed: {len(result.script.events)} events -> "
                f"{out / 'script.toml'}"
            )
        else:
            click.echo(f"Failed: {result.failure_reason} (log: {out / 'steps.csv'})")
        return

    session = _greedy_session(usage, adapter, runtime)
    if session.status.value == "Completed":
        script = session_script(session)
        save_script(script, out / "script.toml")
        click.echo(
            f"Completed: {len(script.events)} events -> {out / 'script.toml'}"
        )
    else:
        click.echo(f"Failed: {session.failure_reason}")


# -- reporting ---------------------------------------------------------------


@cli.command()
@click.argument(
    "run_dir", type=click.Path(exists=True, file_okay=False, path_type=Path)
)
@click.option("--truth-dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory of ground-truth recordings to compare against.")
@click.option("-o", "--out", type=click.Path(path_type=Path), default=None,
              help="Report CSV (default: RUN_DIR/report.csv).")
@click.option("--figure/--no-figure", default=True, show_default=True,
              help="Also render the metrics as a PNG next to the CSV.")
def report(run_dir, truth_dir, out, figure):
    """Score generated scripts against human traces (precision/recall table)."""
    from usagekit.fixtures.generate import load_truth, truth_to_trace
    from usagekit.generate.session import load_script
    from usagekit.metrics.report import emit_report
    from usagekit.metrics.similarity import compute_similarity, script_sets, trace_sets

    script_paths = sorted(run_dir.rglob("script.toml"))
    if not script_paths:
        raise click.UsageError(f"no script.toml under {run_dir}")
    truth_paths = sorted(Path(truth_dir).glob("*.toml"))
    if not truth_paths:
        raise click.UsageError(f"no ground-truth recordings in {truth_dir}")
    humans = [trace_sets(truth_to_trace(load_truth(p))) for p in truth_paths]
    rows = []
    for path in script_paths:
        script = load_script(path)
        source = path.parent.name or script.usage_id
        rows.append(compute_similarity(script_sets(script, source), humans))
    out = out or (run_dir / "report.csv")
    table = emit_report(rows, out, out.with_suffix(".png") if figure else None)
    click.echo(table)
    click.echo(f"-> {out}")


# -- service -------------------------------------------------------------------


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8038, show_default=True)
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    default=None,
    help="Directory of built web-console files to serve at /ui.",
)
@click.pass_context
def serve(ctx, host, port, ui_dir):
    """Run the HTTP service."""
    import uvicorn

    from usagekit.service.app import create_app
    from usagekit.service.runtime import ServiceConfig

    params = ctx.obj
    app = create_app(
        ServiceConfig(
            data_root=params["data_root"],
            taxonomy_path=params["taxonomy"],
            screen_model_path=params["screen_model"],
            widget_model_path=params["widget_model"],
            k=params["k"],
            rec_threshold=params["rec_threshold"],
            ui_dir=ui_dir,
        )
    )
    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    from usagekit.service.runtime import ServiceError

    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 130
    except click.ClickException as exc:
        exc.show()
        return 2
    except (UsageKitError, ServiceError) as exc:
        detail = getattr(exc, "detail", None) or str(exc)
        click.echo(f"error: {detail}", err=True)
        return 2
    except Exception as exc:  # anything else is a bug, not bad input
        click.echo(f"internal error: {exc!r}", err=True)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
