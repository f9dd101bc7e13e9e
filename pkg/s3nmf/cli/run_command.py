"""Run command: the full self-supervised pipeline on one dataset."""

import logging
from datetime import datetime, timezone

import click

from .. import pipeline
from ..config import Settings
from ..io import RunManifest, dataset_digest, load_results, save_affinity, save_results
from ..metrics import MetricReport, evaluate
from .common import (
    EXIT_INPUT,
    CommandError,
    affinity_options,
    dataset_options,
    format_scores,
    handle_errors,
    input_affinity,
    load_input,
    load_settings,
    pass_mode,
    pipeline_options,
    resolve_clusters,
    start_command,
    verbose_option,
)

UTC = timezone.utc

logger = logging.getLogger(__name__)


def format_run_summary(result: pipeline.PipelineResult, report: MetricReport | None) -> str:
    """Human-readable summary of a run for the terminal."""
    best = int(result.weights.alpha.argmax())
    lines = [
        f"Selected outer iteration {result.selected_iteration} of {len(result.anmi_trace)} "
        f"({result.stop_reason})",
        "ANMI trace: " + ", ".join(f"{value:.6f}" for value in result.anmi_trace),
        f"Best member: {best} (weight {result.weights.alpha[best]:.6f})",
    ]
    if report is not None:
        lines.append(
            f"Mean over {len(report.members)} members: {format_scores(report.mean, report.std)}"
        )
    return "\n".join(lines)


@click.command()
@click.argument("dataset")
@click.option(
    "--out", "-o", type=click.Path(dir_okay=False), default=None, help="Results document (YAML)"
)
@click.option(
    "--affinity-in",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Use a precomputed affinity instead of building the kNN graph",
)
@click.option(
    "--affinity-out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also write the input affinity",
)
@click.option(
    "--replay",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Re-run with the settings stored in a results document",
)
@pass_mode
@pipeline_options
@affinity_options
@dataset_options
@verbose_option
@click.help_option("-h", "--help")
def run(dataset, out, affinity_in, affinity_out, replay, verbose, **options) -> None:
    """Cluster DATASET (a file or a built-in name) with the self-supervised SNMF ensemble."""
    start_command("run", verbose)

    with handle_errors("run"):
        base = None
        expected_digest = None
        if replay is not None:
            document = load_results(replay)
            base = Settings.from_sections(document.manifest.settings)
            expected_digest = document.manifest.dataset_digest
            logger.info(f"Replaying settings from {replay}")

        settings = load_settings(base=base, **options)
        data = load_input(dataset, settings)
        digest = dataset_digest(data.data)

        if expected_digest is not None and digest != expected_digest:
            raise CommandError(
                f"Dataset {dataset} does not match the replayed run (digest {digest[:12]} "
                f"!= {expected_digest[:12]})",
                EXIT_INPUT,
            )

        settings = resolve_clusters(settings, data)
        matrix = input_affinity(data, settings, affinity_in)
        if affinity_out is not None:
            save_affinity(matrix, affinity_out)

        manifest = RunManifest(
            command="run",
            dataset=dataset,
            dataset_digest=digest,
            settings=settings.to_sections(),
            seed=settings.pipeline.seed,
            affinity_source=affinity_in or "knn",
        )

        # the pipeline only ever sees the affinity; labels are used for scoring below
        result = pipeline.run(matrix, settings.pipeline, n_jobs=settings.run.threads)
        report = None if data.labels is None else evaluate(result.partitions, data.labels)

        manifest = manifest.model_copy(
            update={"finished_at": datetime.now(UTC).isoformat()}
        )
        if out is not None:
            save_results(result, report, manifest, out)

    click.echo(format_run_summary(result, report))
    if out is not None:
        click.echo(f"Results written to {out}")
