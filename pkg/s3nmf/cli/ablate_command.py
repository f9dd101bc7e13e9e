"""Ablate command: the proposed method against its variants and base SNMF."""

import logging

import click

from ..experiments import ExperimentRow, ablation
from ..io import dataset_digest, write_yaml
from .common import (
    affinity_options,
    dataset_options,
    format_table,
    handle_errors,
    input_affinity,
    load_input,
    load_settings,
    pipeline_options,
    require_labels,
    resolve_clusters,
    start_command,
    verbose_option,
)

logger = logging.getLogger(__name__)


def rows_table(rows: list[ExperimentRow]) -> str:
    return format_table([(row.label, row.mean, row.std) for row in rows])


@click.command()
@click.argument("dataset")
@click.option(
    "--repetitions",
    "-r",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Runs per variant with seeds seed, seed+1, ...",
)
@click.option(
    "--out", "-o", type=click.Path(dir_okay=False), default=None, help="Table document (YAML)"
)
@click.option(
    "--affinity-in",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Use a precomputed affinity instead of building the kNN graph",
)
@pipeline_options
@affinity_options
@dataset_options
@verbose_option
@click.help_option("-h", "--help")
def ablate(dataset, repetitions, out, affinity_in, verbose, **options) -> None:
    """Compare hard, unweighted and soft reconstruction with base SNMF on DATASET."""
    start_command("ablate", verbose)

    with handle_errors("ablate"):
        settings = load_settings(**options)
        data = load_input(dataset, settings)
        require_labels(data)
        settings = resolve_clusters(settings, data)
        matrix = input_affinity(data, settings, affinity_in)

        rows = ablation(
            matrix, data.labels, settings.pipeline, repetitions, n_jobs=settings.run.threads
        )

        if out is not None:
            write_yaml(
                {
                    "dataset": dataset,
                    "dataset_digest": dataset_digest(data.data),
                    "settings": settings.to_sections(),
                    "rows": [row.model_dump(mode="json") for row in rows],
                },
                out,
            )

    click.echo(f"Ablation on {data.name} ({repetitions} repetition(s))")
    click.echo(rows_table(rows))
