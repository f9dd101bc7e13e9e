"""Eval command: re-score stored partitions against dataset labels."""

import logging

import click

from ..config import Settings
from ..io import load_results
from ..metrics import evaluate as evaluate_partitions
from .common import (
    dataset_options,
    format_scores,
    handle_errors,
    load_input,
    load_settings,
    require_labels,
    start_command,
    verbose_option,
)

logger = logging.getLogger(__name__)


@click.command(name="eval")
@click.argument("results", type=click.Path(exists=True, dir_okay=False))
@click.argument("dataset")
@dataset_options
@verbose_option
@click.help_option("-h", "--help")
def evaluate(results, dataset, verbose, **options) -> None:
    """Score the member partitions stored in RESULTS against the labels of DATASET."""
    start_command("eval", verbose)

    with handle_errors("eval"):
        document = load_results(results)
        base = Settings.from_sections(document.manifest.settings)
        settings = load_settings(base=base, **options)
        data = load_input(dataset, settings)
        require_labels(data)
        report = evaluate_partitions(document.partitions(), data.labels)

    for member, scores in enumerate(report.members):
        click.echo(f"member {member:>3}: {format_scores(scores)}")
    click.echo(f"mean±std:   {format_scores(report.mean, report.std)}")
