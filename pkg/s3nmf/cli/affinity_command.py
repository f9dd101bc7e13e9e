"""Affinity command: build and save the kNN graph of a dataset."""

import logging

import click
import numpy as np

from ..affinity import build_affinity, resolve_k
from ..io import save_affinity
from .common import (
    affinity_options,
    dataset_options,
    handle_errors,
    load_input,
    load_settings,
    start_command,
    verbose_option,
)

logger = logging.getLogger(__name__)


@click.command()
@click.argument("dataset")
@click.option(
    "--out", "-o", "out", type=click.Path(dir_okay=False), required=True, help="Matrix file"
)
@dataset_options
@affinity_options
@verbose_option
@click.help_option("-h", "--help")
def affinity(dataset, out, verbose, **options) -> None:
    """Build the kNN affinity of DATASET (a file or a built-in name) and write it to --out."""
    start_command("affinity", verbose)

    with handle_errors("affinity"):
        settings = load_settings(**options)
        data = load_input(dataset, settings).data
        matrix = build_affinity(data, settings.affinity)
        save_affinity(matrix, out)

    edges = int(np.count_nonzero(np.triu(matrix.values)))
    k = resolve_k(data.n_samples, settings.affinity.k)
    click.echo(
        f"Wrote {matrix.n_samples}x{matrix.n_samples} affinity (k={k}, {edges} edges) to {out}"
    )
