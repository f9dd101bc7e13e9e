"""Certify command: auxiliary-function certificates and metric oracles on random instances."""

import logging

import click

from ..certify import run_certificate_suite
from ..io import write_yaml
from .common import EXIT_NUMERIC, CommandError, handle_errors, start_command, verbose_option

logger = logging.getLogger(__name__)


@click.command()
@click.option(
    "--instances",
    type=click.IntRange(min=1),
    default=50,
    show_default=True,
    help="Random update steps to certify",
)
@click.option(
    "--perturbations",
    type=click.IntRange(min=1),
    default=10,
    show_default=True,
    help="Random positive points per instance where g >= f is checked",
)
@click.option(
    "--oracle-cases",
    type=click.IntRange(min=0),
    default=200,
    show_default=True,
    help="Random labelings compared against the brute-force ACC",
)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option(
    "--failure-out",
    type=click.Path(dir_okay=False),
    default="certify-failure.yml",
    show_default=True,
    help="Where failing instances are written for replay",
)
@verbose_option
@click.help_option("-h", "--help")
def certify(instances, perturbations, oracle_cases, seed, failure_out, verbose) -> None:
    """Check the descent guarantees of the factor update on random instances."""
    start_command("certify", verbose)

    with handle_errors("certify"):
        report = run_certificate_suite(instances, seed, perturbations, oracle_cases)

        if not report.ok:
            write_yaml(
                {
                    "seed": seed,
                    "failures": [instance.model_dump() for instance in report.failures],
                    "oracle_failures": report.oracle_failures,
                },
                failure_out,
            )
            raise CommandError(
                f"{len(report.failures)} of {instances} certificate(s) failed and "
                f"{report.oracle_failures} metric oracle case(s) disagreed; "
                f"failing instances written to {failure_out}",
                EXIT_NUMERIC,
            )

    click.echo(f"Certified {instances}/{instances} instances (seed {seed})")
    click.echo(f"Metric oracle agreed on {oracle_cases}/{oracle_cases} cases")
