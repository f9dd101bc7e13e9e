"""Main CLI entry point for s3nmf."""

import click

from .. import __version__
from ..utils import setup_logging
from .ablate_command import ablate
from .affinity_command import affinity
from .bench_command import bench
from .certify_command import certify
from .config_command import config
from .eval_command import evaluate
from .run_command import run


@click.group(context_settings={"auto_envvar_prefix": "S3NMF"})
@click.version_option(__version__, prog_name="s3nmf")
@click.help_option("-h", "--help")
def main():
    """Self-supervised SNMF ensemble clustering.

    Every option can also be set through S3NMF_<COMMAND>_<OPTION>, e.g. S3NMF_RUN_SEED=3.
    """
    setup_logging()


main.add_command(affinity)
main.add_command(run)
main.add_command(evaluate)
main.add_command(ablate)
main.add_command(bench)
main.add_command(certify)
main.add_command(config)
