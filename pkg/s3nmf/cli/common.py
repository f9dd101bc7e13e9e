"""Options, settings resolution and error handling shared by the subcommands."""

import logging
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from typing import Any

import click
from pydantic import ValidationError

from ..affinity import build_affinity
from ..config import ConfigurationManager, ConfigValidationError, Kernel, Mode, Settings
from ..config.loader import format_validation_error
from ..config.models import LabelColumn, Symmetrization
from ..core import AffinityMatrix
from ..datasets import resolve_dataset
from ..exceptions import CertificateError, NumericError, S3nmfError, ShapeError
from ..io import Dataset, load_affinity
from ..metrics import METRIC_NAMES, PartitionScores
from ..utils import setup_logging

logger = logging.getLogger(__name__)

EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class CommandError(click.ClickException):
    """Click error carrying one of the documented exit codes."""

    def __init__(self, message: str, exit_code: int = EXIT_INPUT):
        super().__init__(message)
        self.exit_code = exit_code


@contextmanager
def handle_errors(command: str) -> Iterator[None]:
    """Translate package errors into exit codes: input 2, numeric 3, I/O 4."""
    try:
        yield
    except click.ClickException:
        raise
    except (NumericError, CertificateError) as e:
        logger.error(f"{command} failed numerically: {e}")
        raise CommandError(str(e), EXIT_NUMERIC) from e
    except ConfigValidationError as e:
        logger.error(f"Configuration validation failed: {e}")
        raise CommandError(f"Configuration Error: {e}", EXIT_INPUT) from e
    except ValidationError as e:
        logger.error(f"Invalid settings: {e}")
        raise CommandError(
            "Invalid settings:\n" + format_validation_error(e), EXIT_INPUT
        ) from e
    except S3nmfError as e:
        logger.error(f"{command} failed: {e}")
        raise CommandError(str(e), EXIT_INPUT) from e
    except UnicodeDecodeError as e:
        logger.error(f"{command} failed: input is not valid UTF-8: {e}")
        raise CommandError(f"Input is not valid UTF-8: {e}", EXIT_INPUT) from e
    except OSError as e:
        logger.error(f"{command} failed with an I/O error: {e}")
        raise CommandError(f"I/O error: {e}", EXIT_IO) from e


class LabelColumnType(click.ParamType):
    """``none``, ``last`` or a zero-based column index."""

    name = "none|last|N"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None):
        if isinstance(value, int) or value in ("none", "last"):
            return value
        try:
            index = int(value)
        except ValueError:
            self.fail(f"{value!r} is not 'none', 'last' or a column index", param, ctx)
        if index < 0:
            self.fail("column index must be non-negative", param, ctx)
        return index


class FloatListType(click.ParamType):
    """Comma-separated numbers, e.g. ``1.2,1.5,2``."""

    name = "LIST"

    def __init__(self, cast: Callable[[str], float | int] = float):
        self.cast = cast

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None):
        if isinstance(value, list | tuple):
            return list(value)
        try:
            return [self.cast(item) for item in str(value).split(",") if item.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)


def _stack(*decorators: Callable) -> Callable:
    def apply(f: Callable) -> Callable:
        for decorator in reversed(decorators):
            f = decorator(f)
        return f

    return apply


verbose_option = click.option(
    "--verbose", "-v", is_flag=True, help="Enable verbose (debug) logging"
)

dataset_options = _stack(
    click.option(
        "--label-column",
        type=LabelColumnType(),
        default=None,
        help="Column holding ground-truth labels: none, last or an index",
    ),
    click.option("--delimiter", default=None, help="Cell separator (default: ',' or whitespace)"),
)

affinity_options = _stack(
    click.option(
        "--k-neighbors",
        "-k",
        type=click.IntRange(min=0),
        default=None,
        help="Neighbors per sample (0 = floor(log2 n) + 1)",
    ),
    click.option(
        "--kernel",
        type=click.Choice([k.value for k in Kernel]),
        default=None,
        help="Edge weighting",
    ),
    click.option(
        "--symmetrize",
        type=click.Choice([s.value for s in Symmetrization]),
        default=None,
        help="How directed kNN edges are made symmetric",
    ),
)

pipeline_options = _stack(
    click.option(
        "--clusters",
        "-c",
        type=click.IntRange(min=2),
        default=None,
        help="Cluster count (default: number of label classes)",
    ),
    click.option(
        "--ensemble", "-b", type=click.IntRange(min=2), default=None, help="Ensemble size"
    ),
    click.option(
        "--tau",
        type=click.FloatRange(min=1.0, min_open=True),
        default=None,
        help="Weight exponent",
    ),
    click.option(
        "--max-outer", type=click.IntRange(min=1), default=None, help="Outer iteration limit"
    ),
    click.option(
        "--max-inner", type=click.IntRange(min=1), default=None, help="Inner iteration limit"
    ),
    click.option(
        "--tol",
        type=click.FloatRange(min=0.0, min_open=True),
        default=None,
        help="Inner convergence tolerance",
    ),
    click.option("--seed", type=click.IntRange(min=0), default=None, help="Random seed"),
    click.option(
        "--certify", is_flag=True, default=None, help="Certify every factor update while solving"
    ),
    click.option("--threads", type=int, default=None, help="Worker threads (-1 = all cores)"),
)


def load_settings(
    *,
    label_column: LabelColumn | None = None,
    delimiter: str | None = None,
    k_neighbors: int | None = None,
    kernel: str | None = None,
    symmetrize: str | None = None,
    clusters: int | None = None,
    ensemble: int | None = None,
    tau: float | None = None,
    max_outer: int | None = None,
    max_inner: int | None = None,
    tol: float | None = None,
    seed: int | None = None,
    certify: bool | None = None,
    threads: int | None = None,
    mode: str | None = None,
    base: Settings | None = None,
) -> Settings:
    """Merge configuration files (or ``base``) with command-line overrides."""
    if base is None:
        base = ConfigurationManager().load_configuration().settings

    return base.with_overrides(
        {
            "affinity": {"k": k_neighbors, "kernel": kernel, "symmetrize": symmetrize},
            "pipeline": {
                "c": clusters,
                "b": ensemble,
                "tau": tau,
                "max_outer_iters": max_outer,
                "mode": mode,
                "seed": seed,
            },
            "solver": {"max_inner_iters": max_inner, "tol": tol, "certify": certify or None},
            "run": {"label_column": label_column, "delimiter": delimiter, "threads": threads},
        }
    )


def load_input(source: str, settings: Settings) -> Dataset:
    return resolve_dataset(
        source,
        label_column=settings.run.label_column,
        delimiter=settings.run.delimiter,
        seed=settings.pipeline.seed,
    )


def resolve_clusters(settings: Settings, dataset: Dataset) -> Settings:
    """Fill in the cluster count from the label classes when it was not given."""
    if settings.pipeline.c is not None:
        return settings

    if dataset.n_classes is None:
        raise CommandError(
            "Cluster count is required: pass --clusters or provide a label column",
            EXIT_INPUT,
        )

    logger.debug(f"Using {dataset.n_classes} clusters from the label column")
    return settings.with_overrides({"pipeline": {"c": dataset.n_classes}})


def require_labels(dataset: Dataset) -> None:
    if dataset.labels is None:
        raise CommandError(
            f"Dataset {dataset.name} has no labels: pass --label-column", EXIT_INPUT
        )


def input_affinity(
    dataset: Dataset, settings: Settings, affinity_in: str | None
) -> AffinityMatrix:
    """Load a precomputed affinity, or build the kNN graph of the dataset."""
    if affinity_in is None:
        return build_affinity(dataset.data, settings.affinity)

    affinity = load_affinity(affinity_in, settings.run.delimiter)
    if affinity.n_samples != dataset.data.n_samples:
        raise ShapeError(
            f"Affinity is {affinity.n_samples}x{affinity.n_samples} but the dataset "
            f"has {dataset.data.n_samples} samples"
        )
    return affinity


def start_command(name: str, verbose: bool) -> None:
    if verbose:
        setup_logging("DEBUG")
    logger.info(f"Executing {name} command")


def format_scores(mean: PartitionScores, std: dict[str, float] | None = None) -> str:
    """``acc 0.912±0.031  nmi ...`` on one line."""
    parts = []
    for name in METRIC_NAMES:
        value = f"{getattr(mean, name):.3f}"
        if std is not None:
            value += f"±{std[name]:.3f}"
        parts.append(f"{name} {value}")
    return "  ".join(parts)


def format_table(rows: list[tuple[str, PartitionScores, dict[str, float]]]) -> str:
    """Fixed-width table with one row per method and one column per metric."""
    width = max(len("method"), *(len(label) for label, _, _ in rows))
    header = f"{'method':<{width}}  " + "  ".join(f"{name.upper():<11}" for name in METRIC_NAMES)
    lines = [header, "-" * len(header)]
    for label, mean, std in rows:
        cells = [f"{getattr(mean, name):.3f}±{std[name]:.3f}" for name in METRIC_NAMES]
        lines.append(f"{label:<{width}}  " + "  ".join(f"{cell:<11}" for cell in cells))
    return "\n".join(lines)


def pass_mode(f: Callable) -> Callable:
    """Add ``--mode`` with the pipeline variants."""
    return click.option(
        "--mode",
        type=click.Choice([m.value for m in Mode]),
        default=None,
        help="hard (default), soft reconstruction, or unweighted members",
    )(f)

