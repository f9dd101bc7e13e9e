"""Bench command: repeated-trial comparison, parameter sweeps and scaling timings."""

import logging

import click

from ..experiments import SCALING_RANGE, TracePoint, benchmark, scaling, sweep, trace
from ..io import write_yaml
from .ablate_command import rows_table
from .common import (
    FloatListType,
    affinity_options,
    dataset_options,
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

DEFAULT_DATASETS = ("iris", "blobs")


def trace_table(points: list[TracePoint]) -> str:
    lines = [f"{'iteration':>9}  {'ANMI':>8}  {'ACC':>13}"]
    for point in points:
        lines.append(
            f"{point.iteration:>9}  {point.anmi:>8.4f}  {point.acc:>6.3f}±{point.acc_std:.3f}"
        )
    return "\n".join(lines)


@click.command()
@click.argument("datasets", nargs=-1)
@click.option(
    "--repetitions",
    "-r",
    type=click.IntRange(min=1),
    default=20,
    show_default=True,
    help="Runs per method with seeds seed, seed+1, ...",
)
@click.option(
    "--sweep-tau", type=FloatListType(float), default=None, help="tau values, e.g. 1.2,2,5"
)
@click.option(
    "--sweep-ensemble", type=FloatListType(int), default=None, help="Ensemble sizes, e.g. 5,10,20"
)
@click.option(
    "--trace",
    "trace_flag",
    is_flag=True,
    help="Per outer iteration ANMI and mean ACC with early stopping off, instead of the tables",
)
@click.option(
    "--scaling",
    "scaling_flag",
    is_flag=True,
    help="Time inner iterations on growing synthetic data",
)
@click.option(
    "--sizes",
    type=FloatListType(int),
    default="200,400,800",
    show_default=True,
    help="Sample counts for --scaling",
)
@click.option(
    "--out", "-o", type=click.Path(dir_okay=False), default=None, help="Tables document (YAML)"
)
@pipeline_options
@affinity_options
@dataset_options
@verbose_option
@click.help_option("-h", "--help")
def bench(
    datasets,
    repetitions,
    sweep_tau,
    sweep_ensemble,
    trace_flag,
    scaling_flag,
    sizes,
    out,
    verbose,
    **options,
) -> None:
    """Benchmark S3NMF against base SNMF on DATASETS (default: iris blobs), or trace it."""
    start_command("bench", verbose)
    document: dict = {"datasets": {}, "traces": {}}

    with handle_errors("bench"):
        base_settings = load_settings(**options)
        document["settings"] = base_settings.to_sections()

        for name in datasets or ([] if scaling_flag else DEFAULT_DATASETS):
            data = load_input(name, base_settings)
            require_labels(data)
            settings = resolve_clusters(base_settings, data)
            matrix = input_affinity(data, settings, None)
            n_jobs = settings.run.threads

            if trace_flag:
                points = trace(matrix, data.labels, settings.pipeline, n_jobs)
                seed = settings.pipeline.seed
                click.echo(f"{data.name} (n={data.data.n_samples}, seed={seed}, no early stop)")
                click.echo(trace_table(points))
                click.echo("")
                document["traces"][data.name] = [p.model_dump(mode="json") for p in points]
                continue

            rows = benchmark(matrix, data.labels, settings.pipeline, repetitions, n_jobs)
            if sweep_tau:
                rows += sweep(
                    "tau", sweep_tau, matrix, data.labels, settings.pipeline, repetitions, n_jobs
                )
            if sweep_ensemble:
                rows += sweep(
                    "b",
                    sweep_ensemble,
                    matrix,
                    data.labels,
                    settings.pipeline,
                    repetitions,
                    n_jobs,
                )

            click.echo(f"{data.name} (n={data.data.n_samples}, {repetitions} repetition(s))")
            click.echo(rows_table(rows))
            for row in rows:
                selected = sum(row.selected_iterations) / len(row.selected_iterations)
                click.echo(
                    f"  {row.label}: {row.seconds:.2f} s, "
                    f"mean selected iteration {selected:.2f}, "
                    f"inner iterations {sum(row.inner_iterations)}"
                )
            click.echo("")
            document["datasets"][data.name] = [row.model_dump(mode="json") for row in rows]

        if scaling_flag:
            points = scaling(
                sizes,
                c=base_settings.pipeline.c or 3,
                b=min(base_settings.pipeline.b, 5),
                seed=base_settings.pipeline.seed,
                affinity_config=base_settings.affinity,
                n_jobs=base_settings.run.threads,
            )
            click.echo(
                f"Scaling (expected ratio per doubling {SCALING_RANGE[0]}-{SCALING_RANGE[1]}x)"
            )
            for point in points:
                ratio = "" if point.ratio is None else f"  x{point.ratio:.2f}"
                click.echo(
                    f"  n={point.n:>6}: {point.seconds_per_iteration * 1e3:.3f} ms/iter{ratio}"
                )
            document["scaling"] = [point.model_dump(mode="json") for point in points]

        if out is not None:
            write_yaml(document, out)
