"""Repeated-trial protocols, iteration traces and timings behind the ablate and bench commands."""

import logging
import time
from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from .affinity import build_affinity
from .config.models import AffinityConfig, Mode, PipelineConfig, SolverConfig
from .core import AffinityMatrix, Partition
from .datasets import make_blobs_dataset
from .metrics import PartitionScores, evaluate, summarize
from .pipeline import PipelineResult, run, run_base_snmf
from .solver import init_factors, solve_inner

logger = logging.getLogger(__name__)

Runner = Callable[[AffinityMatrix, PipelineConfig, int], PipelineResult]

# (row label, mode, runner) in the order of the ablation table
ABLATION_VARIANTS: tuple[tuple[str, Mode, Runner], ...] = (
    ("S3NMF", Mode.HARD, run),
    ("w/o alpha", Mode.UNWEIGHTED, run),
    ("SOFT", Mode.SOFT, run),
    ("SNMF", Mode.HARD, run_base_snmf),
)


class ExperimentRow(BaseModel):
    """
    Scores of one method over repeated runs.

    Mean and population standard deviation are taken over every member of every
    repetition.
    """

    model_config = ConfigDict(frozen=True)

    label: str
    repetitions: int
    mean: PartitionScores
    std: dict[str, float]
    selected_iterations: list[int]
    inner_iterations: list[int]
    seconds: float


def repeat_runs(
    label: str,
    affinity: AffinityMatrix,
    truth: Partition,
    config: PipelineConfig,
    repetitions: int,
    runner: Runner = run,
    n_jobs: int = 1,
) -> ExperimentRow:
    """
    Run ``runner`` with seeds ``config.seed``, ``config.seed + 1``, ... and pool the scores.

    The labels in ``truth`` are only used for scoring.
    """
    scores: list[PartitionScores] = []
    selected: list[int] = []
    inner: list[int] = []
    started = time.perf_counter()

    for repetition in range(repetitions):
        seeded = config.model_copy(update={"seed": config.seed + repetition})
        result = runner(affinity, seeded, n_jobs)
        scores.extend(evaluate(result.partitions, truth).members)
        selected.append(result.selected_iteration)
        inner.append(sum(record.inner_iterations for record in result.iterations))

    report = summarize(scores)
    row = ExperimentRow(
        label=label,
        repetitions=repetitions,
        mean=report.mean,
        std=report.std,
        selected_iterations=selected,
        inner_iterations=inner,
        seconds=time.perf_counter() - started,
    )
    logger.info(
        f"{label}: ACC {row.mean.acc:.3f}±{row.std['acc']:.3f} over {repetitions} repetition(s)"
    )
    return row


def ablation(
    affinity: AffinityMatrix,
    truth: Partition,
    config: PipelineConfig,
    repetitions: int = 1,
    n_jobs: int = 1,
) -> list[ExperimentRow]:
    """Proposed method, fixed weights, soft reconstruction and base SNMF under shared seeds."""
    return [
        repeat_runs(
            label,
            affinity,
            truth,
            config.model_copy(update={"mode": mode}),
            repetitions,
            runner,
            n_jobs,
        )
        for label, mode, runner in ABLATION_VARIANTS
    ]


def benchmark(
    affinity: AffinityMatrix,
    truth: Partition,
    config: PipelineConfig,
    repetitions: int = 20,
    n_jobs: int = 1,
) -> list[ExperimentRow]:
    """Self-supervised run against base SNMF on the same affinity and seeds."""
    return [
        repeat_runs("S3NMF", affinity, truth, config, repetitions, run, n_jobs),
        repeat_runs("SNMF", affinity, truth, config, repetitions, run_base_snmf, n_jobs),
    ]


def sweep(
    parameter: str,
    values: Sequence[float],
    affinity: AffinityMatrix,
    truth: Partition,
    config: PipelineConfig,
    repetitions: int = 20,
    n_jobs: int = 1,
) -> list[ExperimentRow]:
    """
    One row per value of a pipeline parameter (``tau`` or ``b``).

    Each value is validated through the pipeline settings model.
    """
    rows = []
    for value in values:
        settings = config.model_dump()
        settings[parameter] = value
        varied = PipelineConfig.model_validate(settings)
        label = f"{parameter}={value:g}"
        rows.append(repeat_runs(label, affinity, truth, varied, repetitions, run, n_jobs))
    return rows


class TracePoint(BaseModel):
    """Ensemble agreement and member accuracy at one outer iteration."""

    model_config = ConfigDict(frozen=True)

    iteration: int
    anmi: float
    acc: float
    acc_std: float


def trace(
    affinity: AffinityMatrix,
    truth: Partition,
    config: PipelineConfig,
    n_jobs: int = 1,
) -> list[TracePoint]:
    """
    ANMI next to mean member ACC for every outer iteration, without early stopping.

    Shows whether ANMI rises and falls with accuracy, which is what the stopping rule
    relies on. The labels in ``truth`` are only used for scoring.
    """
    result = run(affinity, config.model_copy(update={"early_stop": False}), n_jobs)

    points = []
    for index, (score, partitions) in enumerate(
        zip(result.anmi_trace, result.partition_trace, strict=True)
    ):
        report = evaluate(partitions, truth)
        points.append(
            TracePoint(
                iteration=index, anmi=score, acc=report.mean.acc, acc_std=report.std["acc"]
            )
        )
        logger.debug(f"Outer iteration {index}: ANMI={score:.4f}, ACC={report.mean.acc:.4f}")

    return points


class ScalingPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    seconds_per_iteration: float
    ratio: float | None = None


SCALING_RANGE = (2.5, 6.0)


def scaling(
    sizes: Sequence[int],
    c: int = 3,
    b: int = 5,
    iterations: int = 20,
    seed: int = 0,
    affinity_config: AffinityConfig | None = None,
    n_jobs: int = 1,
) -> list[ScalingPoint]:
    """
    Time inner iterations on synthetic blobs of increasing size.

    ``ratio`` compares each size with the previous one; for doubled sizes it is expected
    to fall inside ``SCALING_RANGE``. Ratios outside the range are logged, not raised.
    """
    affinity_config = affinity_config or AffinityConfig()
    # never stop early so every size runs the same number of iterations
    solver = SolverConfig(max_inner_iters=iterations, tol=np.finfo(np.float64).tiny)

    points: list[ScalingPoint] = []
    for n in sizes:
        dataset = make_blobs_dataset(n, seed)
        affinity = build_affinity(dataset.data, affinity_config)
        factors = init_factors(n, c, b, seed)

        started = time.perf_counter()
        state = solve_inner(affinity, factors, solver, n_jobs=n_jobs)
        per_iteration = (time.perf_counter() - started) / state.iterations

        ratio = per_iteration / points[-1].seconds_per_iteration if points else None
        points.append(ScalingPoint(n=n, seconds_per_iteration=per_iteration, ratio=ratio))

        if ratio is not None and not SCALING_RANGE[0] <= ratio <= SCALING_RANGE[1]:
            logger.warning(
                f"Per-iteration time grew by {ratio:.2f}x at n={n}, "
                f"outside the expected {SCALING_RANGE[0]}-{SCALING_RANGE[1]}x"
            )
        else:
            logger.info(f"n={n}: {per_iteration * 1e3:.3f} ms per inner iteration")

    return points
