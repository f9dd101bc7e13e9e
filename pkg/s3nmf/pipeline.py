"""Outer self-supervision loop: factorize, harden, rebuild the affinity while ANMI improves."""

import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from .config.models import Mode, PipelineConfig
from .core import AffinityMatrix, EnsembleState, Factor, Partition, WeightVector
from .exceptions import NumericError, ParameterError, ShapeError
from .metrics import anmi
from .solver import init_factors, solve_inner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OuterIteration:
    """Diagnostics of one outer iteration."""

    index: int
    anmi: float
    affinity_digest: str
    inner_iterations: int
    objective: float
    converged: bool
    zero_rows: int


@dataclass(frozen=True, eq=False)
class PipelineResult:
    """
    Outputs of the selected (highest-ANMI) outer iteration plus the traces of the whole run.

    ``affinity`` is the matrix the selected iteration factorized; ``objective_history``
    is that iteration's inner objective trace and ``state`` its full inner solve, with
    ``anmi_history`` covering the whole run. ``partition_trace`` keeps the hardened
    members of every completed iteration.
    """

    partitions: list[Partition]
    weights: WeightVector
    best_partition: Partition
    anmi_trace: list[float]
    selected_iteration: int
    affinity_trace_digest: list[str]
    affinity: AffinityMatrix
    objective_history: list[float] = field(default_factory=list)
    iterations: list[OuterIteration] = field(default_factory=list)
    stop_reason: str = "max-iterations"
    partition_trace: list[list[Partition]] = field(default_factory=list)
    state: EnsembleState | None = None

    @property
    def ensemble_size(self) -> int:
        return len(self.partitions)


def affinity_digest(affinity: AffinityMatrix) -> str:
    """sha256 of the matrix bytes, used to trace which S each iteration saw."""
    return hashlib.sha256(np.ascontiguousarray(affinity.values).tobytes()).hexdigest()


def zero_rows(factor: Factor) -> int:
    return int(np.count_nonzero(~factor.values.any(axis=1)))


def harden(factor: Factor) -> Partition:
    """Row-wise argmax; ties go to the lowest column, so an all-zero row gets label 0."""
    empty = zero_rows(factor)
    if empty:
        logger.warning(f"Hardening a factor with {empty} all-zero row(s); assigned to cluster 0")
    return Partition(np.argmax(factor.values, axis=1), factor.n_clusters)


def _check_members(count: int, weights: WeightVector) -> None:
    if count == 0:
        raise ParameterError("Reconstruction needs at least one member")
    if count != len(weights):
        raise ShapeError(f"Got {count} members but {len(weights)} weights")


def reconstruct_affinity(
    partitions: Sequence[Partition], weights: WeightVector
) -> AffinityMatrix:
    """
    Weighted co-association S_ij = Σ_m α_m [label_m(i) = label_m(j)].

    Raises:
        ShapeError: If the member and weight counts differ or partitions disagree on n
    """
    _check_members(len(partitions), weights)

    n = partitions[0].n_samples
    values = np.zeros((n, n))
    for alpha_m, partition in zip(weights.alpha, partitions, strict=True):
        if partition.n_samples != n:
            raise ShapeError(
                f"Partitions cover different sample counts: {n} and {partition.n_samples}"
            )
        labels = partition.labels
        values += alpha_m * (labels[:, None] == labels[None, :])

    return AffinityMatrix(values)


def reconstruct_affinity_soft(factors: Sequence[Factor], weights: WeightVector) -> AffinityMatrix:
    """Soft reconstruction S = Σ_m α_m V_m V_mᵀ."""
    _check_members(len(factors), weights)

    n = factors[0].n_samples
    values = np.zeros((n, n))
    for alpha_m, factor in zip(weights.alpha, factors, strict=True):
        if factor.n_samples != n:
            raise ShapeError(f"Factors cover different sample counts: {n} and {factor.n_samples}")
        values += alpha_m * (factor.values @ factor.values.T)

    return AffinityMatrix.symmetrized(values)


def outer_seed(seed: int, iteration: int) -> np.random.SeedSequence:
    """Seed of one outer iteration, derived only from the run seed and the iteration index."""
    return np.random.SeedSequence([seed, iteration])


@dataclass(frozen=True, eq=False)
class _Snapshot:
    index: int
    state: EnsembleState
    partitions: list[Partition]


def run(
    affinity_init: AffinityMatrix, config: PipelineConfig, n_jobs: int = 1
) -> PipelineResult:
    """
    Run the self-supervised ensemble factorization.

    Every outer iteration draws fresh factors, solves the inner problem, hardens the
    members and scores their agreement (ANMI). The affinity for the next iteration is
    rebuilt from the members: weighted co-association for ``hard`` and ``unweighted``
    (uniform weights), Σ α_m V_m V_mᵀ for ``soft``. The loop stops the first time ANMI
    falls strictly below its running maximum, or after ``config.max_outer_iters``; with
    ``config.early_stop`` off it always runs every iteration.

    Args:
        affinity_init: Starting affinity, e.g. a kNN graph
        config: Pipeline settings; ``config.c`` must be set
        n_jobs: Worker threads for the member updates

    Returns:
        Result taken from the first iteration with the highest ANMI

    Raises:
        ParameterError: If the cluster count is missing or out of range
        NumericError: If the inner solver fails, tagged with the outer iteration
    """
    if config.c is None:
        raise ParameterError("Cluster count is required")

    n = affinity_init.n_samples
    b = config.b
    fixed_weights = WeightVector.uniform(b) if config.mode is Mode.UNWEIGHTED else None

    logger.info(
        f"Starting {config.mode.value} run: n={n}, c={config.c}, b={b}, tau={config.tau}, "
        f"seed={config.seed}"
    )

    affinity = affinity_init
    anmi_trace: list[float] = []
    digests: list[str] = []
    records: list[OuterIteration] = []
    affinities: list[AffinityMatrix] = []
    partition_trace: list[list[Partition]] = []
    best: _Snapshot | None = None
    stop_reason = "max-iterations"

    for index in range(config.max_outer_iters):
        digest = affinity_digest(affinity)
        factors = init_factors(
            n, config.c, b, outer_seed(config.seed, index), config.solver.epsilon_floor
        )

        try:
            state = solve_inner(affinity, factors, config.solver, fixed_weights, n_jobs)
        except NumericError as e:
            raise e.with_context(outer_iteration=index) from e

        partitions = [harden(factor) for factor in state.factors]
        score = anmi(partitions)

        anmi_trace.append(score)
        digests.append(digest)
        affinities.append(affinity)
        partition_trace.append(partitions)
        records.append(
            OuterIteration(
                index=index,
                anmi=score,
                affinity_digest=digest,
                inner_iterations=state.iterations,
                objective=state.objective_history[-1],
                converged=state.converged,
                zero_rows=sum(zero_rows(factor) for factor in state.factors),
            )
        )
        logger.info(
            f"Outer iteration {index}: ANMI={score:.6f}, inner iterations={state.iterations}"
        )

        if config.early_stop and best is not None and score < max(anmi_trace[:-1]):
            stop_reason = "anmi-drop"
            logger.info(f"ANMI dropped at outer iteration {index}, stopping")
            break

        if best is None or score > anmi_trace[best.index]:
            best = _Snapshot(index, state, partitions)

        if index + 1 < config.max_outer_iters:
            if config.mode is Mode.SOFT:
                affinity = reconstruct_affinity_soft(state.factors, state.weights)
            else:
                affinity = reconstruct_affinity(partitions, state.weights)

    assert best is not None
    assert anmi_trace[best.index] == max(anmi_trace)

    state = replace(best.state, anmi_history=list(anmi_trace))
    weights = state.weights
    logger.info(
        f"Selected outer iteration {best.index} with ANMI={anmi_trace[best.index]:.6f} "
        f"({stop_reason})"
    )

    return PipelineResult(
        partitions=best.partitions,
        weights=weights,
        best_partition=best.partitions[int(np.argmax(weights.alpha))],
        anmi_trace=anmi_trace,
        selected_iteration=best.index,
        affinity_trace_digest=digests,
        affinity=affinities[best.index],
        objective_history=state.objective_history,
        iterations=records,
        stop_reason=stop_reason,
        partition_trace=partition_trace,
        state=state,
    )


def run_base_snmf(
    affinity: AffinityMatrix, config: PipelineConfig, n_jobs: int = 1
) -> PipelineResult:
    """Base SNMF: b independent factorizations of ``affinity`` with uniform weights."""
    base = config.model_copy(update={"max_outer_iters": 1, "mode": Mode.UNWEIGHTED})
    return run(affinity, base, n_jobs)
