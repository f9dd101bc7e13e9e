"""Domain types shared by every stage of the factorization pipeline."""

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import AffinityValidationError, InputError, ParameterError, ShapeError

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]

SIMPLEX_TOLERANCE = 1e-12


def _frozen(values: ArrayLike, dtype: type) -> NDArray:
    array = np.array(values, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """Sample-major feature matrix: one row per sample, one column per feature."""

    values: FloatArray
    row_ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        values = _frozen(self.values, np.float64)
        if values.ndim != 2:
            raise ShapeError(f"Data matrix must be 2-dimensional, got {values.ndim} dimensions")

        n, d = values.shape
        if n < 2 or d < 1:
            raise ShapeError(f"Data matrix needs at least 2 samples and 1 feature, got {n}x{d}")

        if not np.isfinite(values).all():
            row, column = np.argwhere(~np.isfinite(values))[0]
            raise InputError("Non-finite feature value", row=int(row), column=int(column))

        if self.row_ids is not None and len(self.row_ids) != n:
            raise ShapeError(f"Expected {n} row identifiers, got {len(self.row_ids)}")

        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetric nonnegative n×n similarity matrix."""

    values: FloatArray

    def __post_init__(self) -> None:
        values = _frozen(self.values, np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ShapeError(f"Affinity matrix must be square, got shape {values.shape}")

        finite = np.isfinite(values)
        if not finite.all():
            row, column = np.argwhere(~finite)[0]
            raise AffinityValidationError(
                "Affinity entry is not finite", row=int(row), column=int(column)
            )

        negative = values < 0
        if negative.any():
            row, column = np.argwhere(negative)[0]
            raise AffinityValidationError(
                f"Affinity entry is negative: {values[row, column]!r}",
                row=int(row),
                column=int(column),
            )

        asymmetric = np.triu(values != values.T)
        if asymmetric.any():
            row, column = np.argwhere(asymmetric)[0]
            raise AffinityValidationError(
                f"Affinity is not symmetric at ({row}, {column})/({column}, {row})",
                row=int(row),
                column=int(column),
            )

        object.__setattr__(self, "values", values)

    @classmethod
    def symmetrized(cls, values: ArrayLike) -> "AffinityMatrix":
        """Build an affinity from a nearly symmetric matrix by averaging it with its transpose."""
        array = np.asarray(values, dtype=np.float64)
        return cls((array + array.T) / 2.0)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @cached_property
    def squared_norm(self) -> float:
        """‖S‖²_F."""
        return float(np.sum(self.values * self.values))


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative n×c factor of a symmetric factorization."""

    values: FloatArray

    def __post_init__(self) -> None:
        values = _frozen(self.values, np.float64)
        if values.ndim != 2:
            raise ShapeError(f"Factor must be 2-dimensional, got {values.ndim} dimensions")

        n, c = values.shape
        if c < 1 or c > n:
            raise ShapeError(f"Factor needs 1 <= c <= n, got {n}x{c}")

        if (values < 0).any():
            raise ParameterError("Factor entries must be nonnegative")

        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_clusters(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class Partition:
    """Hard assignment of n samples to a fixed number of clusters."""

    labels: IntArray
    n_clusters: int

    def __post_init__(self) -> None:
        labels = _frozen(self.labels, np.int64)
        if labels.ndim != 1:
            raise ShapeError("Partition labels must be a vector")

        if self.n_clusters < 1:
            raise ParameterError(f"Cluster count must be positive, got {self.n_clusters}")

        if labels.size and (labels.min() < 0 or labels.max() >= self.n_clusters):
            raise ParameterError(f"Partition labels must lie in [0, {self.n_clusters})")

        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels: ArrayLike) -> "Partition":
        """Build a partition whose cluster count is one more than the largest label."""
        array = np.asarray(labels, dtype=np.int64)
        return cls(array, int(array.max()) + 1 if array.size else 1)

    @property
    def n_samples(self) -> int:
        return self.labels.shape[0]

    def one_hot(self) -> FloatArray:
        """Membership matrix M with a single 1 per row."""
        membership = np.zeros((self.n_samples, self.n_clusters))
        membership[np.arange(self.n_samples), self.labels] = 1.0
        return membership

    def same_relation(self, other: "Partition") -> bool:
        """True when both partitions group the samples identically, ignoring label names."""
        if self.n_samples != other.n_samples:
            return False
        pairs = set(zip(self.labels.tolist(), other.labels.tolist(), strict=True))
        return len(pairs) == len(set(self.labels.tolist())) == len(set(other.labels.tolist()))


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Strictly positive weights on the probability simplex."""

    alpha: FloatArray

    def __post_init__(self) -> None:
        alpha = _frozen(self.alpha, np.float64)
        if alpha.ndim != 1 or alpha.size == 0:
            raise ShapeError("Weight vector must be a non-empty vector")

        if not (alpha > 0).all():
            raise ParameterError("Weights must be strictly positive")

        if abs(alpha.sum() - 1.0) > SIMPLEX_TOLERANCE:
            raise ParameterError(f"Weights must sum to 1, got {alpha.sum()!r}")

        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def uniform(cls, size: int) -> "WeightVector":
        return cls(np.full(size, 1.0 / size))

    def __len__(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class DescentStep:
    """Objective values around one inner iteration: before, after V-updates, after α-update."""

    before: float
    after_factors: float
    after_weights: float


@dataclass(frozen=True, eq=False)
class EnsembleState:
    """Output of one inner solve: factors, weights and their diagnostics."""

    factors: list[Factor]
    weights: WeightVector
    affinity: AffinityMatrix
    residuals: FloatArray
    anmi_history: list[float] = field(default_factory=list)
    objective_history: list[float] = field(default_factory=list)
    descent_trace: list[DescentStep] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    def __post_init__(self) -> None:
        if len(self.factors) != len(self.weights):
            raise ShapeError(
                f"Got {len(self.factors)} factors but {len(self.weights)} weights"
            )
        residuals = _frozen(self.residuals, np.float64)
        if (residuals < 0).any():
            raise ParameterError("Residuals must be nonnegative")
        object.__setattr__(self, "residuals", residuals)

    @property
    def ensemble_size(self) -> int:
        return len(self.factors)


def _check_compatible(affinity: AffinityMatrix, factor: Factor) -> None:
    if factor.n_samples != affinity.n_samples:
        raise ShapeError(
            f"Factor has {factor.n_samples} rows but affinity is "
            f"{affinity.n_samples}x{affinity.n_samples}"
        )


def residual(affinity: AffinityMatrix, factor: Factor) -> float:
    """Squared Frobenius norm of S - VVᵀ."""
    _check_compatible(affinity, factor)
    difference = affinity.values - factor.values @ factor.values.T
    return float(np.sum(difference * difference))


def objective(
    affinity: AffinityMatrix,
    factors: Sequence[Factor],
    weights: WeightVector,
    tau: float,
) -> float:
    """
    Weighted ensemble objective Σ_m (α_m)^τ ‖S - V_m V_mᵀ‖²_F.

    Args:
        affinity: Current affinity S
        factors: Ensemble members V_m
        weights: Member weights α
        tau: Weight exponent, strictly greater than 1

    Returns:
        Nonnegative objective value

    Raises:
        ParameterError: If tau <= 1
        ShapeError: If member count or factor shapes do not match
    """
    if tau <= 1:
        raise ParameterError(f"tau must be greater than 1, got {tau}")

    if len(factors) != len(weights):
        raise ShapeError(f"Got {len(factors)} factors but {len(weights)} weights")

    residuals = np.array([residual(affinity, factor) for factor in factors])
    return weighted_objective(residuals, weights.alpha, tau)


def weighted_objective(residuals: ArrayLike, alpha: ArrayLike, tau: float) -> float:
    """Σ_m (α_m)^τ h_m for precomputed residuals h."""
    return float(np.sum(np.power(np.asarray(alpha), tau) * np.asarray(residuals)))
