"""k-nearest-neighbor affinity graph construction."""

import logging
import math

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .config.models import AffinityConfig, Kernel, Symmetrization
from .core import AffinityMatrix, DataMatrix, FloatArray, IntArray
from .exceptions import ParameterError

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-12


def auto_k(n: int) -> int:
    """Neighbor count floor(log2 n) + 1, clamped to [1, n - 1]."""
    if n < 2:
        raise ParameterError(f"Need at least 2 samples to pick a neighbor count, got {n}")

    k = math.floor(math.log2(n)) + 1
    return max(1, min(k, n - 1))


def resolve_k(n: int, k: int) -> int:
    """Return the effective neighbor count for ``n`` samples (``k == 0`` means automatic)."""
    if k == 0:
        return auto_k(n)

    if k < 0 or k >= n:
        raise ParameterError(f"Neighbor count must lie in [1, {n - 1}] for {n} samples, got {k}")

    return k


def distance_matrix(data: DataMatrix) -> FloatArray:
    """Dense Euclidean distances; identical rows are exactly 0 apart."""
    return squareform(pdist(data.values, metric="euclidean"))


def nearest_neighbors(distances: FloatArray, k: int) -> IntArray:
    """
    Indices of the ``k`` nearest other samples for every row.

    Ties are broken by the lower sample index so the graph is reproducible.
    """
    masked = distances.copy()
    np.fill_diagonal(masked, np.inf)
    return np.argsort(masked, axis=1, kind="stable")[:, :k]


def _kernel_weights(
    distances: FloatArray, neighbors: IntArray, kernel: Kernel
) -> FloatArray:
    match kernel:
        case Kernel.BINARY:
            return np.ones_like(distances)
        case Kernel.SELF_TUNING:
            kth = neighbors[:, -1]
            sigma = np.maximum(distances[np.arange(distances.shape[0]), kth], SIGMA_FLOOR)
            return np.exp(-(distances**2) / np.outer(sigma, sigma))


def build_affinity(data: DataMatrix, config: AffinityConfig) -> AffinityMatrix:
    """
    Build the symmetric kNN affinity W of a data matrix.

    Args:
        data: Samples in rows
        config: Neighbor count, edge kernel and symmetrization rule

    Returns:
        Affinity with zero diagonal, nonzero only between kNN-connected samples

    Raises:
        ParameterError: If the explicit neighbor count is not below the sample count
    """
    n = data.n_samples
    k = resolve_k(n, config.k)
    logger.debug(
        f"Building {config.kernel.value} kNN affinity: n={n}, k={k}, "
        f"symmetrize={config.symmetrize.value}"
    )

    distances = distance_matrix(data)
    neighbors = nearest_neighbors(distances, k)

    adjacency = np.zeros((n, n), dtype=bool)
    adjacency[np.repeat(np.arange(n), k), neighbors.ravel()] = True

    directed = np.where(adjacency, _kernel_weights(distances, neighbors, config.kernel), 0.0)

    match config.symmetrize:
        case Symmetrization.UNION:
            weights = np.maximum(directed, directed.T)
        case Symmetrization.AVERAGE:
            weights = (directed + directed.T) / 2.0

    np.fill_diagonal(weights, 0.0)
    return AffinityMatrix(weights)
