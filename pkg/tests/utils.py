"""Shared test builders for matrices, partitions and dataset files."""

from pathlib import Path

import numpy as np

from s3nmf.core import AffinityMatrix, Factor, Partition


def block_affinity(*sizes: int) -> AffinityMatrix:
    """Noiseless block-diagonal affinity: 1 within a block (diagonal included), 0 across."""
    labels = np.repeat(np.arange(len(sizes)), sizes)
    return AffinityMatrix((labels[:, None] == labels[None, :]).astype(float))


def block_labels(*sizes: int) -> Partition:
    return Partition(np.repeat(np.arange(len(sizes)), sizes), len(sizes))


def random_affinity(rng: np.random.Generator, n: int) -> AffinityMatrix:
    upper = rng.random((n, n))
    return AffinityMatrix((upper + upper.T) / 2.0)


def random_factor(rng: np.random.Generator, n: int, c: int) -> Factor:
    return Factor(rng.uniform(0.05, 1.0, (n, c)))


def partition(*labels: int) -> Partition:
    return Partition.from_labels(list(labels))


def write_dataset(path: Path, rows: list[list[object]], delimiter: str = ",") -> Path:
    path.write_text("\n".join(delimiter.join(str(cell) for cell in row) for row in rows) + "\n")
    return path


def two_cluster_rows(seed: int = 0, per_cluster: int = 10) -> list[list[object]]:
    """Two well separated 2-d clusters with a trailing label column."""
    rng = np.random.default_rng(seed)
    rows: list[list[object]] = []
    for label, center in enumerate(((0.0, 0.0), (20.0, 20.0))):
        for point in rng.normal(center, 0.5, (per_cluster, 2)):
            rows.append([repr(float(point[0])), repr(float(point[1])), label])
    return rows
