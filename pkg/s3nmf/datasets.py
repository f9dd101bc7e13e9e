"""Built-in datasets used by the benchmark and ablation commands."""

import logging
from pathlib import Path

import numpy as np
from sklearn.datasets import load_iris, make_blobs

from .config.models import LabelColumn
from .core import DataMatrix, Partition
from .exceptions import InputError, ParameterError
from .io import Dataset, load_dataset

logger = logging.getLogger(__name__)

BLOB_SEPARATION = 4.0

# three centers on an equilateral triangle with side BLOB_SEPARATION
BLOB_CENTERS = BLOB_SEPARATION * np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])

BUILTIN_DATASETS = ("iris", "blobs")


def make_blobs_dataset(n: int = 150, seed: int = 0) -> Dataset:
    """Three isotropic unit-variance Gaussian blobs in the plane."""
    if n < len(BLOB_CENTERS):
        raise ParameterError(f"Need at least {len(BLOB_CENTERS)} samples, got {n}")

    values, labels = make_blobs(
        n_samples=n, centers=BLOB_CENTERS, cluster_std=1.0, random_state=seed
    )
    return Dataset(
        data=DataMatrix(values),
        name=f"blobs-{n}",
        labels=Partition(labels, len(BLOB_CENTERS)),
    )


def load_builtin(name: str, seed: int = 0) -> Dataset:
    """
    Load a bundled dataset by name.

    Args:
        name: ``iris`` or ``blobs``
        seed: Generator seed for synthetic datasets

    Raises:
        InputError: If the name is unknown
    """
    match name:
        case "iris":
            bunch = load_iris()
            return Dataset(
                data=DataMatrix(bunch.data), name="iris", labels=Partition(bunch.target, 3)
            )
        case "blobs":
            dataset = make_blobs_dataset(150, seed)
            return Dataset(data=dataset.data, name="blobs", labels=dataset.labels)
        case _:
            raise InputError(
                f"Unknown dataset {name!r} (built-in: {', '.join(BUILTIN_DATASETS)})"
            )


def resolve_dataset(
    source: str,
    label_column: LabelColumn = "none",
    delimiter: str | None = None,
    seed: int = 0,
) -> Dataset:
    """Load ``source`` as a file when it exists, else as a built-in dataset name."""
    path = Path(source)
    if path.is_file():
        return load_dataset(path, label_column=label_column, delimiter=delimiter)

    if source in BUILTIN_DATASETS:
        logger.debug(f"Using built-in dataset {source}")
        return load_builtin(source, seed)

    raise InputError(f"No such dataset file or built-in dataset: {source}", path=source)
