"""Clustering evaluation metrics and ensemble agreement."""

from collections.abc import Sequence
from itertools import combinations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import linear_sum_assignment
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score
from sklearn.metrics.cluster import contingency_matrix, pair_confusion_matrix

from .core import Partition
from .exceptions import ParameterError, ShapeError

METRIC_NAMES = ("acc", "nmi", "pur", "ari", "f1")


def _check_same_size(p: Partition, q: Partition) -> None:
    if p.n_samples != q.n_samples:
        raise ShapeError(
            f"Partitions cover different sample counts: {p.n_samples} and {q.n_samples}"
        )


def nmi(p: Partition, q: Partition) -> float:
    """
    Normalized mutual information with arithmetic-mean normalization.

    Partitions that group the samples identically, single-cluster pairs included, score
    exactly 1.0 so that unanimous ensembles tie in ANMI.
    """
    _check_same_size(p, q)
    if p.same_relation(q):
        return 1.0
    value = normalized_mutual_info_score(p.labels, q.labels, average_method="arithmetic")
    return float(np.clip(value, 0.0, 1.0))


def anmi(partitions: Sequence[Partition]) -> float:
    """Mean NMI over all unordered pairs of partitions."""
    if len(partitions) < 2:
        raise ParameterError(f"ANMI needs at least 2 partitions, got {len(partitions)}")

    scores = [nmi(p, q) for p, q in combinations(partitions, 2)]
    return float(np.mean(scores))


def acc(pred: Partition, truth: Partition) -> float:
    """Accuracy under the best one-to-one matching of clusters to classes."""
    _check_same_size(pred, truth)
    overlap = contingency_matrix(truth.labels, pred.labels)
    rows, columns = linear_sum_assignment(overlap, maximize=True)
    return float(overlap[rows, columns].sum() / pred.n_samples)


def purity(pred: Partition, truth: Partition) -> float:
    _check_same_size(pred, truth)
    overlap = contingency_matrix(truth.labels, pred.labels)
    return float(overlap.max(axis=0).sum() / pred.n_samples)


def ari(pred: Partition, truth: Partition) -> float:
    """Adjusted Rand index; identical partitions with a degenerate denominator score 1."""
    _check_same_size(pred, truth)
    return float(adjusted_rand_score(truth.labels, pred.labels))


def f1(pred: Partition, truth: Partition) -> float:
    """
    Pairwise F1 over same-cluster sample pairs.

    With no predicted pairs the score is 1 when the truth has none either, else 0.
    """
    _check_same_size(pred, truth)
    confusion = pair_confusion_matrix(truth.labels, pred.labels)
    tp = int(confusion[1, 1])
    fp = int(confusion[0, 1])
    fn = int(confusion[1, 0])

    if tp + fp == 0:
        return 1.0 if fn == 0 else 0.0

    return 2.0 * tp / (2.0 * tp + fp + fn)


class PartitionScores(BaseModel):
    """All metrics of one partition against the ground truth."""

    model_config = ConfigDict(frozen=True)

    acc: float = Field(ge=0.0, le=1.0)
    nmi: float = Field(ge=0.0, le=1.0)
    pur: float = Field(ge=0.0, le=1.0)
    ari: float = Field(ge=-1.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)


class MetricReport(BaseModel):
    """Per-member scores of an ensemble with their mean and population standard deviation."""

    model_config = ConfigDict(frozen=True)

    members: list[PartitionScores]
    mean: PartitionScores
    std: dict[str, float]


def evaluate_partition(pred: Partition, truth: Partition) -> PartitionScores:
    return PartitionScores(
        acc=acc(pred, truth),
        nmi=nmi(pred, truth),
        pur=purity(pred, truth),
        ari=ari(pred, truth),
        f1=f1(pred, truth),
    )


def evaluate(partitions: Sequence[Partition], truth: Partition) -> MetricReport:
    """
    Score every member partition against the ground truth.

    Raises:
        ParameterError: If no partitions are given
        ShapeError: If a partition and the truth cover different sample counts
    """
    if not partitions:
        raise ParameterError("Nothing to evaluate: no partitions given")

    return summarize([evaluate_partition(p, truth) for p in partitions])


def summarize(members: Sequence[PartitionScores]) -> MetricReport:
    """Mean and population standard deviation of a set of scores."""
    if not members:
        raise ParameterError("Nothing to summarize: no scores given")

    table = np.array([[getattr(s, name) for name in METRIC_NAMES] for s in members])

    mean = PartitionScores(**dict(zip(METRIC_NAMES, table.mean(axis=0).tolist(), strict=True)))
    std = dict(zip(METRIC_NAMES, table.std(axis=0, ddof=0).tolist(), strict=True))
    return MetricReport(members=list(members), mean=mean, std=std)
