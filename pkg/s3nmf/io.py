"""Dataset ingestion, affinity files, and results documents."""

import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config.loader import format_validation_error
from .config.models import LabelColumn
from .core import AffinityMatrix, DataMatrix, FloatArray, Partition
from .exceptions import AffinityValidationError, InputError
from .metrics import MetricReport, PartitionScores
from .pipeline import PipelineResult
from .utils import package_version

UTC = timezone.utc

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Features plus optional ground truth; the labels are only ever read by the metrics."""

    data: DataMatrix
    name: str
    labels: Partition | None = None

    def __post_init__(self) -> None:
        if self.labels is not None and self.labels.n_samples != self.data.n_samples:
            raise InputError(
                f"Got {self.labels.n_samples} labels for {self.data.n_samples} samples"
            )

    @property
    def n_classes(self) -> int | None:
        return None if self.labels is None else self.labels.n_clusters


def _label_key(token: str) -> str | float:
    try:
        value = float(token)
    except ValueError:
        return token
    return value if np.isfinite(value) else token


def reindex_labels(tokens: Sequence[str]) -> Partition:
    """
    Map label tokens to 0..c-1 in order of first appearance.

    Numeric tokens are compared by value, so "1", "1.0" and "1e0" name the same class.
    """
    mapping: dict[str | float, int] = {}
    labels = [mapping.setdefault(_label_key(token), len(mapping)) for token in tokens]
    return Partition(np.array(labels, dtype=np.int64), len(mapping))


@dataclass(frozen=True, eq=False)
class _Table:
    """Cells of a delimited file as strings, with the physical line of every row."""

    path: Path
    cells: NDArray[np.str_]
    lines: list[int]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def error(self, message: str, row: int | None, column: int | None = None) -> InputError:
        line = None if row is None else self.lines[row]
        return InputError(message, path=str(self.path), row=row, column=column, line=line)

    def floats(self, columns: Sequence[int]) -> FloatArray:
        """
        Convert the given columns to floats.

        Raises:
            InputError: At the first cell that is not a number
        """
        selected = self.cells[:, list(columns)]
        try:
            return selected.astype(np.float64)
        except ValueError:
            for (i, j), cell in np.ndenumerate(selected):
                try:
                    float(cell)
                except ValueError:
                    raise self.error(f"Non-numeric value {str(cell)!r}", i, columns[j]) from None
            raise


def _decode(path: Path) -> str:
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise InputError(
            f"File is not valid UTF-8: {e.reason} at byte {e.start}",
            path=str(path),
            line=raw[: e.start].count(b"\n") + 1,
        ) from e


def _read_table(path: Path, delimiter: str | None) -> _Table:
    """
    Split a delimited text file into a string table.

    Blank lines and '#' comments are skipped. Without an explicit delimiter the first data
    line decides: ',' when it has one, else runs of whitespace.

    Raises:
        InputError: If the file is not UTF-8, holds no data rows or has ragged rows
    """
    lines = _decode(path).splitlines()
    data = [(number, line) for number, line in enumerate(lines, 1) if _content(line)]
    if not data:
        raise InputError("File contains no data rows", path=str(path))

    if delimiter is None:
        delimiter = "," if "," in _content(data[0][1]) else None

    numbers = [number for number, _ in data]
    try:
        cells = np.loadtxt(
            [line for _, line in data], dtype=str, delimiter=delimiter, comments="#", ndmin=2
        )
    except ValueError as e:
        widths = [len(_content(line).split(delimiter)) for _, line in data]
        row = next((i for i, width in enumerate(widths) if width != widths[0]), None)
        if row is None:
            raise InputError(f"Unreadable table: {e}", path=str(path)) from e
        raise InputError(
            f"Expected {widths[0]} columns, got {widths[row]}",
            path=str(path),
            row=row,
            column=min(widths[row], widths[0]),
            line=numbers[row],
        ) from e

    return _Table(path=path, cells=np.char.strip(cells), lines=numbers)


def _content(line: str) -> str:
    return line.split("#", 1)[0].strip()


def load_dataset(
    path: str | Path, label_column: LabelColumn = "none", delimiter: str | None = None
) -> Dataset:
    """
    Parse a delimited text file with one sample per row.

    Args:
        path: UTF-8 file to read; blank lines and '#' comments are skipped
        label_column: ``"none"``, ``"last"`` or a zero-based column index holding the labels
        delimiter: Cell separator; ``None`` picks ',' when the first row has one, else whitespace

    Returns:
        Dataset named after the file stem

    Raises:
        InputError: On undecodable or empty files, ragged rows or non-numeric features,
            with the row, column and physical line
    """
    path = Path(path)
    table = _read_table(path, delimiter)
    width = table.width

    if label_column == "none":
        label_index = None
    elif label_column == "last":
        label_index = width - 1
    else:
        label_index = int(label_column)
        if label_index >= width:
            raise InputError(
                f"Label column {label_index} is out of range for {width} columns", path=str(path)
            )

    feature_columns = [j for j in range(width) if j != label_index]
    if not feature_columns:
        raise InputError(
            "No feature columns left after removing the label column", path=str(path)
        )

    values = table.floats(feature_columns)
    labels = None
    if label_index is not None:
        labels = reindex_labels(table.cells[:, label_index].tolist())

    try:
        data = DataMatrix(values)
    except InputError as e:
        # report the column in file coordinates
        column = None if e.column is None else feature_columns[e.column]
        raise table.error(e.message, e.row, column) from e

    logger.debug(f"Loaded dataset {path}: n={data.n_samples}, d={data.n_features}")
    return Dataset(data=data, name=path.stem, labels=labels)


def dataset_digest(data: DataMatrix) -> str:
    """sha256 of the feature values; labels are not part of the digest."""
    return hashlib.sha256(np.ascontiguousarray(data.values).tobytes()).hexdigest()


def save_affinity(matrix: AffinityMatrix, path: str | Path, delimiter: str = ",") -> None:
    """Write a dense matrix with 17 significant digits, enough to reload it bit for bit."""
    np.savetxt(path, matrix.values, fmt="%.17g", delimiter=delimiter, encoding="utf-8")


def load_affinity(path: str | Path, delimiter: str | None = None) -> AffinityMatrix:
    """
    Read a dense affinity matrix.

    Raises:
        InputError: On undecodable files, ragged rows or non-numeric cells
        AffinityValidationError: On asymmetric, negative or non-finite entries
    """
    path = Path(path)
    table = _read_table(path, delimiter)
    values = table.floats(range(table.width))

    try:
        return AffinityMatrix(values)
    except AffinityValidationError as e:
        raise AffinityValidationError(
            e.message, path=str(path), row=e.row, column=e.column, line=table.lines[e.row]
        ) from e


class RunManifest(BaseModel):
    """Everything needed to reproduce a run."""

    model_config = ConfigDict(extra="forbid")

    command: str
    dataset: str
    dataset_digest: str
    settings: dict[str, dict[str, Any]]
    seed: int
    version: str = Field(default_factory=package_version)
    affinity_source: str = "knn"
    started_at: str = Field(default_factory=lambda: datetime.now(UTC).isoformat())
    finished_at: str | None = None


class MemberRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    index: int
    weight: float
    labels: list[int]
    scores: PartitionScores | None = None


class SummaryRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mean: PartitionScores
    std: dict[str, float]


class IterationRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    index: int
    anmi: float
    affinity_digest: str
    inner_iterations: int
    objective: float
    converged: bool
    zero_rows: int


class ResultsDocument(BaseModel):
    """Serialized form of a run: members, summary, traces and the manifest."""

    model_config = ConfigDict(extra="forbid")

    manifest: RunManifest
    n_clusters: int
    selected_iteration: int
    stop_reason: str
    best_member: int
    anmi_trace: list[float]
    objective_history: list[float]
    iterations: list[IterationRecord]
    members: list[MemberRecord]
    summary: SummaryRecord | None = None

    def partitions(self) -> list[Partition]:
        return [Partition(np.array(m.labels), self.n_clusters) for m in self.members]


def build_results(
    result: PipelineResult, report: MetricReport | None, manifest: RunManifest
) -> ResultsDocument:
    members = [
        MemberRecord(
            index=m,
            weight=float(result.weights.alpha[m]),
            labels=partition.labels.tolist(),
            scores=None if report is None else report.members[m],
        )
        for m, partition in enumerate(result.partitions)
    ]
    return ResultsDocument(
        manifest=manifest,
        n_clusters=result.partitions[0].n_clusters,
        selected_iteration=result.selected_iteration,
        stop_reason=result.stop_reason,
        best_member=int(np.argmax(result.weights.alpha)),
        anmi_trace=result.anmi_trace,
        objective_history=result.objective_history,
        iterations=[IterationRecord(**vars(record)) for record in result.iterations],
        members=members,
        summary=None if report is None else SummaryRecord(mean=report.mean, std=report.std),
    )


def write_yaml(data: dict[str, Any], path: str | Path) -> None:
    """Write a mapping as YAML with sorted keys so documents diff cleanly."""
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(data, f, sort_keys=True, default_flow_style=None, allow_unicode=True)


def save_results(
    result: PipelineResult,
    report: MetricReport | None,
    manifest: RunManifest,
    path: str | Path,
) -> ResultsDocument:
    """Write the results document for a run and return it."""
    document = build_results(result, report, manifest)
    write_yaml(document.model_dump(mode="json"), path)
    logger.debug(f"Wrote results to {path}")
    return document


def load_results(path: str | Path) -> ResultsDocument:
    """
    Read a results document written by :func:`save_results`.

    Raises:
        InputError: If the file is not UTF-8 YAML or does not match the document layout
    """
    path = Path(path)
    try:
        data = yaml.safe_load(_decode(path))
    except yaml.YAMLError as e:
        raise InputError(f"Invalid YAML syntax: {e}", path=str(path)) from e

    try:
        return ResultsDocument.model_validate(data)
    except ValidationError as e:
        raise InputError(
            "Invalid results document:\n" + format_validation_error(e), path=str(path)
        ) from e
