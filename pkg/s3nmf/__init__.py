"""Self-supervised symmetric nonnegative matrix factorization ensembles."""

from .affinity import build_affinity
from .core import AffinityMatrix, DataMatrix, Factor, Partition, WeightVector
from .pipeline import PipelineResult, run, run_base_snmf
from .utils import package_version

__version__ = package_version()

__all__ = [
    "AffinityMatrix",
    "DataMatrix",
    "Factor",
    "Partition",
    "PipelineResult",
    "WeightVector",
    "__version__",
    "build_affinity",
    "run",
    "run_base_snmf",
]
