"""Pytest configuration and shared fixtures."""

import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from s3nmf.config import PipelineConfig, SolverConfig
from tests.utils import block_affinity, two_cluster_rows, write_dataset


@pytest.fixture(autouse=True)
def isolated_config():
    """Point user and project configuration at empty directories."""
    with tempfile.TemporaryDirectory() as tmpdir:
        user_dir = Path(tmpdir) / "user_config"
        project_dir = Path(tmpdir) / "project"
        user_dir.mkdir()
        project_dir.mkdir()
        with patch.dict(
            os.environ, {"S3NMF_CONFIG": str(user_dir), "S3NMF_PROJECT_DIR": str(project_dir)}
        ):
            yield {"user": user_dir, "project": project_dir}


@pytest.fixture
def temp_config_dir():
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_blocks():
    return block_affinity(5, 5)


@pytest.fixture
def small_pipeline_config():
    return PipelineConfig(
        b=4,
        c=2,
        max_outer_iters=3,
        seed=0,
        solver=SolverConfig(max_inner_iters=300, tol=1e-6),
    )


@pytest.fixture
def labeled_dataset_file(temp_config_dir):
    return write_dataset(temp_config_dir / "two_clusters.csv", two_cluster_rows())
