"""Integration tests for the CLI."""

import os
import subprocess
import sys
import tempfile
from pathlib import Path

import yaml

from tests.utils import two_cluster_rows, write_dataset


def _get_clean_env():
    """Get environment variables with config paths pointing to empty directories."""
    env = os.environ.copy()
    temp_dir = tempfile.mkdtemp()
    user_dir = Path(temp_dir) / "user_config"
    project_dir = Path(temp_dir) / "project"

    user_dir.mkdir(parents=True)
    project_dir.mkdir(parents=True)

    env["S3NMF_CONFIG"] = str(user_dir)
    env["S3NMF_PROJECT_DIR"] = str(project_dir)
    return env


def _s3nmf(*args: str, env: dict[str, str] | None = None) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "s3nmf.cli", *args],
        capture_output=True,
        text=True,
        env=env or _get_clean_env(),
    )


class TestCLIIntegration:
    def test_help(self):
        result = _s3nmf("--help")

        assert result.returncode == 0
        assert "Self-supervised SNMF ensemble clustering" in result.stdout
        assert "certify" in result.stdout

    def test_unknown_command(self):
        result = _s3nmf("cluster")

        assert result.returncode == 2
        assert "No such command" in result.stderr


class TestRunIntegration:
    def test_run_then_eval(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            dataset = write_dataset(Path(tmpdir) / "points.csv", two_cluster_rows(seed=3))
            results = Path(tmpdir) / "results.yml"

            run = _s3nmf(
                "run",
                str(dataset),
                "--label-column",
                "last",
                "-b",
                "4",
                "--max-outer",
                "3",
                "--threads",
                "2",
                "-o",
                str(results),
            )
            evaluation = _s3nmf("eval", str(results), str(dataset))

            assert run.returncode == 0, run.stderr
            assert "Selected outer iteration" in run.stdout
            assert evaluation.returncode == 0, evaluation.stderr
            assert "mean±std:" in evaluation.stdout

            document = yaml.safe_load(results.read_text())
            assert document["manifest"]["command"] == "run"
            assert len(document["members"]) == 4

    def test_bad_input_file_exit_code(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            dataset = Path(tmpdir) / "bad.csv"
            dataset.write_text("1,2\n3\n")

            result = _s3nmf("run", str(dataset), "-c", "2")

            assert result.returncode == 2
            assert "Expected 2 columns" in result.stderr
            assert result.stdout == ""

    def test_project_configuration_applies(self):
        env = _get_clean_env()
        settings_dir = Path(env["S3NMF_PROJECT_DIR"]) / ".s3nmf"
        settings_dir.mkdir()
        (settings_dir / "config.yml").write_text(
            "pipeline:\n  b: 3\n  max_outer_iters: 2\nrun:\n  label_column: last\n"
        )

        with tempfile.TemporaryDirectory() as tmpdir:
            dataset = write_dataset(Path(tmpdir) / "points.csv", two_cluster_rows(seed=4))
            results = Path(tmpdir) / "results.yml"

            result = _s3nmf("run", str(dataset), "-o", str(results), env=env)

            assert result.returncode == 0, result.stderr
            document = yaml.safe_load(results.read_text())
            assert len(document["members"]) == 3
            assert len(document["anmi_trace"]) <= 2
            assert document["summary"] is not None


class TestCertifyIntegration:
    def test_small_suite_passes(self):
        result = _s3nmf("certify", "--instances", "5", "--oracle-cases", "10")

        assert result.returncode == 0, result.stderr
        assert "Certified 5/5 instances" in result.stdout
