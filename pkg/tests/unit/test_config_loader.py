"""Tests for configuration loading functionality."""

import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import pytest
from platformdirs import user_config_dir

from s3nmf.config import (
    ConfigFile,
    ConfigurationLoader,
    ConfigurationSource,
    ConfigValidationError,
    SourceType,
)


def _source(path: Path, source_type: SourceType = SourceType.PROJECT) -> ConfigurationSource:
    return ConfigurationSource(source_type=source_type, path=path, exists=path.exists())


class TestConfigurationLoader:
    def setup_method(self):
        self.loader = ConfigurationLoader()

    def test_find_default_config(self):
        source = self.loader.find_default_config()

        assert source.source_type == SourceType.DEFAULT
        assert source.path.name == "default.yml"
        assert source.path.parent.name == "config"
        assert source.exists

    @patch.dict(os.environ, {}, clear=True)
    def test_find_user_config_default_location(self):
        source = self.loader.find_user_config()

        assert source.source_type == SourceType.USER
        assert source.path == Path(user_config_dir("s3nmf")) / "config.yml"

    @patch.dict(os.environ, {"S3NMF_CONFIG": "/custom/config/path"}, clear=True)
    def test_find_user_config_environment_override(self):
        source = self.loader.find_user_config()

        assert source.path == Path("/custom/config/path") / "config.yml"
        assert not source.exists

    @patch.dict(os.environ, {"S3NMF_CONFIG": "relative/path"}, clear=True)
    def test_user_config_must_be_absolute(self):
        with pytest.raises(ConfigValidationError, match="must be an absolute path"):
            self.loader.find_user_config()

    @patch.dict(os.environ, {"S3NMF_CONFIG": "/tmp/../etc"}, clear=True)
    def test_user_config_rejects_parent_components(self):
        with pytest.raises(ConfigValidationError, match=r"cannot contain '\.\.'"):
            self.loader.find_user_config()

    @patch.dict(os.environ, {}, clear=True)
    def test_find_project_configs_in_cwd(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            with patch("s3nmf.config.loader.Path.cwd", return_value=Path(tmpdir)):
                project, local = self.loader.find_project_configs()

            assert project.source_type == SourceType.PROJECT
            assert local.source_type == SourceType.LOCAL
            assert project.path == Path(tmpdir) / ".s3nmf" / "config.yml"
            assert local.path == Path(tmpdir) / ".s3nmf" / "config.local.yml"
            assert not project.exists

    @patch.dict(os.environ, {"S3NMF_PROJECT_DIR": "/no/such/project"}, clear=True)
    def test_project_dir_must_exist(self):
        with pytest.raises(ConfigValidationError, match="S3NMF_PROJECT_DIR directory does not"):
            self.loader.find_project_configs()

    def test_find_project_configs_from_env_var(self, isolated_config):
        settings_dir = isolated_config["project"] / ".s3nmf"
        settings_dir.mkdir()
        (settings_dir / "config.yml").write_text("pipeline:\n  b: 5\n")
        (settings_dir / "config.local.yml").write_text("pipeline:\n  seed: 3\n")

        project, local = self.loader.find_project_configs()

        assert project.exists
        assert local.exists

    def test_discover_all_sources_order(self):
        sources = self.loader.discover_all_sources()

        assert [s.source_type for s in sources] == [
            SourceType.DEFAULT,
            SourceType.USER,
            SourceType.PROJECT,
            SourceType.LOCAL,
        ]

    def test_load_yaml_file_success(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("pipeline:\n  b: 8\n  tau: 1.5\nsolver:\n  tol: 1.0e-4\n")

        raw = self.loader.load_yaml_file(_source(path))

        assert isinstance(raw.data, ConfigFile)
        assert raw.data.pipeline == {"b": 8, "tau": 1.5}
        assert raw.data.solver == {"tol": 1e-4}

    def test_load_yaml_file_missing(self, temp_config_dir):
        assert self.loader.load_yaml_file(_source(temp_config_dir / "missing.yml")) is None

    def test_load_yaml_file_empty(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("# nothing here\n")

        assert self.loader.load_yaml_file(_source(path)) is None

    def test_load_yaml_file_not_a_mapping(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("- a\n- b\n")

        with pytest.raises(ConfigValidationError, match="must contain a YAML object"):
            self.loader.load_yaml_file(_source(path))

    def test_load_yaml_file_invalid_syntax(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("pipeline: [unclosed\n")

        with pytest.raises(ConfigValidationError, match="Invalid YAML syntax"):
            self.loader.load_yaml_file(_source(path))

    def test_load_yaml_file_unknown_key(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("pipeline:\n  ensemble_size: 5\n")

        with pytest.raises(ConfigValidationError, match="Unknown pipeline setting") as exc_info:
            self.loader.load_yaml_file(_source(path))

        assert exc_info.value.source_path == str(path)

    def test_load_yaml_file_unknown_section(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("rules: []\n")

        with pytest.raises(ConfigValidationError, match="validation failed") as exc_info:
            self.loader.load_yaml_file(_source(path))

        assert exc_info.value.section == "rules"

    def test_invalid_section_value_names_the_section(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("affinity: 5\n")

        with pytest.raises(ConfigValidationError, match="affinity") as exc_info:
            self.loader.load_yaml_file(_source(path))

        assert exc_info.value.section == "affinity"

    def test_tau_belongs_to_pipeline_section(self, temp_config_dir):
        path = temp_config_dir / "config.yml"
        path.write_text("solver:\n  tau: 3.0\n")

        with pytest.raises(ConfigValidationError, match="Unknown solver setting"):
            self.loader.load_yaml_file(_source(path))

    def test_load_all_configurations_skips_missing(self):
        raws = self.loader.load_all_configurations()

        assert [raw.source.source_type for raw in raws] == [SourceType.DEFAULT]
