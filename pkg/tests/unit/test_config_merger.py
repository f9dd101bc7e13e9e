"""Tests for configuration merging functionality."""

from pathlib import Path

import pytest

from s3nmf.config import (
    ConfigFile,
    ConfigurationMerger,
    ConfigurationSource,
    ConfigValidationError,
    Mode,
    RawConfiguration,
    SourceType,
)


def _raw(source_type: SourceType, **sections) -> RawConfiguration:
    source = ConfigurationSource(
        source_type=source_type, path=Path(f"/{source_type.value}.yml"), exists=True
    )
    return RawConfiguration(source=source, data=ConfigFile(**sections))


class TestConfigurationMerger:
    def setup_method(self):
        self.merger = ConfigurationMerger()

    def test_no_configurations_gives_defaults(self):
        configuration = self.merger.merge_configurations([])

        assert configuration.sources == []
        assert configuration.settings.pipeline.b == 20
        assert configuration.settings.pipeline.c is None

    def test_later_sources_override_per_key(self):
        configuration = self.merger.merge_configurations(
            [
                _raw(SourceType.DEFAULT, pipeline={"b": 20, "tau": 2.0, "seed": 0}),
                _raw(SourceType.USER, pipeline={"b": 10}),
                _raw(SourceType.LOCAL, pipeline={"seed": 4}),
            ]
        )

        pipeline = configuration.settings.pipeline
        assert (pipeline.b, pipeline.tau, pipeline.seed) == (10, 2.0, 4)
        assert len(configuration.sources) == 3

    def test_sections_merge_independently(self):
        configuration = self.merger.merge_configurations(
            [
                _raw(SourceType.DEFAULT, solver={"tol": 1e-3, "max_inner_iters": 500}),
                _raw(SourceType.PROJECT, solver={"tol": 1e-5}, affinity={"k": 7}),
            ]
        )

        settings = configuration.settings
        assert settings.pipeline.solver.tol == 1e-5
        assert settings.pipeline.solver.max_inner_iters == 500
        assert settings.affinity.k == 7

    def test_pipeline_tau_reaches_solver(self):
        configuration = self.merger.merge_configurations(
            [_raw(SourceType.USER, pipeline={"tau": 4.0, "mode": "soft"})]
        )

        assert configuration.settings.pipeline.solver.tau == 4.0
        assert configuration.settings.pipeline.mode is Mode.SOFT

    def test_invalid_merged_value_names_sources(self):
        with pytest.raises(ConfigValidationError, match="Merged configuration is invalid") as e:
            self.merger.merge_configurations(
                [
                    _raw(SourceType.DEFAULT, pipeline={"b": 20}),
                    _raw(SourceType.USER, pipeline={"b": 1}),
                ]
            )

        assert "/user.yml" in e.value.source_path
        assert "pipeline -> b" in str(e.value)
        assert e.value.section == "pipeline"

    def test_zero_threads_rejected(self):
        with pytest.raises(ConfigValidationError, match="threads must be non-zero") as e:
            self.merger.merge_configurations([_raw(SourceType.USER, run={"threads": 0})])

        assert e.value.section == "run"
        assert "(section: run)" in str(e.value)
