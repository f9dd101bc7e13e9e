"""Configuration loading and management for s3nmf."""

from .exceptions import ConfigValidationError
from .loader import ConfigurationLoader
from .manager import ConfigurationManager
from .merger import ConfigurationMerger
from .models import (
    AffinityConfig,
    ConfigFile,
    Kernel,
    Mode,
    PipelineConfig,
    RunSettings,
    Settings,
    SolverConfig,
    Symmetrization,
)
from .types import Configuration, ConfigurationSource, RawConfiguration, SourceType

__all__ = [
    "AffinityConfig",
    "ConfigFile",
    "Configuration",
    "ConfigurationLoader",
    "ConfigurationManager",
    "ConfigurationMerger",
    "ConfigurationSource",
    "ConfigValidationError",
    "Kernel",
    "Mode",
    "PipelineConfig",
    "RawConfiguration",
    "RunSettings",
    "Settings",
    "SolverConfig",
    "SourceType",
    "Symmetrization",
]
