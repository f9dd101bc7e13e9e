"""Core data types for configuration system."""

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .models import ConfigFile, Settings


class SourceType(Enum):
    """Configuration source types."""

    DEFAULT = "default"
    USER = "user"
    PROJECT = "project"
    LOCAL = "local"


@dataclass
class ConfigurationSource:
    """Represents a configuration source (file location and metadata)."""

    source_type: SourceType
    path: Path
    exists: bool

    @property
    def display_name(self) -> str:
        """Human-friendly name for this source type."""
        return {
            SourceType.DEFAULT: "Default",
            SourceType.USER: "User",
            SourceType.PROJECT: "Project",
            SourceType.LOCAL: "Local",
        }[self.source_type]


@dataclass
class RawConfiguration:
    """Raw configuration data loaded from YAML before merging."""

    source: ConfigurationSource
    data: ConfigFile


@dataclass
class Configuration:
    """Final merged configuration and the sources it came from."""

    sources: list[ConfigurationSource] = field(default_factory=list)
    settings: Settings = field(default_factory=Settings)
