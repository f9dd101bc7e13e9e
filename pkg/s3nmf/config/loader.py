"""Discovery and parsing of the layered configuration files."""

import logging
import os
from pathlib import Path
from typing import Any

import yaml
from platformdirs import user_config_dir
from pydantic import ValidationError

from .exceptions import ConfigValidationError
from .models import ConfigFile
from .types import ConfigurationSource, RawConfiguration, SourceType

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "S3NMF_CONFIG"
PROJECT_ENV_VAR = "S3NMF_PROJECT_DIR"

CONFIG_FILENAME = "config.yml"
LOCAL_CONFIG_FILENAME = "config.local.yml"
PROJECT_SETTINGS_DIR = ".s3nmf"


def format_validation_error(error: ValidationError) -> str:
    """Flatten pydantic errors into ``location: message`` lines."""
    lines = []
    for detail in error.errors():
        location = " -> ".join(str(part) for part in detail["loc"]) or "root"
        lines.append(f"{location}: {detail['msg']}")
    return "\n".join(lines)


def error_section(error: ValidationError) -> str | None:
    """Top-level section shared by every error location, if there is one."""
    sections = {str(detail["loc"][0]) if detail["loc"] else None for detail in error.errors()}
    return sections.pop() if len(sections) == 1 else None


def _source(source_type: SourceType, path: Path) -> ConfigurationSource:
    return ConfigurationSource(source_type=source_type, path=path, exists=path.is_file())


def _env_directory(env_var: str, must_exist: bool = False) -> Path | None:
    """
    Directory named by ``env_var``, or None when the variable is unset or empty.

    Raises:
        ConfigValidationError: If the value is relative, contains '..', or is missing
            when ``must_exist`` is set
    """
    value = os.getenv(env_var)
    if not value:
        return None

    raw = Path(value).expanduser()
    if not raw.is_absolute():
        raise ConfigValidationError(f"{env_var} must be an absolute path")
    if ".." in raw.parts:
        raise ConfigValidationError(f"{env_var} cannot contain '..' path components")

    try:
        directory = raw.resolve()
    except (OSError, RuntimeError, ValueError) as e:
        raise ConfigValidationError(f"Invalid {env_var} path: {e}") from e

    if must_exist and not directory.exists():
        raise ConfigValidationError(f"{env_var} directory does not exist: {directory}")

    logger.debug(f"Using {env_var}={directory}")
    return directory


class ConfigurationLoader:
    """Finds the default, user, project and local configuration files and parses them."""

    def find_default_config(self) -> ConfigurationSource:
        return _source(SourceType.DEFAULT, Path(__file__).with_name("default.yml"))

    def find_user_config(self) -> ConfigurationSource:
        """User file in ``S3NMF_CONFIG`` when set, else in the platform config directory."""
        directory = _env_directory(CONFIG_ENV_VAR) or Path(user_config_dir("s3nmf"))
        return _source(SourceType.USER, directory / CONFIG_FILENAME)

    def find_project_configs(self) -> tuple[ConfigurationSource, ConfigurationSource]:
        """Shared and local files under ``S3NMF_PROJECT_DIR``, else the working directory."""
        root = _env_directory(PROJECT_ENV_VAR, must_exist=True) or Path.cwd()
        settings_dir = root / PROJECT_SETTINGS_DIR
        return (
            _source(SourceType.PROJECT, settings_dir / CONFIG_FILENAME),
            _source(SourceType.LOCAL, settings_dir / LOCAL_CONFIG_FILENAME),
        )

    def discover_all_sources(self) -> list[ConfigurationSource]:
        """All sources from lowest to highest priority, present or not."""
        return [self.find_default_config(), self.find_user_config(), *self.find_project_configs()]

    def load_yaml_file(self, source: ConfigurationSource) -> RawConfiguration | None:
        """
        Parse and validate one configuration file.

        Args:
            source: Configuration source to load

        Returns:
            Parsed sections, or None when the file is missing or empty

        Raises:
            ConfigValidationError: If the file cannot be read, is not a YAML mapping, or
                names unknown sections or settings
        """
        if not source.exists:
            logger.debug(f"No configuration at {source.path}")
            return None

        data = self._read(source)
        if data is None:
            logger.debug(f"Configuration file is empty: {source.path}")
            return None

        try:
            config_file = ConfigFile.model_validate(data)
        except ValidationError as e:
            raise ConfigValidationError(
                "Configuration validation failed:\n" + format_validation_error(e),
                section=error_section(e),
                source_path=str(source.path),
            ) from e

        logger.debug(f"Loaded {source.display_name} configuration from {source.path}")
        return RawConfiguration(source=source, data=config_file)

    def _read(self, source: ConfigurationSource) -> dict[str, Any] | None:
        path = str(source.path)
        try:
            with open(source.path, encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigValidationError(f"Invalid YAML syntax: {e}", source_path=path) from e
        except FileNotFoundError as e:
            raise ConfigValidationError(
                f"Configuration file not found: {path}", source_path=path
            ) from e
        except PermissionError as e:
            raise ConfigValidationError(
                "Permission denied reading configuration file", source_path=path
            ) from e

        if data is not None and not isinstance(data, dict):
            raise ConfigValidationError(
                f"Configuration file must contain a YAML object, got {type(data).__name__}",
                source_path=path,
            )
        return data

    def load_all_configurations(self) -> list[RawConfiguration]:
        """
        Load every existing configuration file in priority order.

        Raises:
            ConfigValidationError: If any file fails to load or validate
        """
        loaded = (self.load_yaml_file(source) for source in self.discover_all_sources())
        return [raw for raw in loaded if raw is not None]
