"""Configuration merging logic for hierarchical configuration sources."""

import logging
from typing import Any

from pydantic import ValidationError

from .exceptions import ConfigValidationError
from .loader import error_section, format_validation_error
from .models import SECTION_MODELS, Settings
from .types import Configuration, RawConfiguration

logger = logging.getLogger(__name__)


class ConfigurationMerger:
    """Merges multiple configuration sources into a single configuration."""

    def merge_configurations(self, raw_configs: list[RawConfiguration]) -> Configuration:
        """
        Merge multiple raw configurations into validated settings.

        Configuration hierarchy: default → user → project → local.
        Later configurations override earlier ones key by key within a section.

        Args:
            raw_configs: List of raw configurations in hierarchical order

        Returns:
            Merged configuration

        Raises:
            ConfigValidationError: If the merged values fail validation
        """
        if not raw_configs:
            return Configuration()

        sections = self._merge_sections(raw_configs)

        try:
            settings = Settings.from_sections(sections)
        except ValidationError as e:
            sources = ", ".join(str(raw.source.path) for raw in raw_configs)
            raise ConfigValidationError(
                "Merged configuration is invalid:\n" + format_validation_error(e),
                section=error_section(e),
                source_path=sources,
            ) from e

        return Configuration(
            sources=[raw.source for raw in raw_configs],
            settings=settings,
        )

    def _merge_sections(self, raw_configs: list[RawConfiguration]) -> dict[str, dict[str, Any]]:
        merged: dict[str, dict[str, Any]] = {section: {} for section in SECTION_MODELS}

        for raw_config in raw_configs:
            for section in SECTION_MODELS:
                values = getattr(raw_config.data, section)
                if values:
                    logger.debug(
                        f"{raw_config.source.display_name} config sets {section}: "
                        f"{', '.join(sorted(values))}"
                    )
                merged[section].update(values)

        return merged
