"""Config command: show configuration sources and the merged settings."""

import logging
import os

import click
import yaml

from ..config import ConfigurationManager
from ..config.loader import CONFIG_ENV_VAR, PROJECT_ENV_VAR
from .common import handle_errors, start_command, verbose_option

logger = logging.getLogger(__name__)


def _get_configuration_sources_display(config_manager: ConfigurationManager) -> list[str]:
    """Configuration source paths with existence markers, then the environment overrides."""
    result = []
    for source in config_manager.loader.discover_all_sources():
        status = "✓" if source.exists else "✗"
        result.append(f"{status} {source.display_name}: {source.path}")

    for env_var in (CONFIG_ENV_VAR, PROJECT_ENV_VAR):
        value = os.getenv(env_var)
        if value:
            result.append(f"✓ Environment: {env_var}={value}")
        else:
            result.append(f"✗ Environment: {env_var} (not set)")

    return result


def format_config_output(config_manager: ConfigurationManager) -> str:
    """Format configuration diagnostics for CLI display."""
    configuration = config_manager.load_configuration()

    lines = ["Configuration Sources:"]
    lines.extend(_get_configuration_sources_display(config_manager))
    lines.append("")
    lines.append("Merged Configuration:")
    lines.append("=" * 20)
    lines.append(
        yaml.safe_dump(configuration.settings.to_sections(), sort_keys=True).rstrip()
    )
    return "\n".join(lines)


@click.command()
@verbose_option
@click.help_option("-h", "--help")
def config(verbose) -> None:
    """Display configuration sources and the merged settings."""
    start_command("config", verbose)

    with handle_errors("config"):
        output = format_config_output(ConfigurationManager())

    click.echo(output)
