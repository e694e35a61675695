"""Logging configuration for nsc-toolkit commands.

The bundled ``log-config.toml`` keeps the run loggers under
``nsc_toolkit.solver`` at INFO and quiets the FFT and checkpoint
loggers under ``nsc_toolkit.spectral``. ``--dev`` raises all of them.
"""

import tomllib
import typing
from importlib import resources
from logging import config

PACKAGE_LOGGER = 'nsc_toolkit'

Level = typing.Literal['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']


# Minimal type checking for the configuration that we rely upon
class _LoggerConfig(typing.TypedDict, total=False):
    level: Level
    handlers: list[str]
    propagate: bool


class _LoggingConfig(typing.TypedDict, total=False):
    loggers: dict[str, _LoggerConfig]


def get_log_config() -> _LoggingConfig:
    """Load the bundled log-config.toml.

    Returns:
        dict: Logging configuration dictionary suitable for
            logging.dictConfig()

    """
    log_config_file = resources.files('nsc_toolkit') / 'log-config.toml'
    return typing.cast(
        _LoggingConfig,
        typing.cast(object, tomllib.loads(log_config_file.read_text())),
    )


def package_loggers(log_config: _LoggingConfig) -> list[str]:
    """Names of the nsc_toolkit loggers a config sets explicitly."""
    return sorted(
        name
        for name in log_config.get('loggers', {})
        if name == PACKAGE_LOGGER or name.startswith(f'{PACKAGE_LOGGER}.')
    )


def configure_logging(
    log_config: _LoggingConfig | None = None, dev: bool = False
) -> None:
    """Configure logging using dictConfig.

    Args:
        log_config: Optional logging config dict. If None, loads from
            log-config.toml
        dev: If True, sets the package logger and every nsc_toolkit
            sub-logger the config names to DEBUG; third-party loggers
            keep their levels

    """
    if log_config is None:
        log_config = get_log_config()

    if dev:
        loggers = log_config.setdefault('loggers', {})
        loggers.setdefault(PACKAGE_LOGGER, {})
        for name in package_loggers(log_config):
            loggers[name]['level'] = 'DEBUG'

    config.dictConfig(log_config)  # type: ignore[arg-type]
