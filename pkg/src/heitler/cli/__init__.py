"""Command-line interface; see :mod:`heitler.cli.main` for commands and exit codes."""

from .config import ScenarioConfig, load_config
from .main import EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK, main, run

__all__ = ["ScenarioConfig", "load_config", "main", "run", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERICAL", "EXIT_IO"]
