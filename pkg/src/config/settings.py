"""
Toolkit Configuration
=====================
Dataclass view over the defaults in `src.config.config`, passed to every
service so tests and the CLI can override single values.
"""

import logging
import os
from dataclasses import dataclass, fields, replace
from typing import Any, Dict

from src.config import config as defaults
from src.core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class RainbowConfig:
    """Configuration for the template, boundary, verifier and search services."""

    # Templates
    max_vertices: int = defaults.MAX_VERTICES
    triangle_report_cap: int = defaults.TRIANGLE_REPORT_CAP

    # Boundary
    bisection_tol: float = defaults.BISECTION_TOL
    bisection_max_iter: int = defaults.BISECTION_MAX_ITER
    boundary_tol: float = defaults.BOUNDARY_TOL
    uniqueness_scan_points: int = defaults.UNIQUENESS_SCAN_POINTS
    floor_guard: float = defaults.FLOOR_GUARD
    witness_constant: float = defaults.WITNESS_CONSTANT

    # Verifier
    appendix_grid: int = defaults.APPENDIX_GRID
    appendix_lipschitz: float = defaults.APPENDIX_LIPSCHITZ
    strict_margin: float = defaults.STRICT_MARGIN

    # Search
    exhaustive_limit: int = defaults.EXHAUSTIVE_LIMIT
    allow_pruned_n5: bool = False
    search_budget: int = defaults.SEARCH_BUDGET
    search_seed: int = defaults.SEARCH_SEED
    c_param: float = defaults.C_PARAM
    probe_slack: float = defaults.PROBE_SLACK

    # Execution and logging
    workers: int = defaults.WORKERS
    log_level: str = defaults.LOG_LEVEL
    log_format: str = defaults.LOG_FORMAT

    @classmethod
    def from_env(cls, prefix: str = "RAINBOW_") -> 'RainbowConfig':
        """
        Create configuration from environment variables.

        Only logging and the worker count are read; result-affecting values
        keep their defaults.

        Args:
            prefix: Environment variable prefix (default: RAINBOW_)

        Returns:
            RainbowConfig instance

        Raises:
            ConfigurationError: If the worker count is not an integer
        """
        raw_workers = os.getenv(f'{prefix}WORKERS', str(defaults.WORKERS))
        try:
            workers = int(raw_workers)
        except ValueError:
            raise ConfigurationError(f"{prefix}WORKERS must be an integer, got {raw_workers!r}")
        return cls(
            workers=workers,
            log_level=os.getenv(f'{prefix}LOG_LEVEL', defaults.LOG_LEVEL).upper(),
            log_format=os.getenv(f'{prefix}LOG_FORMAT', defaults.LOG_FORMAT),
        )

    def with_overrides(self, **overrides: Any) -> 'RainbowConfig':
        """Return a copy with the given (non-None) fields replaced."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigurationError(f"Unknown configuration fields: {sorted(unknown)}")
        updated = replace(self, **{k: v for k, v in overrides.items() if v is not None})
        updated.validate()
        return updated

    def validate(self) -> bool:
        """
        Validate the configuration.

        Returns:
            True if configuration is valid

        Raises:
            ConfigurationError: If a value is out of range
        """
        if self.max_vertices < 1:
            raise ConfigurationError("max_vertices must be positive")
        if self.exhaustive_limit < 0:
            raise ConfigurationError("exhaustive_limit must be non-negative")
        if self.exhaustive_limit > 5:
            raise ConfigurationError("exhaustive enumeration beyond n = 5 is not supported")
        if not 0 < self.bisection_tol < 1e-6:
            raise ConfigurationError("bisection_tol must lie in (0, 1e-6)")
        if self.bisection_max_iter < 1:
            raise ConfigurationError("bisection_max_iter must be positive")
        if self.appendix_grid < 2:
            raise ConfigurationError("appendix_grid must be at least 2")
        if self.appendix_lipschitz <= 0:
            raise ConfigurationError("appendix_lipschitz must be positive")
        if self.c_param <= 0:
            raise ConfigurationError("c_param must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if self.log_level not in LOG_LEVELS:
            raise ConfigurationError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        return True

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _load_default_config() -> RainbowConfig:
    try:
        return RainbowConfig.from_env()
    except ConfigurationError as e:
        # app.run reads the environment again and exits with a usage error
        logger.warning(f"Ignoring environment configuration: {e}")
        return RainbowConfig()


# Default configuration instance
default_config = _load_default_config()
