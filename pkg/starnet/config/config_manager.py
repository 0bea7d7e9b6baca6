"""
Configuration Manager.

This module handles environment variable loading (including a local .env
file) and resolves the run settings used by the CLI and the MCP server.
"""

import os
import logging
from typing import Optional
from dotenv import load_dotenv

from ..models.scenario import DEFAULT_MAX_STATES, DEFAULT_SEEDS, RunSettings

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigManager:
    """Manages configuration for the star-network toolkit."""

    def __init__(self):
        """Initialize the configuration manager."""
        load_dotenv()

    def get_run_settings(
        self,
        threads: Optional[int] = None,
        max_states: Optional[int] = None,
        seeds: Optional[int] = None,
        log_level: Optional[str] = None,
        out_dir: Optional[str] = None,
    ) -> RunSettings:
        """
        Get the run settings.

        STARNET_THREADS takes priority over the ``threads`` argument; for every
        other setting an explicit argument wins over the environment.

        Args:
            threads: Worker count requested on the command line
            max_states: Exhaustive-search guard requested on the command line
            seeds: Seesaw restarts requested on the command line
            log_level: Logging level name
            out_dir: Output directory

        Returns:
            RunSettings object
        """
        env_threads = self._get_int('STARNET_THREADS', None)
        if env_threads is not None:
            if threads is not None and threads != env_threads:
                logger.info(f"STARNET_THREADS={env_threads} overrides --threads {threads}")
            threads = env_threads

        if max_states is None:
            max_states = self._get_int('STARNET_MAX_STATES', DEFAULT_MAX_STATES)
        if seeds is None:
            seeds = self._get_int('STARNET_SEEDS', DEFAULT_SEEDS)

        level = (log_level or os.getenv('STARNET_LOG_LEVEL', 'INFO')).upper()
        if level not in LOG_LEVELS:
            logger.warning(f"Invalid STARNET_LOG_LEVEL value '{level}', using default INFO")
            level = 'INFO'

        return RunSettings(
            threads=max(threads or 1, 1),
            max_states=max_states,
            seeds=max(seeds, 1),
            log_level=level,
            out_dir=out_dir or os.getenv('STARNET_OUT_DIR', '.'),
            host=os.getenv('HOST', '0.0.0.0'),
            port=self._get_int('PORT', 8080),
        )

    def _get_int(self, name: str, default: Optional[int]) -> Optional[int]:
        """Read an integer variable, falling back to the default on bad input."""
        raw = os.getenv(name)
        if raw is None or raw.strip() == '':
            return default
        try:
            return int(raw)
        except ValueError:
            logger.warning(f"Invalid {name} value '{raw}', using default {default}")
            return default
