"""
Unit tests for the configuration module.
"""

import os
import pytest
from unittest.mock import patch

from starnet.config.config_manager import ConfigManager
from starnet.exceptions import InvalidScenarioError
from starnet.models.scenario import DEFAULT_MAX_STATES, DEFAULT_SEEDS, RunSettings, ScenarioConfig


class TestScenarioConfig:
    """Test ScenarioConfig model."""

    def test_scenario_creation(self):
        """Test creating a ScenarioConfig instance."""
        cfg = ScenarioConfig.build(3, 5)

        assert cfg.n == 3
        assert cfg.m == 5
        assert cfg.copies == 2  # floor(m/2)
        assert cfg.num_terms == 16
        assert cfg.full_copies is True

    def test_explicit_copies(self):
        """Test that fewer copies than floor(m/2) are allowed but flagged."""
        cfg = ScenarioConfig.build(2, 4, 1)

        assert cfg.copies == 1
        assert cfg.full_copies is False

    @pytest.mark.parametrize("n, m, copies", [(1, 2, None), (2, 1, None), (2, 4, 0)])
    def test_invalid_scenarios(self, n, m, copies):
        """Test that out-of-family parameters raise InvalidScenarioError."""
        with pytest.raises(InvalidScenarioError):
            ScenarioConfig.build(n, m, copies)

    def test_scenario_is_frozen(self):
        """Test that scenarios cannot be mutated."""
        cfg = ScenarioConfig.build(2, 2)
        with pytest.raises(Exception):
            cfg.n = 5


class TestRunSettings:
    """Test RunSettings model."""

    def test_defaults(self):
        """Test default run settings."""
        settings = RunSettings()

        assert settings.threads == 1
        assert settings.max_states == DEFAULT_MAX_STATES
        assert settings.seeds == DEFAULT_SEEDS
        assert settings.log_level == "INFO"
        assert settings.port == 8080

    def test_threads_must_be_positive(self):
        """Test that zero threads are rejected."""
        with pytest.raises(Exception):
            RunSettings(threads=0)


class TestConfigManager:
    """Test ConfigManager class."""

    def test_config_manager_creation(self):
        """Test creating a ConfigManager instance."""
        config_manager = ConfigManager()
        assert config_manager is not None

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults_without_environment(self):
        """Test run settings with nothing set."""
        settings = ConfigManager().get_run_settings()

        assert settings.threads == 1
        assert settings.max_states == DEFAULT_MAX_STATES
        assert settings.seeds == DEFAULT_SEEDS
        assert settings.out_dir == "."
        assert settings.host == "0.0.0.0"

    @patch.dict(os.environ, {
        'STARNET_THREADS': '4',
        'STARNET_MAX_STATES': '1024',
        'STARNET_SEEDS': '7',
        'STARNET_LOG_LEVEL': 'debug',
        'STARNET_OUT_DIR': '/tmp/starnet'
    }, clear=True)
    def test_settings_from_env(self):
        """Test getting run settings from environment variables."""
        settings = ConfigManager().get_run_settings()

        assert settings.threads == 4
        assert settings.max_states == 1024
        assert settings.seeds == 7
        assert settings.log_level == "DEBUG"
        assert settings.out_dir == "/tmp/starnet"

    @patch.dict(os.environ, {'STARNET_THREADS': '6'}, clear=True)
    def test_env_threads_take_priority(self):
        """Test that STARNET_THREADS overrides the command-line value."""
        settings = ConfigManager().get_run_settings(threads=2)
        assert settings.threads == 6

    @patch.dict(os.environ, {'STARNET_MAX_STATES': '1024', 'STARNET_SEEDS': '7'}, clear=True)
    def test_arguments_take_priority_over_env(self):
        """Test that explicit arguments win for the other settings."""
        settings = ConfigManager().get_run_settings(max_states=32, seeds=3)

        assert settings.max_states == 32
        assert settings.seeds == 3

    @patch.dict(os.environ, {'STARNET_THREADS': 'many', 'PORT': 'invalid'}, clear=True)
    def test_invalid_integers(self):
        """Test handling of invalid integer settings."""
        settings = ConfigManager().get_run_settings()

        # Should default for invalid values
        assert settings.threads == 1
        assert settings.port == 8080

    @patch.dict(os.environ, {'STARNET_LOG_LEVEL': 'chatty'}, clear=True)
    def test_invalid_log_level(self):
        """Test that an unknown log level falls back to INFO."""
        settings = ConfigManager().get_run_settings()
        assert settings.log_level == "INFO"
