"""
Configuration management for fixed-point process analyses.
"""

import copy
from typing import Dict, Any, Optional

import yaml


DEFAULT_CONFIG: Dict[str, Any] = {
    'group': {
        'cap': 2_000_000,
    },
    'process': {
        'max_levels': 4,
        'support_cap': 1_000_000,
    },
    'sampler': {
        'trials': 100_000,
        'seed': 0,
        'progress': False,
    },
    'verify': {
        'mc_trials': 100_000,
        'mc_seeds': 20,
    },
    'output': {
        'machine_readable': False,
    },
}


class Config:
    """Configuration manager for the analyzer and the command line."""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration.

        Args:
            config_path: Path to a YAML configuration file. If None, uses the
                default configuration.
        """
        self.config_path = config_path
        self.config = self._load_config() if config_path else self._get_default_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file, layered over the defaults."""
        try:
            with open(self.config_path, 'r') as f:
                loaded = yaml.safe_load(f)
        except FileNotFoundError:
            return self._get_default_config()

        config = self._get_default_config()
        if isinstance(loaded, dict):
            _merge(config, loaded)
        return config

    def _get_default_config(self) -> Dict[str, Any]:
        """Return default configuration."""
        return copy.deepcopy(DEFAULT_CONFIG)

    def get(self, key_path: str, default=None):
        """Get configuration value using dot notation.

        Args:
            key_path: Dot-separated path to configuration value (e.g., 'group.cap')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        keys = key_path.split('.')
        value = self.config

        for key in keys:
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default

        return value

    def set(self, key_path: str, value: Any) -> None:
        """Override a configuration value using dot notation."""
        keys = key_path.split('.')
        target = self.config
        for key in keys[:-1]:
            target = target.setdefault(key, {})
        target[keys[-1]] = value


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> None:
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value
