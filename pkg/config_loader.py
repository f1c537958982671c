"""
Configuration loader for the chain strength toolkit.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

CONFIG_ENV = "CHAINBOUND_CONFIG"
LOG_LEVEL_ENV = "CHAINBOUND_LOG_LEVEL"


def resolve_config_path(config_path: Optional[str] = None) -> str:
    """Explicit path first, then CHAINBOUND_CONFIG (from the environment or .env), then config.yaml."""
    load_dotenv()
    return config_path or os.getenv(CONFIG_ENV) or "config.yaml"


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration from YAML file with validation."""
    config_path = resolve_config_path(config_path)
    config_file = Path(config_path)

    if not config_file.exists():
        logger.warning(f"Config file {config_path} not found. Using default configuration.")
        return apply_env_overrides(get_default_config())

    try:
        with open(config_file, 'r', encoding='utf-8') as f:
            config = yaml.safe_load(f) or {}

        if not isinstance(config, dict):
            raise ValueError("top level of the config file must be a mapping")

        for section in ('enumeration', 'bounds'):
            if section not in config:
                logger.warning(f"Missing config section: {section}")

        config = merge_with_defaults(config)
        logger.debug("Configuration loaded successfully")
        return apply_env_overrides(config)

    except Exception as e:
        logger.error(f"Failed to load configuration from {config_path}: {e}")
        logger.info("Using default configuration")
        return apply_env_overrides(get_default_config())


def get_default_config() -> Dict[str, Any]:
    return {
        'arithmetic': {
            'exact': True,
        },
        'enumeration': {
            'max_qubits': 24,
            'block_size': 1 << 16,
            'workers': 1,
        },
        'bounds': {
            'max_chain_size': 30,
            'distribution': 'choi2',
        },
        'optimizer': {
            'resolution_bits': 10,
            'max_passes': 64,
        },
        'oracle': {
            'max_physical_qubits': 22,
            'epsilon': '1/64',
        },
        'annealing': {
            't_initial': 5.0,
            't_final': 0.05,
            'sweeps': 1000,
            'restarts': 20,
            'seed': 1234,
        },
        'sweep': {
            'target_probability': 0.999,
            'anneal_time': 2.0,
            'samples': 200,
            'cap': None,
        },
        'logging': {
            'level': 'INFO',
        },
    }


def merge_with_defaults(config: Dict[str, Any]) -> Dict[str, Any]:
    """Merge loaded config with default values for missing keys."""
    defaults = get_default_config()

    for section, section_defaults in defaults.items():
        if not isinstance(config.get(section), dict):
            config[section] = section_defaults
        else:
            for key, default_value in section_defaults.items():
                if key not in config[section]:
                    config[section][key] = default_value

    return config


def apply_env_overrides(config: Dict[str, Any]) -> Dict[str, Any]:
    level = os.getenv(LOG_LEVEL_ENV)
    if level:
        config['logging']['level'] = level.upper()
    return config
