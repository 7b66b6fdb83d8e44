#!/usr/bin/env python3
"""
Configuration Manager for the zero-error graph entropy toolkit
Loads caps, tolerances, logging and simulation settings from a JSON file,
with ${VAR} / ${VAR:-default} placeholders resolved from the environment
"""

import os
import json
import logging
import re
from pathlib import Path
from typing import Dict, Any, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

CONFIG_ENV_VAR = "ZEROERROR_CONFIG"


class Limits(BaseModel):
    """Resource caps and numeric tolerances shared by every solver"""
    model_config = ConfigDict(frozen=True)

    tolerance: float = 1e-9
    max_vertices_all_sets: int = 24
    max_vertices_maximal_sets: int = 40
    max_vertices_chromatic: int = 26
    max_vertices_oracle: int = 12
    max_vertices_perfect: int = 48
    max_power_vertices: int = 128
    max_iters: int = 100000
    koerner_oracle_vertices: int = 5
    koerner_oracle_sets: int = 5
    koerner_oracle_grid: int = 64
    k_cap: int = 12

    @field_validator("tolerance")
    @classmethod
    def tolerance_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("tolerance must be > 0")
        return v

    @field_validator(
        "max_vertices_all_sets", "max_vertices_maximal_sets", "max_vertices_chromatic",
        "max_vertices_oracle", "max_vertices_perfect", "max_power_vertices", "max_iters",
        "koerner_oracle_vertices", "koerner_oracle_sets", "koerner_oracle_grid", "k_cap",
    )
    @classmethod
    def cap_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("caps must be positive")
        return v


DEFAULT_LIMITS = Limits()


def resolve_limits(limits: Optional[Limits]) -> Limits:
    return DEFAULT_LIMITS if limits is None else limits


class ConfigManager:
    def __init__(self, config_file: Union[str, Path, None] = None):
        load_dotenv()
        if config_file is None:
            config_file = os.getenv(CONFIG_ENV_VAR) or Path(__file__).parent / "config.json"
        self.config_file = Path(config_file)
        self.config: Dict[str, Any] = {}
        self.load_config()

    def load_config(self) -> None:
        """Load configuration from file and environment variables"""
        try:
            if self.config_file.exists():
                content = self.config_file.read_text(encoding="utf-8")
                content = self._substitute_env_vars(content)
                self.config = json.loads(content)
            else:
                self.config = self._get_default_config()
                logging.warning(f"Config file {self.config_file} not found, using defaults")

            self._validate_config()

        except Exception as e:
            logging.error(f"Failed to load configuration: {e}")
            self.config = self._get_default_config()

    def _substitute_env_vars(self, content: str) -> str:
        """Replace ${VAR_NAME} and ${VAR_NAME:-default} with environment values"""
        def replace_var(match):
            var_name, _, default = match.group(1).partition(":-")
            value = os.getenv(var_name)
            if value is not None:
                return value
            return default if ":-" in match.group(1) else match.group(0)

        return re.sub(r'\$\{([^}]+)\}', replace_var, content)

    def _get_default_config(self) -> Dict[str, Any]:
        """Return default configuration"""
        return {
            "limits": DEFAULT_LIMITS.model_dump(),
            "logging": {
                "level": os.getenv("ZEROERROR_LOG_LEVEL", "WARNING"),
                "log_dir": "",
                "max_file_size_mb": 10,
                "backup_count": 5
            },
            "simulation": {
                "trials": 100000,
                "seed": 7,
                "chunk_size": 10000
            }
        }

    def _validate_config(self) -> None:
        """Validate required configuration fields"""
        required_fields = [
            ("limits", "tolerance"),
            ("logging", "level"),
            ("simulation", "seed"),
        ]

        for section, field in required_fields:
            if section not in self.config or field not in self.config[section]:
                raise ValueError(f"Missing required configuration: {section}.{field}")

        try:
            Limits(**self.config["limits"])
        except ValidationError as e:
            raise ValueError(f"Invalid limits section: {e}") from e

    def get(self, section: str, key: str, default: Any = None) -> Any:
        """Get configuration value"""
        return self.config.get(section, {}).get(key, default)

    def get_section(self, section: str) -> Dict[str, Any]:
        """Get entire configuration section"""
        return self.config.get(section, {})

    def get_limits(self, **overrides: Any) -> Limits:
        """Build the Limits model, letting non-None overrides win"""
        values = dict(self.get_section("limits"))
        values.update({k: v for k, v in overrides.items() if v is not None})
        return Limits(**values)

    def save_config(self, config_dict: Dict[str, Any]) -> None:
        """Save configuration to file"""
        try:
            self.config_file.write_text(json.dumps(config_dict, indent=2), encoding="utf-8")
            self.config = config_dict
            logging.info(f"Configuration saved to {self.config_file}")
        except Exception as e:
            logging.error(f"Failed to save configuration: {e}")
