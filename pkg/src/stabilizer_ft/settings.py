"""
User settings for stabilizer-ft.

Settings live in a JSON file under the XDG configuration directory and
control default seeds, size guards and where ``.stab`` files are searched.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from .exceptions import StabilizerFtError

logger = logging.getLogger(__name__)

SEED_ENV = "STABILIZER_FT_SEED"
CODE_DIR_ENV = "STABILIZER_FT_CODE_DIR"


class SettingsError(StabilizerFtError):
    """Settings file related errors."""
    pass


class SettingsData(BaseModel):
    """Persisted settings values."""

    default_seed: int = 0
    max_n: int = Field(default=64, ge=1)
    max_n_dense: int = Field(default=10, ge=1, le=14)
    code_dir: Optional[str] = None
    json_output: bool = False


class Settings:
    """
    Loads and saves settings with environment overrides.

    Search order for ``.stab`` files:
    1. STABILIZER_FT_CODE_DIR environment variable
    2. ``code_dir`` from the settings file, else <config>/codes/
    3. Path.cwd()
    """

    def __init__(self, config_file: Optional[Union[str, Path]] = None, load: bool = True):
        self.config_dir = self._get_config_dir()
        self.config_file = Path(config_file) if config_file else self.config_dir / "config.json"
        if config_file:
            self.config_dir = self.config_file.parent
        self.codes_dir = self.config_dir / "codes"
        self.data = SettingsData()
        if load:
            self._load()

    @staticmethod
    def _get_config_dir() -> Path:
        xdg_config = os.environ.get("XDG_CONFIG_HOME")
        if xdg_config:
            return Path(xdg_config) / "stabilizer-ft"
        return Path.home() / ".config" / "stabilizer-ft"

    def _load(self) -> None:
        if not self.config_file.exists():
            return
        try:
            with open(self.config_file, "r") as f:
                raw = json.load(f)
            self.data = SettingsData.model_validate(raw)
        except (json.JSONDecodeError, OSError) as e:
            raise SettingsError(f"Failed to load settings from {self.config_file}: {e}")
        except ValidationError as e:
            raise SettingsError(f"Invalid settings in {self.config_file}: {e}")
        logger.debug("Loaded settings from %s", self.config_file)

    def save(self) -> None:
        """Write the settings as JSON, creating the config directory."""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        try:
            with open(self.config_file, "w") as f:
                json.dump(self.data.model_dump(), f, indent=2)
        except OSError as e:
            raise SettingsError(f"Failed to save settings to {self.config_file}: {e}")

    def initialize(self) -> None:
        """Write default settings and create the code directory."""
        self.data = SettingsData(code_dir=str(self.codes_dir))
        self.save()
        self.codes_dir.mkdir(parents=True, exist_ok=True)

    @property
    def default_seed(self) -> int:
        """Seed from the environment when set, else from the settings file."""
        env_seed = os.environ.get(SEED_ENV)
        if env_seed:
            try:
                return int(env_seed)
            except ValueError:
                raise SettingsError(f"{SEED_ENV} must be an integer, got '{env_seed}'")
        return self.data.default_seed

    def code_directories(self) -> list[Path]:
        """
        Directories searched for ``.stab`` files, in order.

        Returns:
            The environment directory if set, then the configured or default
            code directory, then the working directory
        """
        directories = []
        env_dir = os.environ.get(CODE_DIR_ENV)
        if env_dir:
            directories.append(Path(env_dir).expanduser())
        if self.data.code_dir:
            directories.append(Path(self.data.code_dir).expanduser())
        else:
            directories.append(self.codes_dir)
        directories.append(Path.cwd())
        return directories

    def get_value(self, key: str) -> Any:
        if key not in SettingsData.model_fields:
            raise SettingsError(f"Unknown setting '{key}'. Known: {', '.join(SettingsData.model_fields)}")
        return getattr(self.data, key)

    def set_value(self, key: str, value: str) -> None:
        """Set a value from its command-line text form and validate it."""
        if key not in SettingsData.model_fields:
            raise SettingsError(f"Unknown setting '{key}'. Known: {', '.join(SettingsData.model_fields)}")
        update = self.data.model_dump()
        update[key] = None if value.lower() in ("", "none", "null") else value
        try:
            self.data = SettingsData.model_validate(update)
        except ValidationError as e:
            raise SettingsError(f"Invalid value for '{key}': {e.errors()[0]['msg']}")

    def as_dict(self) -> dict[str, Any]:
        return self.data.model_dump()
