"""
Run Configuration
Flat key=value configuration with defaults, file values and command line overrides
"""

from pathlib import Path
from typing import Dict, Iterable, List, Optional

import numpy as np
from dotenv import dotenv_values

from constants.defaults import DEFAULT_CONFIG, RETIRED_CONFIG_KEYS
from log.logging import logger
from utils.errors import ConfigurationError


class RunConfig:
    """Resolved configuration for a single CLI run"""

    def __init__(
        self,
        path: Optional[str] = None,
        overrides: Optional[Iterable[str]] = None,
    ):
        self.configVars: Dict[str, str] = dict(DEFAULT_CONFIG)
        self.source = "defaults"
        if path is not None:
            self._loadConfigFile(path)
        for item in overrides or ():
            self.applyOverride(item)

    def _loadConfigFile(self, path: str) -> Dict[str, str]:
        "Load all keys from a key=value file."

        config_path = Path(path)
        if not config_path.exists():
            raise ConfigurationError(
                f"Config file not found: {path}", details={"path": str(path)}
            )

        try:
            file_values = dotenv_values(config_path)
        except Exception as e:
            logger.error(f"Error reading config file {path}: {str(e)}")
            raise ConfigurationError(f"Unreadable config file: {path}") from e

        for key, value in file_values.items():
            self.setVar(key, "" if value is None else value)

        self.source = str(config_path)
        logger.note(f"Loaded {len(file_values)} keys from {config_path}")
        return self.configVars

    def setVar(self, key: str, value: str) -> None:
        key = key.strip()
        if key in RETIRED_CONFIG_KEYS:
            logger.warning(f"Ignoring {key}: {RETIRED_CONFIG_KEYS[key]}")
            return
        if key not in DEFAULT_CONFIG:
            raise ConfigurationError(f"Unknown config key: {key}", details={"key": key})
        self.configVars[key] = str(value).strip()

    def applyOverride(self, item: str) -> None:
        "Apply a single `key=value` override from the command line."
        if "=" not in item:
            raise ConfigurationError(f"Override must look like key=value: {item}")
        key, value = item.split("=", 1)
        self.setVar(key, value)

    def getStr(self, key: str) -> str:
        if key not in self.configVars:
            raise ConfigurationError(f"Unknown config key: {key}", details={"key": key})
        return self.configVars[key]

    def getFloat(self, key: str) -> float:
        raw = self.getStr(key)
        try:
            return float(raw)
        except ValueError:
            raise ConfigurationError(
                f"Expected a number for {key}: {raw}", details={"key": key}
            )

    def getInt(self, key: str) -> int:
        raw = self.getStr(key)
        try:
            return int(raw)
        except ValueError:
            raise ConfigurationError(
                f"Expected an integer for {key}: {raw}", details={"key": key}
            )

    def getFloatList(self, key: str) -> List[float]:
        raw = self.getStr(key)
        try:
            return [float(item) for item in raw.split(",") if item.strip()]
        except ValueError:
            raise ConfigurationError(
                f"Expected a comma separated list for {key}: {raw}",
                details={"key": key},
            )

    def getVector(self, key: str, d: int) -> np.ndarray:
        """
        Read a d-vector; a single value means the first axis only
        """
        values = self.getFloatList(key)
        if len(values) == 1 and d > 1:
            values = values + [0.0] * (d - 1)
        if len(values) != d:
            raise ConfigurationError(
                f"{key} needs {d} components, got {len(values)}",
                details={"key": key},
            )
        return np.asarray(values, dtype=float)

    def getAllVars(self) -> Dict[str, str]:
        "Get all resolved configuration values."
        return self.configVars.copy()

    def resolvedText(self) -> str:
        "Sorted key=value lines echoed next to every output."
        return "".join(f"{key}={self.configVars[key]}\n" for key in sorted(self.configVars))
