"""
Configuration file reader.

A config file holds ``key = value`` lines; blank lines and ``#`` comments are
ignored. Keys are flag names with dashes or underscores (``grad-steps`` or
``grad_steps``); values are strings that RunConfig validates.
"""

from pathlib import Path
from typing import Dict, Union

from core.errors import NormalTVError


class ConfigFileError(NormalTVError, ValueError):
    """Malformed config file."""

    def __init__(self, message: str, path: str, line: int):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


# flag names whose config key differs from the RunConfig field
KEY_ALIASES = {
    "lambda": "lambda_",
}


def normalize_key(key: str) -> str:
    key = key.strip().lstrip("-").replace("-", "_")
    return KEY_ALIASES.get(key, key)


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Parse a config file into RunConfig field names and raw values.

    Raises:
        ConfigFileError: On a line without '=' or a repeated key
        OSError: If the file cannot be read
    """
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigFileError(f"expected 'key = value', got {text!r}", str(path), lineno)
            key, value = text.split("=", 1)
            key = normalize_key(key)
            if not key:
                raise ConfigFileError("empty key", str(path), lineno)
            if key in values:
                raise ConfigFileError(f"duplicate key {key!r}", str(path), lineno)
            values[key] = value.strip()
    return values
