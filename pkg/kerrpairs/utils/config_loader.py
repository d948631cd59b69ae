"""
kerrpairs/utils/config_loader.py: TOML configuration parsing utilities.

Only imports kerrpairs.core.errors, so shared.py can depend on it.
"""

from __future__ import annotations

import copy
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping

from kerrpairs.core.errors import InvalidConfig

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib  # type: ignore

logger = logging.getLogger("kerrpairs.cli")


def load_toml(path: Path) -> Dict[str, Any]:
    """Read a TOML file; missing files and syntax errors raise InvalidConfig."""
    path = Path(path)
    if not path.exists():
        raise InvalidConfig(f"config file not found: {path}")
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise InvalidConfig(f"{path}: {e}") from e
    logger.debug("loaded config %s (sections: %s)", path, ", ".join(sorted(data)))
    return data


def parse_value(raw: str) -> Any:
    """Interpret an override value as a TOML literal, else as a bare string.

    "0.5" → 0.5, "true" → True, "[1, 2]" → [1, 2], "fig3b" → "fig3b".
    """
    try:
        return tomllib.loads(f"value = {raw}")["value"]
    except tomllib.TOMLDecodeError:
        return raw


def parse_override(item: str) -> tuple[str, str, Any]:
    """Split a `section.key=value` override."""
    if "=" not in item:
        raise InvalidConfig(f"override '{item}' is not of the form section.key=value")
    dotted, raw = item.split("=", 1)
    parts = dotted.strip().split(".")
    if len(parts) != 2 or not all(parts):
        raise InvalidConfig(f"override key '{dotted}' must be section.key")
    return parts[0], parts[1], parse_value(raw.strip())


def merge_config(
    defaults: Mapping[str, Mapping[str, Any]],
    file_data: Mapping[str, Any] | None = None,
    overrides: Iterable[str] = (),
) -> Dict[str, Dict[str, Any]]:
    """defaults < file < overrides; unknown sections or keys raise InvalidConfig."""
    merged = copy.deepcopy({name: dict(section) for name, section in defaults.items()})

    def _apply(section: str, key: str, value: Any, origin: str) -> None:
        if section not in merged:
            raise InvalidConfig(f"{origin}: unknown section [{section}]")
        if key not in merged[section]:
            known = ", ".join(sorted(merged[section]))
            raise InvalidConfig(f"{origin}: unknown key '{key}' in [{section}] (known: {known})")
        merged[section][key] = value

    for section, table in (file_data or {}).items():
        if not isinstance(table, Mapping):
            raise InvalidConfig(f"config file: top-level key '{section}' must be a table")
        for key, value in table.items():
            _apply(section, key, value, "config file")

    for item in overrides:
        section, key, value = parse_override(item)
        _apply(section, key, value, "--set")

    return merged
