"""Flat ``key = value`` configuration files.

Keys may be dotted (``augment.rotation_factor = 0.1``) or grouped under
``[section]`` headers, which prefix the keys that follow. ``#`` starts a
comment. Values stay strings here; callers convert them per key.
"""
from __future__ import annotations

from pathlib import Path

from ..errors import ConfigError

_TRUE = {"yes", "true", "on", "1"}
_FALSE = {"no", "false", "off", "0", "none"}


def parse_config(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        full = f"{section}.{key}" if section else key
        if full in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{full}'")
        out[full] = value.strip().strip('"').strip("'")
    return out


def read_config(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, str(path))


def as_bool(value: str, key: str) -> bool:
    v = value.strip().lower()
    if v in _TRUE:
        return True
    if v in _FALSE:
        return False
    raise ConfigError(f"{key}: expected yes/no, got {value!r}")


def as_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def as_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def as_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]
