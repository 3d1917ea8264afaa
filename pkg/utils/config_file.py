"""
Flat ``key=value`` run configuration: one key per line, ``#`` starts a comment.
Numeric values may be written as multiples of pi (``pi``, ``2*pi``, ``0.5pi``).
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Mapping, Optional

from pydantic import ValidationError

from models.config import RunConfig
from utils.errors import ConfigError

_PI_RE = re.compile(r"^\s*([-+]?\d*\.?\d*(?:[eE][-+]?\d+)?)\s*\*?\s*pi\s*$")


def _expand_pi(value: str) -> str:
    match = _PI_RE.match(value)
    if not match:
        return value
    coeff = match.group(1)
    factor = float(coeff) if coeff not in ("", "+", "-") else (-1.0 if coeff == "-" else 1.0)
    return repr(factor * math.pi)


def parse_config_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = _expand_pi(value)
    return entries


def build_config(entries: Mapping[str, str]) -> RunConfig:
    try:
        return RunConfig(**entries)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ())) or "config"
        raise ConfigError(f"invalid config ({where}): {first.get('msg')}") from exc


def load_config(path: Optional[str | Path], overrides: Optional[Mapping[str, str]] = None) -> RunConfig:
    entries: dict[str, str] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        entries = parse_config_text(text)
    for key, value in (overrides or {}).items():
        if value is not None:
            entries[key] = _expand_pi(value) if isinstance(value, str) else value
    return build_config(entries)
