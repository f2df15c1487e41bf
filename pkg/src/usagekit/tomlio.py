"""Small TOML helpers: strict reads via tomli, deterministic writes via toml."""
from __future__ import annotations

from pathlib import Path
from typing import Any

import toml
import tomli


def read_toml(path: str | Path) -> dict[str, Any]:
    with open(path, "rb") as fh:
        return tomli.load(fh)


def parse_toml(text: str) -> dict[str, Any]:
    return tomli.loads(text)


def write_toml(path: str | Path, data: dict[str, Any]) -> None:
    Path(path).write_text(toml.dumps(data), encoding="utf-8")


def dump_toml(data: dict[str, Any]) -> str:
    return toml.dumps(data)
