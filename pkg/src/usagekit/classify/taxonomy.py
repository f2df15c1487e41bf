"""The canonical screen/widget category taxonomy, stored as an editable TOML file."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Tuple

from usagekit import tomlio
from usagekit.errors import UnknownCategory


@dataclass(frozen=True)
class ScreenCategory:
    name: str
    description: str = ""


@dataclass(frozen=True)
class WidgetCategory:
    name: str
    terms: Tuple[str, ...]


@dataclass(frozen=True)
class CanonicalTaxonomy:
    version: str
    screens: Tuple[ScreenCategory, ...]
    widgets: Tuple[WidgetCategory, ...]

    def __post_init__(self) -> None:
        for group in (self.screens, self.widgets):
            names = [c.name for c in group]
            if len(set(names)) != len(names):
                raise ValueError("taxonomy category names must be unique per kind")
        for w in self.widgets:
            if not w.terms:
                raise ValueError(f"widget category {w.name!r} has no terms")

    @property
    def screen_names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.screens)

    @property
    def widget_names(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.widgets)

    def screen_index(self, name: str) -> int:
        try:
            return self.screen_names.index(name)
        except ValueError:
            raise UnknownCategory(f"unknown screen category {name!r}") from None

    def widget_terms(self, name: str) -> Tuple[str, ...]:
        for w in self.widgets:
            if w.name == name:
                return w.terms
        raise UnknownCategory(f"unknown widget category {name!r}")

    def require_screen(self, name: str) -> str:
        if name not in self.screen_names:
            raise UnknownCategory(f"unknown screen category {name!r}")
        return name

    def require_widget(self, name: str) -> str:
        if name not in self.widget_names:
            raise UnknownCategory(f"unknown widget category {name!r}")
        return name


def load_taxonomy(path: Path | str) -> CanonicalTaxonomy:
    data = tomlio.read_toml(path)
    return taxonomy_from_dict(data)


def taxonomy_from_dict(data: Dict) -> CanonicalTaxonomy:
    return CanonicalTaxonomy(
        version=str(data.get("version", "unversioned")),
        screens=tuple(
            ScreenCategory(name=s["name"], description=s.get("description", ""))
            for s in data.get("screens", [])
        ),
        widgets=tuple(
            WidgetCategory(name=w["name"], terms=tuple(w.get("terms", ())))
            for w in data.get("widgets", [])
        ),
    )


def save_taxonomy(tax: CanonicalTaxonomy, path: Path | str) -> None:
    tomlio.write_toml(
        path,
        {
            "version": tax.version,
            "screens": [
                {"name": c.name, "description": c.description} for c in tax.screens
            ],
            "widgets": [{"name": w.name, "terms": list(w.terms)} for w in tax.widgets],
        },
    )


def default_taxonomy() -> CanonicalTaxonomy:
    """The taxonomy shipped with the package (also used by the fixture apps)."""
    ref = resources.files("usagekit").joinpath("data/taxonomy.toml")
    return taxonomy_from_dict(tomlio.parse_toml(ref.read_text(encoding="utf-8")))
