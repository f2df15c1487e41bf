"""Model database: one text file per model plus a locked index.

Layout under the database root:

    index.toml                     id -> usage, provenance
    index.lock                     write serialization
    models/<usage_id>/<model_id>   model files
    models/<usage_id>/merged       cached union of the usage's models
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from filelock import FileLock

from usagekit.errors import ModelParseError, NoModelForUsage
from usagekit.irmodel.model import (
    CanonicalState,
    IrModel,
    Transition,
    merge_models,
    validate_model,
)
from usagekit.tomlio import read_toml, write_toml
from usagekit.video.types import ActionKind

FORMAT_HEADER = "usagekit-irmodel v1"
MERGED_NAME = "merged"


def serialize_model(model: IrModel) -> str:
    lines = [
        FORMAT_HEADER,
        f"usage: {model.usage_id}",
        f"taxonomy: {model.taxonomy_version}",
        "provenance: " + ",".join(f"{a}/{r}" for a, r in model.provenance),
        "STATES",
    ]
    for state in model.states.values():
        lines.append(f"{state.name} {int(state.is_start)} {int(state.is_end)}")
    lines.append("TRANSITIONS")
    for t in sorted(model.transitions, key=lambda t: (t.from_state,) + t.sort_key()):
        lines.append(f"{t.from_state} {t.widget or '-'} {t.action.value} {t.to_state}")
    return "\n".join(lines) + "\n"


def deserialize_model(text: str) -> IrModel:
    lines = text.splitlines()
    try:
        if lines[0] != FORMAT_HEADER:
            raise ModelParseError("unrecognized model header")
        usage = _field(lines[1], "usage")
        taxonomy = _field(lines[2], "taxonomy")
        prov_raw = _field(lines[3], "provenance")
        provenance: List[Tuple[str, str]] = []
        if prov_raw:
            for pair in prov_raw.split(","):
                app_id, _, rec_id = pair.partition("/")
                provenance.append((app_id, rec_id))
        if lines[4] != "STATES":
            raise ModelParseError("missing STATES section")
        states: Dict[str, CanonicalState] = {}
        i = 5
        while i < len(lines) and lines[i] != "TRANSITIONS":
            name, start, end = lines[i].split()
            states[name] = CanonicalState(name, bool(int(start)), bool(int(end)))
            i += 1
        if i >= len(lines):
            raise ModelParseError("missing TRANSITIONS section")
        transitions = set()
        for line in lines[i + 1:]:
            if not line.strip():
                continue
            from_state, widget, action, to_state = line.split()
            transitions.add(Transition(
                from_state=from_state,
                widget=None if widget == "-" else widget,
                action=ActionKind(action),
                to_state=to_state,
            ))
        model = IrModel(
            usage_id=usage,
            states=states,
            transitions=frozenset(transitions),
            provenance=provenance,
            taxonomy_version=taxonomy,
        )
        validate_model(model)
        return model
    except ModelParseError:
        raise
    except (ValueError, IndexError) as exc:
        raise ModelParseError(f"malformed model file: {exc}") from exc


def _field(line: str, name: str) -> str:
    prefix = f"{name}:"
    if not line.startswith(prefix):
        raise ModelParseError(f"expected field {name!r}, got {line!r}")
    return line[len(prefix):].strip()


@dataclass(frozen=True)
class ModelInfo:
    model_id: str
    usage_id: str
    provenance: Tuple[Tuple[str, str], ...]


class ModelDb:
    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._index_path = self.root / "index.toml"
        self._lock = FileLock(str(self.root / "index.lock"))

    # -- index ---------------------------------------------------------------

    def _read_index(self) -> List[dict]:
        if not self._index_path.exists():
            return []
        return read_toml(self._index_path).get("models", [])

    def _write_index(self, entries: List[dict]) -> None:
        write_toml(self._index_path, {"models": entries})

    # -- operations ----------------------------------------------------------

    def store(self, model: IrModel) -> str:
        text = serialize_model(model)
        model_id = "m-" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
        with self._lock:
            model_dir = self.root / "models" / model.usage_id
            model_dir.mkdir(parents=True, exist_ok=True)
            (model_dir / model_id).write_text(text, encoding="utf-8")
            entries = self._read_index()
            if not any(e["id"] == model_id for e in entries):
                entries.append({
                    "id": model_id,
                    "usage": model.usage_id,
                    "provenance": [list(p) for p in model.provenance],
                })
                self._write_index(entries)
            cache = model_dir / MERGED_NAME
            if cache.exists():
                cache.unlink()
        return model_id

    def list_models(self, usage_id: Optional[str] = None) -> List[ModelInfo]:
        infos = [
            ModelInfo(
                model_id=e["id"],
                usage_id=e["usage"],
                provenance=tuple(tuple(p) for p in e.get("provenance", [])),
            )
            for e in self._read_index()
        ]
        if usage_id is not None:
            infos = [i for i in infos if i.usage_id == usage_id]
        return infos

    def load(self, model_id: str) -> IrModel:
        for entry in self._read_index():
            if entry["id"] == model_id:
                path = self.root / "models" / entry["usage"] / model_id
                return deserialize_model(path.read_text(encoding="utf-8"))
        raise KeyError(f"no model with id {model_id!r}")

    def merged_model(self, usage_id: str) -> IrModel:
        """Union of every stored model for the usage, cached on disk."""
        infos = self.list_models(usage_id)
        if not infos:
            raise NoModelForUsage(f"no models stored for usage {usage_id!r}")
        cache = self.root / "models" / usage_id / MERGED_NAME
        if cache.exists():
            return deserialize_model(cache.read_text(encoding="utf-8"))
        merged = merge_models([self.load(info.model_id) for info in infos])
        with self._lock:
            cache.parent.mkdir(parents=True, exist_ok=True)
            cache.write_text(serialize_model(merged), encoding="utf-8")
        return merged
