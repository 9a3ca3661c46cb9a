"""Dataset manifests: one JSON document naming the files of each dataset entry.

Datasets lay their files out differently, so a manifest normalizes them:

    {
      "name": "my-dataset",
      "resolution": "1024x1024",
      "entries": [
        {"image": "img/01.png", "gt": "gt/01.png",
         "fov": "mask/01.png", "od": "mask_od/01.png"}
      ]
    }

Paths are resolved relative to the manifest file. Only "image" is
required per entry; commands that need ground truths or masks report the
gaps themselves. The optional "od" mask marks optic-disc pixels that are
excluded from evaluation (or forced to non-vessel, per CLI flag).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

__all__ = ["ManifestEntry", "Manifest", "load_manifest"]


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    image: Path
    gt: Path | None = None
    fov: Path | None = None
    od: Path | None = None


@dataclass(frozen=True)
class Manifest:
    name: str
    entries: tuple
    resolution: str | None = None


def load_manifest(path) -> Manifest:
    """Parse and validate a manifest; every referenced file must exist."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ValueError(f"{path}: manifest must be an object with an 'entries' list")
    base = path.parent
    entries = []
    for i, raw in enumerate(doc["entries"]):
        if not isinstance(raw, dict) or "image" not in raw:
            raise ValueError(f"{path}: entry {i} must be an object with an 'image' path")
        unknown = set(raw) - {"image", "gt", "fov", "od", "name"}
        if unknown:
            raise ValueError(f"{path}: entry {i} has unknown keys {sorted(unknown)}")
        paths = {}
        for key in ("image", "gt", "fov", "od"):
            if raw.get(key) is None:
                paths[key] = None
                continue
            p = base / str(raw[key])
            if not p.is_file():
                raise FileNotFoundError(f"{path}: entry {i}: missing file {p}")
            paths[key] = p
        name = str(raw.get("name") or paths["image"].stem)
        entries.append(ManifestEntry(name=name, **paths))
    if not entries:
        raise ValueError(f"{path}: manifest has no entries")
    names = [e.name for e in entries]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: entry names are not unique")
    return Manifest(
        name=str(doc.get("name") or path.stem),
        entries=tuple(entries),
        resolution=doc.get("resolution"),
    )
