"""Mapping from COCO categories to the engine's wire vocabulary.

A label map declares which model classes are worth emitting and what to call
them on the wire. Classes absent from the map are dropped: COCO weights
cannot recognise most iconographic attributes (keys, wheel, winged lion), so
the shipped map covers only the honest overlap instead of guessing.

Document shape:

    {
      "version": "1",
      "detections": {"bird": "dove", "boat": "boat"},
      "regions": {"person": "person", "cat": "cat", ...}
    }

``detections`` values become attribute labels, so they should be labels the
engine's association database knows. ``regions`` values become raw region
labels for the engine's class map; person and animal bodies merge into
figures there, anything else is scenery. The same category may appear in
both sections (a bird can be a dove cue and an animal body at once).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources

from .coco import COCO_CATEGORIES

# Wire labels are lowercase tokens; the engine rejects anything else.
LABEL_RE = re.compile(r"^[a-z][a-z0-9_]*$")

_ALLOWED_KEYS = {"version", "detections", "regions"}
_REAL_CATEGORIES = frozenset(COCO_CATEGORIES) - {"__background__", "N/A"}


class LabelMapError(ValueError):
    """Raised when a label-map document cannot be used."""


@dataclass(frozen=True)
class LabelMap:
    """Validated category translation table."""

    version: str
    detections: dict[str, str]
    regions: dict[str, str]

    def detection_label(self, category: str) -> str | None:
        return self.detections.get(category)

    def region_label(self, category: str) -> str | None:
        return self.regions.get(category)

    def to_document(self) -> dict:
        return {
            "version": self.version,
            "detections": dict(sorted(self.detections.items())),
            "regions": dict(sorted(self.regions.items())),
        }


def _section(doc: dict, name: str) -> dict[str, str]:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise LabelMapError(f"{name} must be an object")
    section: dict[str, str] = {}
    for category, label in raw.items():
        if category not in _REAL_CATEGORIES:
            raise LabelMapError(f"{name} key {category!r} is not a COCO category")
        if not isinstance(label, str) or not LABEL_RE.match(label):
            raise LabelMapError(
                f"{name} value {label!r} for {category!r} is not a lowercase token"
            )
        section[category] = label
    return section


def load_label_map(text: str) -> LabelMap:
    """Parse and validate a label-map JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LabelMapError(f"label map is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise LabelMapError("label map must be a JSON object")
    unknown = sorted(set(doc) - _ALLOWED_KEYS)
    if unknown:
        raise LabelMapError(f"unknown label map keys: {', '.join(unknown)}")
    version = doc.get("version")
    if not isinstance(version, str) or not version:
        raise LabelMapError("version must be a non-empty string")
    return LabelMap(
        version=version,
        detections=_section(doc, "detections"),
        regions=_section(doc, "regions"),
    )


def default_label_map() -> LabelMap:
    """The map shipped with the package."""
    text = (
        resources.files("iconoscope_provider")
        .joinpath("data/default_label_map.json")
        .read_text(encoding="utf-8")
    )
    return load_label_map(text)
