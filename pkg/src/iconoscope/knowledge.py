"""The attribute-to-saint association database.

An attribute label is a lowercase token such as ``"keys"`` or
``"winged_lion"``.  Each database entry maps one attribute to an ordered
list of candidate saints with priors in (0, 1]; document order is
authoritative and priors never reorder candidates.  Labels form a closed
vocabulary per database version: a detector label missing from the
database resolves to an empty candidate list and is reported, not guessed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ParseError, SchemaError, ValidationError

ATTRIBUTE_LABEL_RE = re.compile(r"^[a-z][a-z0-9_]*$")

DEFAULT_DATABASE_RESOURCE = "default_associations.json"


@dataclass(frozen=True)
class AssociationEntry:
    """One attribute and its ranked saint candidates."""

    attribute: str
    candidates: tuple[tuple[str, float], ...]


@dataclass(frozen=True)
class AssociationDatabase:
    """Validated, immutable attribute -> saints mapping."""

    entries: dict[str, AssociationEntry] = field(default_factory=dict)
    version: str = "0"

    def attribute_labels(self) -> list[str]:
        return list(self.entries.keys())


@dataclass(frozen=True)
class Finding:
    """One validation finding; ``level`` is ``"error"`` or ``"warning"``."""

    level: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}: {self.message}"


def load_database(document: str) -> AssociationDatabase:
    """Parse and validate a JSON association-database document.

    Raises ParseError for malformed JSON, SchemaError for missing or
    mistyped fields, ValidationError for content-invariant violations
    (duplicate attributes, empty candidate lists, out-of-range or
    non-monotone priors, duplicated saints within an entry).
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ParseError(f"database document is not valid JSON: {exc}") from exc
    return database_from_document(doc)


def load_database_file(path: str | Path) -> AssociationDatabase:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read database file {path}: {exc}") from exc
    return load_database(text)


def default_database() -> AssociationDatabase:
    """The association database shipped with the package."""
    text = resources.files("iconoscope.data").joinpath(DEFAULT_DATABASE_RESOURCE).read_text(
        encoding="utf-8"
    )
    return load_database(text)


def database_from_document(doc) -> AssociationDatabase:
    if not isinstance(doc, dict):
        raise SchemaError("database document must be a JSON object")
    version = doc.get("version")
    if not isinstance(version, str):
        raise SchemaError("database document needs a string 'version' field")
    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list):
        raise SchemaError("database document needs an 'entries' array")
    if not raw_entries:
        raise ValidationError("database has no entries")

    entries: dict[str, AssociationEntry] = {}
    for i, raw in enumerate(raw_entries):
        entry = _entry_from_document(raw, i)
        if entry.attribute in entries:
            raise ValidationError(f"duplicate attribute key {entry.attribute!r}")
        entries[entry.attribute] = entry
    return AssociationDatabase(entries=entries, version=version)


def _entry_from_document(raw, index: int) -> AssociationEntry:
    if not isinstance(raw, dict):
        raise SchemaError(f"entry #{index} must be an object")
    attribute = raw.get("attribute")
    if not isinstance(attribute, str):
        raise SchemaError(f"entry #{index} needs a string 'attribute' field")
    if not ATTRIBUTE_LABEL_RE.match(attribute):
        raise ValidationError(f"attribute label {attribute!r} is not a lowercase token")
    raw_candidates = raw.get("candidates")
    if not isinstance(raw_candidates, list):
        raise SchemaError(f"entry {attribute!r} needs a 'candidates' array")
    if not raw_candidates:
        raise ValidationError(f"entry {attribute!r} has no candidates")

    candidates: list[tuple[str, float]] = []
    seen: set[str] = set()
    previous_prior = None
    for j, cand in enumerate(raw_candidates):
        if not isinstance(cand, dict):
            raise SchemaError(f"candidate #{j} of {attribute!r} must be an object")
        saint = cand.get("saint")
        prior = cand.get("prior")
        if not isinstance(saint, str) or not saint:
            raise SchemaError(f"candidate #{j} of {attribute!r} needs a non-empty 'saint'")
        if not isinstance(prior, (int, float)) or isinstance(prior, bool):
            raise SchemaError(f"candidate {saint!r} of {attribute!r} needs a numeric 'prior'")
        prior = float(prior)
        if not (0.0 < prior <= 1.0):
            raise ValidationError(
                f"prior {prior} for {saint!r} under {attribute!r} is outside (0, 1]"
            )
        if previous_prior is not None and prior > previous_prior:
            raise ValidationError(f"priors under {attribute!r} increase at {saint!r}")
        if saint in seen:
            raise ValidationError(f"saint {saint!r} appears twice under {attribute!r}")
        seen.add(saint)
        previous_prior = prior
        candidates.append((saint, prior))
    return AssociationEntry(attribute=attribute, candidates=tuple(candidates))


def serialize_database(db: AssociationDatabase) -> str:
    """Inverse of load_database for valid databases (field-exact round trip)."""
    doc = {
        "version": db.version,
        "entries": [
            {
                "attribute": entry.attribute,
                "candidates": [{"saint": s, "prior": p} for s, p in entry.candidates],
            }
            for entry in db.entries.values()
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def saints_for_attribute(db: AssociationDatabase, attr: str) -> list[tuple[str, float]]:
    """Ranked (saint, prior) candidates for an attribute; [] when unknown."""
    entry = db.entries.get(attr)
    if entry is None:
        return []
    return list(entry.candidates)


def validate_database(db: AssociationDatabase) -> list[Finding]:
    """Check a constructed database object; empty result means clean.

    Invariant violations come back as error findings; suspicious but legal
    shapes (a saint reachable through several attributes) as warnings.
    """
    findings: list[Finding] = []
    if not db.entries:
        findings.append(Finding("error", "database has no entries"))

    saint_attrs: dict[str, list[str]] = {}
    for key, entry in db.entries.items():
        if key != entry.attribute:
            findings.append(
                Finding("error", f"entry key {key!r} does not match attribute {entry.attribute!r}")
            )
        if not ATTRIBUTE_LABEL_RE.match(entry.attribute):
            findings.append(
                Finding("error", f"attribute label {entry.attribute!r} is not a lowercase token")
            )
        if not entry.candidates:
            findings.append(Finding("error", f"entry {entry.attribute!r} has no candidates"))
        previous = None
        seen: set[str] = set()
        for saint, prior in entry.candidates:
            if not saint:
                findings.append(Finding("error", f"empty saint name under {entry.attribute!r}"))
            if not (0.0 < prior <= 1.0):
                findings.append(
                    Finding(
                        "error",
                        f"prior {prior} for {saint!r} under {entry.attribute!r} is outside (0, 1]",
                    )
                )
            if previous is not None and prior > previous:
                findings.append(
                    Finding("error", f"priors under {entry.attribute!r} increase at {saint!r}")
                )
            if saint in seen:
                findings.append(
                    Finding("error", f"saint {saint!r} appears twice under {entry.attribute!r}")
                )
            seen.add(saint)
            previous = prior
            saint_attrs.setdefault(saint, []).append(entry.attribute)

    for saint, attrs in sorted(saint_attrs.items()):
        if len(attrs) > 1:
            findings.append(
                Finding("warning", f"saint {saint!r} is reachable through {len(attrs)} attributes: {', '.join(attrs)}")
            )
    return findings
