"""End-to-end orchestration: image file in, reading or corpus report out.

The flow for a single image: read its true dimensions, derive the common
working resolution (every image is normalized to roughly the same pixel
count so confidence thresholds and distances mean the same thing
everywhere), pull detections and regions from the provider at that
resolution, retain confident attributes, build figures, assign actors.
All coordinates in a reading are in the normalized working space.

Corpus evaluation runs that flow per manifest entry, matches each reading
against ground truth, and pools the counts.  A per-image perception
failure does not abort the corpus: the image contributes an empty reading
(so its annotated saints count as misses) and an error record.
"""

from __future__ import annotations

import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .errors import (
    ImageUnreadableError,
    ManifestError,
    MissingTruthError,
    ProtocolError,
    ProviderUnavailableError,
)
from .evaluation import (
    GroundTruthRecord,
    MetricsReport,
    TruthEntry,
    evaluate_corpus,
    report_document,
)
from .geometry import BoundingBox, ImageDims, normalize_scale
from .knowledge import AssociationDatabase
from .providers import (
    DEFAULT_RETENTION_MAX,
    DEFAULT_RETENTION_THRESHOLD,
    ClassMap,
    Detection,
    FixtureProvider,
    SubprocessProvider,
    default_class_map,
    detect_attributes,
    retain_attributes,
    retain_detections,
    segment_figures,
)
from .reading import DEFAULT_MERGE_DISTANCE, Reading, assign_actors, build_figures

DEFAULT_TARGET_PIXELS = 262144


@dataclass(frozen=True)
class ProviderSpec:
    """Which perception backend to use: sidecar fixtures or an executable."""

    kind: str
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("fixture", "subprocess"):
            raise ValueError(f"provider kind must be 'fixture' or 'subprocess', got {self.kind!r}")
        if self.kind == "subprocess" and not self.path:
            raise ValueError("subprocess provider needs an executable path")
        if self.kind == "fixture" and self.path is not None:
            raise ValueError("fixture provider takes no path here; use manifest fixture_path")

    def make(self):
        if self.kind == "subprocess":
            return SubprocessProvider(self.path)
        return FixtureProvider()

    @classmethod
    def from_document(cls, doc) -> "ProviderSpec":
        if doc == "fixture":
            return cls(kind="fixture")
        if isinstance(doc, dict) and doc.get("type") == "subprocess":
            return cls(kind="subprocess", path=doc.get("path"))
        raise ValueError(
            f"provider must be \"fixture\" or {{\"type\": \"subprocess\", \"path\": ...}}, got {doc!r}"
        )


@dataclass(frozen=True)
class PipelineConfig:
    """Tunable knobs of the analysis flow, with working defaults."""

    target_pixels: int = DEFAULT_TARGET_PIXELS
    retention_threshold: float = DEFAULT_RETENTION_THRESHOLD
    retention_max: int = DEFAULT_RETENTION_MAX
    merge_distance: float = DEFAULT_MERGE_DISTANCE
    use_mask_centroid: bool = False
    class_map: ClassMap = field(default_factory=default_class_map)
    database_path: Path | None = None
    provider: ProviderSpec | None = None

    @classmethod
    def from_document(cls, doc: dict, base_dir: Path | None = None) -> "PipelineConfig":
        """Build a config from a parsed JSON object.

        Relative ``database_path`` values resolve against ``base_dir``
        (the config file's directory when loaded from disk).
        """
        if not isinstance(doc, dict):
            raise ManifestError("config document must be a JSON object")
        known = {
            "target_pixels", "retention_threshold", "retention_max", "merge_distance",
            "use_mask_centroid", "class_map", "database_path", "provider",
        }
        unknown = set(doc) - known
        if unknown:
            raise ManifestError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {
            k: doc[k]
            for k in ("target_pixels", "retention_threshold", "retention_max",
                      "merge_distance", "use_mask_centroid")
            if k in doc
        }
        if "class_map" in doc:
            try:
                kwargs["class_map"] = ClassMap.from_document(doc["class_map"])
            except (ValueError, AttributeError) as exc:
                raise ManifestError(f"bad class_map in config: {exc}") from exc
        if doc.get("database_path") is not None:
            raw = doc["database_path"]
            if not isinstance(raw, str):
                raise ManifestError("database_path must be a string")
            kwargs["database_path"] = (base_dir / raw) if base_dir is not None else Path(raw)
        if doc.get("provider") is not None:
            try:
                kwargs["provider"] = ProviderSpec.from_document(doc["provider"])
            except ValueError as exc:
                raise ManifestError(f"bad provider in config: {exc}") from exc
        try:
            config = cls(**kwargs)
        except TypeError as exc:
            raise ManifestError(f"bad config value types: {exc}") from exc
        if not isinstance(config.target_pixels, int) or config.target_pixels < 1:
            raise ManifestError("target_pixels must be an integer >= 1")
        if not (0.0 <= config.retention_threshold <= 1.0):
            raise ManifestError("retention_threshold must be in [0, 1]")
        if not isinstance(config.retention_max, int) or config.retention_max < 1:
            raise ManifestError("retention_max must be an integer >= 1")
        if config.merge_distance < 0:
            raise ManifestError("merge_distance must be >= 0")
        if not isinstance(config.use_mask_centroid, bool):
            raise ManifestError("use_mask_centroid must be a boolean")
        return config


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"config {path} is not valid JSON: {exc}") from exc
    return PipelineConfig.from_document(doc, base_dir=path.parent)


@dataclass(frozen=True)
class ImageReading:
    """A reading plus the resolution bookkeeping that produced it.

    ``retained_detections`` are the post-retention detections (with their
    boxes) backing the reading's attribute instances, kept for overlays.
    """

    image_id: str
    original_dims: ImageDims
    dims: ImageDims
    scale: float
    reading: Reading
    retained_detections: tuple[Detection, ...] = ()


def image_id_for(image_path: str | Path) -> str:
    return Path(image_path).stem


def read_image_dims(image_path: str | Path) -> ImageDims:
    try:
        with Image.open(image_path) as img:
            width, height = img.size
    except FileNotFoundError as exc:
        raise ImageUnreadableError(f"image not found: {image_path}") from exc
    except (OSError, UnidentifiedImageError) as exc:
        raise ImageUnreadableError(f"cannot decode image {image_path}: {exc}") from exc
    return ImageDims(width=width, height=height)


def analyze_image(
    provider,
    image_path: str | Path,
    database: AssociationDatabase,
    config: PipelineConfig | None = None,
    image_id: str | None = None,
) -> ImageReading:
    """Run the full single-image flow and return its reading."""
    config = config or PipelineConfig()
    if image_id is None:
        image_id = image_id_for(image_path)
    original_dims = read_image_dims(image_path)
    scale, dims = normalize_scale(original_dims, config.target_pixels)
    detections = detect_attributes(provider, image_path, dims)
    regions = segment_figures(provider, image_path, dims, config.class_map)
    retained = retain_detections(
        detections, config.retention_threshold, config.retention_max
    )
    attributes = retain_attributes(
        detections, config.retention_threshold, config.retention_max,
        use_mask_centroid=config.use_mask_centroid,
    )
    figures = build_figures(regions, merge_distance=config.merge_distance)
    reading = replace(assign_actors(figures, attributes, database), image_id=image_id)
    return ImageReading(
        image_id=image_id,
        original_dims=original_dims,
        dims=dims,
        scale=scale,
        reading=reading,
        retained_detections=tuple(retained),
    )


def empty_image_reading(image_id: str) -> ImageReading:
    """Placeholder for an image whose perception failed."""
    return ImageReading(
        image_id=image_id,
        original_dims=ImageDims(1, 1),
        dims=ImageDims(1, 1),
        scale=1.0,
        reading=Reading(
            figures=(), assignments=(), unassigned_attributes=(), image_id=image_id
        ),
    )


def to_json(document: dict) -> str:
    """Canonical JSON used for every artifact this package writes."""
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def reading_document(image_reading: ImageReading, config: PipelineConfig) -> dict:
    """JSON-ready form of one image's reading.

    Coordinates are in the normalized working space; the config block
    records the knobs that produced the reading.  Figure masks are
    summarized (centroid, pixel count, member regions) rather than
    embedded, so the document stays small and diff-friendly.
    """

    def point(p) -> list[float]:
        return [p.x, p.y]

    def attribute(a) -> dict:
        return {"label": a.label, "confidence": a.confidence, "location": point(a.location)}

    reading = image_reading.reading
    return {
        "image_id": image_reading.image_id,
        "original_dims": {"width": image_reading.original_dims.width,
                          "height": image_reading.original_dims.height},
        "dims": {"width": image_reading.dims.width, "height": image_reading.dims.height},
        "scale": image_reading.scale,
        "config": {
            "target_pixels": config.target_pixels,
            "retention_threshold": config.retention_threshold,
            "retention_max": config.retention_max,
            "merge_distance": config.merge_distance,
        },
        "figures": [
            {
                "figure_id": f.figure_id,
                "centroid": point(f.centroid),
                "pixel_count": f.pixel_count,
                "member_region_indices": list(f.member_region_indices),
            }
            for f in reading.figures
        ],
        "assignments": [
            {
                "attribute": attribute(a.attribute),
                "figure_id": a.figure_id,
                "saint": a.saint,
                "prior": a.prior,
                "distance": a.distance,
                "candidate_rank": a.candidate_rank,
            }
            for a in reading.assignments
        ],
        "unassigned_attributes": [attribute(a) for a in reading.unassigned_attributes],
    }


@dataclass(frozen=True)
class ManifestEntry:
    """One corpus image: its id, its file, and an optional pinned sidecar."""

    image_id: str
    image_path: Path
    fixture_path: Path | None = None


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    """Corpus entries from a manifest file.

    The manifest is a JSON array of ``{"image_id": str, "image_path": str,
    "fixture_path": str?}``; relative paths resolve against the manifest's
    directory.  An empty array is a legal (empty) corpus.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ManifestError(f"manifest {path} must be a JSON array of entries")
    entries = []
    for i, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise ManifestError(f"manifest entry #{i} must be an object")
        image_id = raw.get("image_id")
        image_path = raw.get("image_path")
        if not isinstance(image_id, str) or not image_id:
            raise ManifestError(f"manifest entry #{i} needs a non-empty string image_id")
        if not isinstance(image_path, str) or not image_path:
            raise ManifestError(f"manifest entry #{i} needs a non-empty string image_path")
        fixture_path = raw.get("fixture_path")
        if fixture_path is not None and (not isinstance(fixture_path, str) or not fixture_path):
            raise ManifestError(f"manifest entry #{i} has a malformed fixture_path")
        entries.append(
            ManifestEntry(
                image_id=image_id,
                image_path=path.parent / image_path,
                fixture_path=(path.parent / fixture_path) if fixture_path else None,
            )
        )
    ids = [e.image_id for e in entries]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise ManifestError(f"manifest {path} has duplicate image ids: {duplicates}")
    return entries


def load_truth(path: str | Path) -> list[GroundTruthRecord]:
    """Ground-truth records from a file.

    The file is a JSON array of ``{"image_id": str, "saints": [{"saint":
    str, "box": [x0, y0, x1, y1]?}]}``.  Boxes are in the normalized
    working space of their image.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read ground truth {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"ground truth {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ManifestError(f"ground truth {path} must be a JSON array of records")
    records = []
    seen = set()
    for i, raw in enumerate(doc):
        if not isinstance(raw, dict):
            raise ManifestError(f"ground truth record #{i} must be an object")
        image_id = raw.get("image_id")
        if not isinstance(image_id, str) or not image_id:
            raise ManifestError(f"ground truth record #{i} needs a non-empty string image_id")
        if image_id in seen:
            raise ManifestError(f"ground truth {path} repeats image id {image_id!r}")
        seen.add(image_id)
        raw_saints = raw.get("saints")
        if not isinstance(raw_saints, list):
            raise ManifestError(f"ground truth for {image_id!r} needs a saints array")
        entries = []
        for annotation in raw_saints:
            if not isinstance(annotation, dict) or not isinstance(annotation.get("saint"), str):
                raise ManifestError(f"ground truth for {image_id!r} has a malformed annotation")
            box = None
            raw_box = annotation.get("box")
            if raw_box is not None:
                if (not isinstance(raw_box, list) or len(raw_box) != 4
                        or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                   for v in raw_box)):
                    raise ManifestError(
                        f"ground truth for {image_id!r} has a malformed box: {raw_box!r}"
                    )
                try:
                    box = BoundingBox(*(float(v) for v in raw_box))
                except ValueError as exc:
                    raise ManifestError(
                        f"ground truth for {image_id!r} has an invalid box: {exc}"
                    ) from exc
            entries.append(TruthEntry(saint=annotation["saint"], box=box))
        try:
            records.append(GroundTruthRecord(image_id=image_id, saints=tuple(entries)))
        except ValueError as exc:
            raise ManifestError(str(exc)) from exc
    return records


@dataclass(frozen=True)
class ImageError:
    image_id: str
    error_type: str
    message: str


@dataclass(frozen=True)
class EvaluationOutcome:
    report: MetricsReport
    readings: tuple[ImageReading, ...]
    errors: tuple[ImageError, ...]


def run_evaluation(
    provider_factory,
    entries: list[ManifestEntry],
    truths: list[GroundTruthRecord],
    database: AssociationDatabase,
    config: PipelineConfig | None = None,
    jobs: int | None = None,
) -> EvaluationOutcome:
    """Analyze every manifest entry and score the corpus.

    Every entry must have a truth record before any analysis starts.  An
    entry with a ``fixture_path`` is pinned to that sidecar; the others
    use ``provider_factory``, called once per worker because provider
    instances are stateful.  Results do not depend on ``jobs``.
    """
    config = config or PipelineConfig()
    truth_ids = {t.image_id for t in truths}
    missing = sorted(e.image_id for e in entries if e.image_id not in truth_ids)
    if missing:
        raise MissingTruthError(f"no ground truth for image ids: {missing}")

    local = threading.local()

    def analyze_one(entry: ManifestEntry) -> tuple[ImageReading, ImageError | None]:
        try:
            if entry.fixture_path is not None:
                provider = FixtureProvider(entry.fixture_path)
            else:
                if not hasattr(local, "provider"):
                    local.provider = provider_factory()
                provider = local.provider
            reading = analyze_image(
                provider, entry.image_path, database, config, image_id=entry.image_id
            )
            return reading, None
        except (ImageUnreadableError, ProviderUnavailableError, ProtocolError) as exc:
            error = ImageError(
                image_id=entry.image_id, error_type=type(exc).__name__, message=str(exc)
            )
            return empty_image_reading(entry.image_id), error

    worker_count = jobs if jobs is not None else (os.cpu_count() or 1)
    worker_count = max(1, min(worker_count, len(entries) or 1))
    if worker_count == 1:
        results = [analyze_one(e) for e in entries]
    else:
        with ThreadPoolExecutor(max_workers=worker_count) as pool:
            results = list(pool.map(analyze_one, entries))

    readings = tuple(r for r, _ in results)
    errors = tuple(e for _, e in results if e is not None)
    report = evaluate_corpus([r.reading for r in readings], truths)
    return EvaluationOutcome(report=report, readings=readings, errors=errors)


def evaluation_document(outcome: EvaluationOutcome) -> dict:
    doc = report_document(outcome.report)
    doc["errors"] = [
        {"image_id": e.image_id, "error_type": e.error_type, "message": e.message}
        for e in outcome.errors
    ]
    return doc
