"""Perception providers and post-provider attribute retention.

A provider answers one question per image: which attribute detections and
which segmentation regions are present.  Two implementations ship here:

* :class:`FixtureProvider` reads a sidecar JSON document beside the image
  (``picture.png`` -> ``picture.detections.json``) in the wire format, so
  the whole pipeline runs deterministically with no neural stack installed.
* :class:`SubprocessProvider` invokes an external executable with the image
  path as its only argument and parses the wire document from its stdout.

Provider instances are stateful (they cache the last response) and must be
used serially; run one instance per worker when parallelizing over images.
"""

from __future__ import annotations

import enum
import json
import logging
import subprocess
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ProtocolError, ProviderUnavailableError
from .geometry import BinaryMask, BoundingBox, ImageDims, PixelPoint, bbox_center, centroid
from .wire import Detection, ProviderResponse, parse_response_text

log = logging.getLogger(__name__)

DEFAULT_RETENTION_THRESHOLD = 0.9
DEFAULT_RETENTION_MAX = 4
FIXTURE_SIDECAR_SUFFIX = ".detections.json"


class SemanticClass(enum.Enum):
    """The three-way reading of a segmentation region."""

    PERSON = "PERSON"
    ANIMAL = "ANIMAL"
    OTHER = "OTHER"


@dataclass(frozen=True)
class ClassMap:
    """Maps a backend's raw segmentation vocabulary onto the three classes.

    Labels absent from the map fall back to ``default_class``.
    """

    mapping: dict[str, SemanticClass] = field(default_factory=dict)
    default_class: SemanticClass = SemanticClass.OTHER

    def classify(self, raw_label: str) -> SemanticClass:
        return self.mapping.get(raw_label.lower(), self.default_class)

    @classmethod
    def from_document(cls, doc: dict) -> "ClassMap":
        mapping = {}
        for raw_label, class_name in doc.get("map", {}).items():
            try:
                mapping[raw_label.lower()] = SemanticClass(class_name)
            except ValueError:
                raise ValueError(f"unknown semantic class {class_name!r} for {raw_label!r}")
        default = SemanticClass(doc.get("default_class", "OTHER"))
        return cls(mapping=mapping, default_class=default)

    def to_document(self) -> dict:
        return {
            "map": {label: sc.value for label, sc in sorted(self.mapping.items())},
            "default_class": self.default_class.value,
        }


def default_class_map() -> ClassMap:
    """Person plus the common animal classes of COCO-style vocabularies."""
    mapping = {"person": SemanticClass.PERSON}
    for animal in ("bird", "cat", "dog", "horse", "sheep", "cow",
                   "elephant", "bear", "zebra", "giraffe"):
        mapping[animal] = SemanticClass.ANIMAL
    return ClassMap(mapping=mapping)


@dataclass(frozen=True)
class SegmentRegion:
    """A wire region with its semantic class resolved."""

    raw_label: str
    semantic_class: SemanticClass
    mask: BinaryMask
    confidence: float


@dataclass(frozen=True)
class AttributeInstance:
    """A retained, localized attribute ready for actor assignment."""

    label: str
    location: PixelPoint
    confidence: float


class FixtureProvider:
    """Serves canned responses from sidecar files; bit-deterministic."""

    def __init__(self, sidecar_path: str | Path | None = None) -> None:
        self.sidecar_path = Path(sidecar_path) if sidecar_path is not None else None
        self._cache: tuple[Path, ProviderResponse] | None = None

    def perceive(self, image_path: str | Path) -> ProviderResponse:
        image_path = Path(image_path)
        if self._cache is not None and self._cache[0] == image_path:
            return self._cache[1]
        sidecar = self.sidecar_path or sidecar_for_image(image_path)
        if not sidecar.is_file():
            raise ProviderUnavailableError(f"no fixture sidecar at {sidecar}")
        try:
            text = sidecar.read_text(encoding="utf-8")
        except OSError as exc:
            raise ProviderUnavailableError(f"cannot read fixture sidecar {sidecar}: {exc}") from exc
        response = parse_response_text(text)
        self._cache = (image_path, response)
        return response


class SubprocessProvider:
    """Invokes ``executable <image_path>`` and parses its stdout."""

    def __init__(self, executable: str | Path, timeout: float = 300.0) -> None:
        self.executable = str(executable)
        self.timeout = timeout
        self._cache: tuple[Path, ProviderResponse] | None = None

    def perceive(self, image_path: str | Path) -> ProviderResponse:
        image_path = Path(image_path)
        if self._cache is not None and self._cache[0] == image_path:
            return self._cache[1]
        try:
            completed = subprocess.run(
                [self.executable, str(image_path)],
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except FileNotFoundError as exc:
            raise ProviderUnavailableError(f"provider executable not found: {self.executable}") from exc
        except PermissionError as exc:
            raise ProviderUnavailableError(f"provider executable not runnable: {self.executable}") from exc
        except subprocess.TimeoutExpired as exc:
            raise ProviderUnavailableError(f"provider timed out after {self.timeout}s") from exc
        if completed.returncode != 0:
            stderr = completed.stderr.strip().splitlines()
            detail = stderr[-1] if stderr else "no diagnostic on stderr"
            raise ProtocolError(
                f"provider exited with status {completed.returncode}: {detail}"
            )
        response = parse_response_text(completed.stdout)
        self._cache = (image_path, response)
        return response


def sidecar_for_image(image_path: Path) -> Path:
    return image_path.with_name(image_path.stem + FIXTURE_SIDECAR_SUFFIX)


def detect_attributes(provider, image_path: str | Path, dims: ImageDims) -> list[Detection]:
    """Attribute detections for one image, rescaled into ``dims`` space."""
    response = provider.perceive(image_path)
    return rescale_response(response, dims).detections


def segment_figures(
    provider, image_path: str | Path, dims: ImageDims, class_map: ClassMap
) -> list[SegmentRegion]:
    """Segmentation regions for one image, classified and in ``dims`` space."""
    response = rescale_response(provider.perceive(image_path), dims)
    return [
        SegmentRegion(
            raw_label=r.raw_label,
            semantic_class=class_map.classify(r.raw_label),
            mask=r.mask,
            confidence=r.confidence,
        )
        for r in response.regions
    ]


def retain_detections(
    detections: list[Detection], threshold: float, max_count: int
) -> list[Detection]:
    """Confidence filter and cut used by :func:`retain_attributes`.

    Detections at or above ``threshold`` are ordered by (confidence desc,
    label asc, box-center x asc) and cut at ``max_count``.  A tie at the cut
    boundary (equal confidence, distinct labels) keeps the extra detection:
    dropping one of the two would be arbitrary.
    """
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if max_count < 1:
        raise ValueError(f"max_count must be >= 1, got {max_count}")
    eligible = sorted(
        (d for d in detections if d.confidence >= threshold),
        key=lambda d: (-d.confidence, d.label, bbox_center(d.box).x),
    )
    kept = eligible[:max_count]
    for extra in eligible[max_count:]:
        if extra.confidence == kept[-1].confidence and extra.label != kept[-1].label:
            kept.append(extra)
        else:
            break
    return kept


def retain_attributes(
    detections: list[Detection],
    threshold: float = DEFAULT_RETENTION_THRESHOLD,
    max_count: int = DEFAULT_RETENTION_MAX,
    use_mask_centroid: bool = False,
) -> list[AttributeInstance]:
    """Keep only confidently detected attributes, each with one location.

    The location is the detection box center; ``use_mask_centroid`` switches
    to the centroid of the detection mask when one is present.
    """
    instances = []
    for det in retain_detections(detections, threshold, max_count):
        if use_mask_centroid and det.mask is not None and not det.mask.is_empty():
            location = centroid(det.mask)
        else:
            location = bbox_center(det.box)
        instances.append(
            AttributeInstance(label=det.label, location=location, confidence=det.confidence)
        )
    return instances


def rescale_response(response: ProviderResponse, dims: ImageDims) -> ProviderResponse:
    """Bring a response into the pixel space of ``dims``.

    Providers may process the image at any resolution; boxes scale linearly
    and masks are resampled nearest-neighbor.  A response already at ``dims``
    passes through unchanged.
    """
    if response.dims == dims:
        return response
    sx = dims.width / response.dims.width
    sy = dims.height / response.dims.height
    detections = [
        Detection(
            label=d.label,
            confidence=d.confidence,
            box=BoundingBox(d.box.x_min * sx, d.box.y_min * sy, d.box.x_max * sx, d.box.y_max * sy),
            mask=_resample_mask(d.mask, dims) if d.mask is not None else None,
        )
        for d in response.detections
    ]
    regions = [
        type(r)(raw_label=r.raw_label, confidence=r.confidence, mask=_resample_mask(r.mask, dims))
        for r in response.regions
    ]
    return ProviderResponse(dims=dims, detections=detections, regions=regions)


def _resample_mask(mask: BinaryMask, dims: ImageDims) -> BinaryMask:
    src = mask.pixels
    ys = ((np.arange(dims.height) + 0.5) * mask.height / dims.height).astype(int)
    xs = ((np.arange(dims.width) + 0.5) * mask.width / dims.width).astype(int)
    ys = np.clip(ys, 0, mask.height - 1)
    xs = np.clip(xs, 0, mask.width - 1)
    return BinaryMask(src[np.ix_(ys, xs)])
