"""Provider wire protocol: response documents and run-length mask encoding.

A provider is invoked with an image path and writes one JSON document to
standard output::

    {
      "dims": {"width": W, "height": H},
      "detections": [{"label": str, "confidence": num,
                      "box": [x_min, y_min, x_max, y_max], "mask": RLE?}],
      "regions":    [{"raw_label": str, "confidence": num, "mask": RLE}]
    }

where RLE encodes a binary mask row by row::

    {"width": W, "height": H, "rows": [[[start, length], ...], ...]}

``rows`` has exactly ``height`` elements; each lists the runs of set pixels
in that row as ``[start, length]`` pairs with ascending, non-overlapping
starts.  All coordinates are in the pixel space of ``dims``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ProtocolError
from .geometry import BinaryMask, BoundingBox, ImageDims
from .knowledge import ATTRIBUTE_LABEL_RE

WIRE_SCHEMA_RESOURCE = "provider_response.schema.json"


@dataclass(frozen=True)
class Detection:
    """One localized attribute candidate from a detector."""

    label: str
    confidence: float
    box: BoundingBox
    mask: BinaryMask | None = None


@dataclass(frozen=True)
class RawRegion:
    """One segmentation region as delivered on the wire, before class mapping."""

    raw_label: str
    confidence: float
    mask: BinaryMask


@dataclass(frozen=True)
class ProviderResponse:
    """Everything one provider invocation reports for one image."""

    dims: ImageDims
    detections: list[Detection] = field(default_factory=list)
    regions: list[RawRegion] = field(default_factory=list)


def wire_schema() -> dict:
    """The published JSON Schema for provider responses."""
    text = resources.files("iconoscope.data").joinpath(WIRE_SCHEMA_RESOURCE).read_text(
        encoding="utf-8"
    )
    return json.loads(text)


def encode_mask(mask: BinaryMask) -> dict:
    """Run-length encode a mask into the wire RLE document."""
    rows: list[list[list[int]]] = []
    for y in range(mask.height):
        row = mask.pixels[y]
        runs: list[list[int]] = []
        # Transitions of the padded row give run starts and one-past ends.
        padded = np.diff(np.concatenate([[0], row.view(np.int8), [0]]))
        starts = np.nonzero(padded == 1)[0]
        ends = np.nonzero(padded == -1)[0]
        for s, e in zip(starts, ends):
            runs.append([int(s), int(e - s)])
        rows.append(runs)
    return {"width": mask.width, "height": mask.height, "rows": rows}


def decode_mask(doc, context: str = "mask") -> BinaryMask:
    """Decode and validate a wire RLE document into a BinaryMask."""
    if not isinstance(doc, dict):
        raise ProtocolError(f"{context}: RLE must be an object")
    width = doc.get("width")
    height = doc.get("height")
    rows = doc.get("rows")
    if not _is_int(width) or not _is_int(height) or width < 1 or height < 1:
        raise ProtocolError(f"{context}: RLE needs integer width/height >= 1")
    if not isinstance(rows, list) or len(rows) != height:
        raise ProtocolError(f"{context}: RLE needs exactly {height} rows")

    pixels = np.zeros((height, width), dtype=bool)
    for y, runs in enumerate(rows):
        if not isinstance(runs, list):
            raise ProtocolError(f"{context}: row {y} must be a list of runs")
        cursor = 0
        for run in runs:
            if (
                not isinstance(run, list)
                or len(run) != 2
                or not _is_int(run[0])
                or not _is_int(run[1])
            ):
                raise ProtocolError(f"{context}: row {y} has a malformed run {run!r}")
            start, length = run
            if length < 1 or start < cursor or start + length > width:
                raise ProtocolError(
                    f"{context}: row {y} run [{start}, {length}] is out of order or out of bounds"
                )
            pixels[y, start : start + length] = True
            cursor = start + length
    return BinaryMask(pixels)


def parse_response(doc) -> ProviderResponse:
    """Validate a decoded provider response document.

    Raises ProtocolError on any structural problem: missing dims, labels
    that are not lowercase tokens, confidences outside [0, 1], boxes that
    are degenerate or stick out of the image, masks that disagree with the
    response dimensions.
    """
    if not isinstance(doc, dict):
        raise ProtocolError("provider response must be a JSON object")
    dims_doc = doc.get("dims")
    if not isinstance(dims_doc, dict):
        raise ProtocolError("provider response needs a 'dims' object")
    w, h = dims_doc.get("width"), dims_doc.get("height")
    if not _is_int(w) or not _is_int(h) or w < 1 or h < 1:
        raise ProtocolError("'dims' needs integer width/height >= 1")
    dims = ImageDims(w, h)

    detections = [
        _parse_detection(raw, i, dims) for i, raw in enumerate(_item_list(doc, "detections"))
    ]
    regions = [_parse_region(raw, i, dims) for i, raw in enumerate(_item_list(doc, "regions"))]
    return ProviderResponse(dims=dims, detections=detections, regions=regions)


def parse_response_text(text: str) -> ProviderResponse:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"provider response is not valid JSON: {exc}") from exc
    return parse_response(doc)


def serialize_response(response: ProviderResponse) -> dict:
    """Encode a response back into its wire document form."""
    doc: dict = {
        "dims": {"width": response.dims.width, "height": response.dims.height},
        "detections": [],
        "regions": [],
    }
    for det in response.detections:
        det_doc = {
            "label": det.label,
            "confidence": det.confidence,
            "box": [det.box.x_min, det.box.y_min, det.box.x_max, det.box.y_max],
        }
        if det.mask is not None:
            det_doc["mask"] = encode_mask(det.mask)
        doc["detections"].append(det_doc)
    for region in response.regions:
        doc["regions"].append(
            {
                "raw_label": region.raw_label,
                "confidence": region.confidence,
                "mask": encode_mask(region.mask),
            }
        )
    return doc


def _item_list(doc: dict, key: str) -> list:
    items = doc.get(key, [])
    if not isinstance(items, list):
        raise ProtocolError(f"'{key}' must be an array")
    return items


def _parse_detection(raw, index: int, dims: ImageDims) -> Detection:
    if not isinstance(raw, dict):
        raise ProtocolError(f"detection #{index} must be an object")
    label = raw.get("label")
    if not isinstance(label, str) or not ATTRIBUTE_LABEL_RE.match(label):
        raise ProtocolError(f"detection #{index} label {label!r} is not a lowercase token")
    confidence = _parse_confidence(raw.get("confidence"), f"detection #{index}")
    box = _parse_box(raw.get("box"), f"detection #{index}", dims)
    mask = None
    if raw.get("mask") is not None:
        mask = decode_mask(raw["mask"], f"detection #{index} mask")
        if mask.dims != dims:
            raise ProtocolError(f"detection #{index} mask dims differ from response dims")
    return Detection(label=label, confidence=confidence, box=box, mask=mask)


def _parse_region(raw, index: int, dims: ImageDims) -> RawRegion:
    if not isinstance(raw, dict):
        raise ProtocolError(f"region #{index} must be an object")
    raw_label = raw.get("raw_label")
    if not isinstance(raw_label, str) or not raw_label:
        raise ProtocolError(f"region #{index} needs a non-empty 'raw_label'")
    confidence = _parse_confidence(raw.get("confidence"), f"region #{index}")
    if raw.get("mask") is None:
        raise ProtocolError(f"region #{index} needs a mask")
    mask = decode_mask(raw["mask"], f"region #{index} mask")
    if mask.dims != dims:
        raise ProtocolError(f"region #{index} mask dims differ from response dims")
    return RawRegion(raw_label=raw_label, confidence=confidence, mask=mask)


def _parse_confidence(value, context: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ProtocolError(f"{context} needs a numeric confidence")
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ProtocolError(f"{context} confidence {value} is outside [0, 1]")
    return value


def _parse_box(value, context: str, dims: ImageDims) -> BoundingBox:
    if (
        not isinstance(value, list)
        or len(value) != 4
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)
    ):
        raise ProtocolError(f"{context} needs a box of four numbers")
    x_min, y_min, x_max, y_max = (float(v) for v in value)
    if not (x_min < x_max and y_min < y_max):
        raise ProtocolError(f"{context} box is degenerate")
    if x_min < 0 or y_min < 0 or x_max > dims.width or y_max > dims.height:
        raise ProtocolError(f"{context} box sticks out of the {dims.width}x{dims.height} image")
    return BoundingBox(x_min, y_min, x_max, y_max)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)
