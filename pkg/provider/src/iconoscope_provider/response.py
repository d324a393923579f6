"""Assembling wire-protocol documents from raw model outputs.

One model hit can feed both lists: its category's detection mapping emits an
attribute detection, its region mapping emits a segmentation region. Boxes
are clamped to the image and dropped if that leaves them degenerate; masks
are thresholded at 0.5; a region whose mask comes out empty carries no
figure evidence and is dropped.
"""

from __future__ import annotations

import json

import numpy as np

from .coco import COCO_CATEGORIES
from .labelmap import LabelMap

MASK_THRESHOLD = 0.5


def encode_mask(mask: np.ndarray) -> dict:
    """Run-length encode a bool (height, width) array, row by row."""
    height, width = mask.shape
    rows = []
    for row in mask:
        edges = np.diff(np.r_[False, row, False].astype(np.int8))
        starts = np.flatnonzero(edges == 1)
        ends = np.flatnonzero(edges == -1)
        rows.append([[int(s), int(e - s)] for s, e in zip(starts, ends)])
    return {"width": int(width), "height": int(height), "rows": rows}


def response_document(
    output: dict,
    dims: tuple[int, int],
    label_map: LabelMap,
    min_score: float = 0.05,
) -> dict:
    """Translate one torchvision detection output into a wire document.

    `output` holds "boxes" (N, 4), "labels" (N,), "scores" (N,) and "masks"
    (N, 1, height, width) tensors; masks are already pasted back to the
    original image resolution, which must equal `dims`.
    """
    width, height = dims
    boxes = output["boxes"].detach().cpu().numpy()
    labels = output["labels"].detach().cpu().numpy()
    scores = output["scores"].detach().cpu().numpy()
    masks = output["masks"].detach().cpu().numpy()

    detections: list[dict] = []
    regions: list[dict] = []
    for i in range(len(scores)):
        score = float(scores[i])
        if score < min_score:
            continue
        index = int(labels[i])
        if not 0 <= index < len(COCO_CATEGORIES):
            continue
        category = COCO_CATEGORIES[index]
        as_detection = label_map.detection_label(category)
        as_region = label_map.region_label(category)
        if as_detection is None and as_region is None:
            continue

        x0, y0, x1, y1 = (float(v) for v in boxes[i])
        x0, x1 = max(x0, 0.0), min(x1, float(width))
        y0, y1 = max(y0, 0.0), min(y1, float(height))
        if not (x0 < x1 and y0 < y1):
            continue
        mask = masks[i, 0] >= MASK_THRESHOLD

        if as_detection is not None:
            detection = {
                "label": as_detection,
                "confidence": score,
                "box": [x0, y0, x1, y1],
            }
            if mask.any():
                detection["mask"] = encode_mask(mask)
            detections.append(detection)
        if as_region is not None and mask.any():
            regions.append(
                {
                    "raw_label": as_region,
                    "confidence": score,
                    "mask": encode_mask(mask),
                }
            )

    return {
        "dims": {"width": int(width), "height": int(height)},
        "detections": detections,
        "regions": regions,
    }


def render(document: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2) + "\n"
