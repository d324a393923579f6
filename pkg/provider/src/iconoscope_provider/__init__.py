"""Reference detection provider speaking the iconoscope wire protocol.

Wraps a COCO-pretrained instance segmenter behind the engine's subprocess
contract: one image path in, one JSON document out. COCO weights cannot see
most iconographic attributes; the shipped label map covers the overlap that
exists (bird as dove, boat as boat, bodies as figure regions) and exists to
prove the protocol boundary, not to reproduce published detection quality.
"""

__version__ = "0.1.0"

from .coco import COCO_CATEGORIES
from .labelmap import LabelMap, LabelMapError, default_label_map, load_label_map
from .model import (
    ImageError,
    WeightsError,
    build_model,
    detect,
    load_image,
    load_weights,
)
from .response import encode_mask, render, response_document

__all__ = [
    "COCO_CATEGORIES",
    "ImageError",
    "LabelMap",
    "LabelMapError",
    "WeightsError",
    "build_model",
    "default_label_map",
    "detect",
    "encode_mask",
    "load_image",
    "load_label_map",
    "load_weights",
    "render",
    "response_document",
]
