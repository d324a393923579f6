"""Model construction, weight loading and inference.

The architecture is torchvision's Mask R-CNN: a region-proposal detector and
mask head over a ResNet-50 feature pyramid, run on CPU in eval mode. Weights
always come from a local checkpoint path; nothing is downloaded.
"""

from __future__ import annotations

from pathlib import Path

import torch
from PIL import Image, UnidentifiedImageError
from torchvision.models.detection import maskrcnn_resnet50_fpn
from torchvision.transforms.functional import pil_to_tensor


class ImageError(RuntimeError):
    """Raised when the input image cannot be read."""


class WeightsError(RuntimeError):
    """Raised when the checkpoint is missing or does not fit the model."""


def build_model(min_size: int = 800, max_size: int = 1333):
    """Construct the detector without weights.

    The box score threshold is zero: the provider applies its own floor
    after label mapping, and the engine performs the real retention cut.
    """
    model = maskrcnn_resnet50_fpn(
        weights=None,
        weights_backbone=None,
        num_classes=91,
        min_size=min_size,
        max_size=max_size,
        box_score_thresh=0.0,
    )
    model.eval()
    return model


def load_weights(model, path: str | Path) -> None:
    source = Path(path)
    if not source.is_file():
        raise WeightsError(f"weights not found: {source}")
    try:
        state = torch.load(source, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    except Exception as exc:  # torch surfaces several unrelated types here
        raise WeightsError(f"cannot load weights from {source}: {exc}") from exc


def load_image(path: str | Path) -> tuple[torch.Tensor, tuple[int, int]]:
    """Decode an image into a float CHW tensor plus (width, height)."""
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
    except FileNotFoundError as exc:
        raise ImageError(f"image not found: {path}") from exc
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageError(f"cannot decode image: {path}") from exc
    tensor = pil_to_tensor(rgb).to(torch.float32) / 255.0
    return tensor, rgb.size


def detect(model, image: torch.Tensor, seed: int = 0) -> dict:
    """One forward pass; returns torchvision's output dict for the image.

    Eval-mode inference is deterministic on CPU; the seed pins any source
    of randomness so identical weights give identical documents.
    """
    torch.manual_seed(seed)
    with torch.no_grad():
        return model([image])[0]
