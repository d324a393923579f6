"""Diagnostic overlay rendering.

Draws one image's reading on top of the image itself: retained attribute
boxes, figure centroids, and a labeled line from each assigned attribute
to its figure.  Purely a debugging aid; nothing downstream consumes the
rendered file and rendering never alters the reading.
"""

from __future__ import annotations

from pathlib import Path

from PIL import Image, ImageDraw, UnidentifiedImageError

from .errors import ImageUnreadableError
from .geometry import bbox_center
from .pipeline import ImageReading

FIGURE_COLOR = (66, 135, 245)
ASSIGNED_COLOR = (52, 168, 83)
UNASSIGNED_COLOR = (234, 67, 53)


def render_overlay(image_path: str | Path, image_reading: ImageReading, out_path: str | Path) -> None:
    """Write a PNG of the image at working resolution with the reading drawn in."""
    try:
        with Image.open(image_path) as img:
            canvas = img.convert("RGB").resize(
                (image_reading.dims.width, image_reading.dims.height),
                resample=Image.BILINEAR,
            )
    except FileNotFoundError as exc:
        raise ImageUnreadableError(f"image not found: {image_path}") from exc
    except (OSError, UnidentifiedImageError) as exc:
        raise ImageUnreadableError(f"cannot decode image {image_path}: {exc}") from exc

    draw = ImageDraw.Draw(canvas)
    reading = image_reading.reading
    assigned_locations = {
        (a.attribute.label, a.attribute.location.x, a.attribute.location.y)
        for a in reading.assignments
    }
    for det in image_reading.retained_detections:
        center = bbox_center(det.box)
        assigned = (det.label, center.x, center.y) in assigned_locations
        color = ASSIGNED_COLOR if assigned else UNASSIGNED_COLOR
        draw.rectangle(
            [det.box.x_min, det.box.y_min, det.box.x_max, det.box.y_max],
            outline=color, width=2,
        )
    for figure in reading.figures:
        _cross(draw, figure.centroid.x, figure.centroid.y, FIGURE_COLOR)
        draw.text(
            (figure.centroid.x + 6, figure.centroid.y + 6),
            f"figure {figure.figure_id}",
            fill=FIGURE_COLOR,
        )
    for assignment in reading.assignments:
        loc = assignment.attribute.location
        target = reading.figure_by_id(assignment.figure_id).centroid
        draw.line([(loc.x, loc.y), (target.x, target.y)], fill=ASSIGNED_COLOR, width=1)
        _dot(draw, loc.x, loc.y, ASSIGNED_COLOR)
        draw.text(
            (loc.x + 6, loc.y - 12),
            f"{assignment.attribute.label}: {assignment.saint}",
            fill=ASSIGNED_COLOR,
        )
    for attr in reading.unassigned_attributes:
        _dot(draw, attr.location.x, attr.location.y, UNASSIGNED_COLOR)
        draw.text(
            (attr.location.x + 6, attr.location.y - 12),
            f"{attr.label}: ?",
            fill=UNASSIGNED_COLOR,
        )
    canvas.save(out_path, format="PNG")


def _cross(draw: ImageDraw.ImageDraw, x: float, y: float, color: tuple[int, int, int]) -> None:
    draw.line([(x - 5, y), (x + 5, y)], fill=color, width=2)
    draw.line([(x, y - 5), (x, y + 5)], fill=color, width=2)


def _dot(draw: ImageDraw.ImageDraw, x: float, y: float, color: tuple[int, int, int]) -> None:
    draw.ellipse([(x - 3, y - 3), (x + 3, y + 3)], fill=color)
