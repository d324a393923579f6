"""Geometric substrate: points, boxes, binary masks and resolution scaling.

Coordinates use the raster convention: origin at the top-left corner,
x growing rightward, y growing downward, units of pixels.  The center of
the pixel at integer grid cell (i, j) is the point (i + 0.5, j + 0.5); all
centroids follow that convention so a fully set rectangle has its centroid
exactly at the rectangle's midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptyMaskError


@dataclass(frozen=True)
class PixelPoint:
    """A location in image space, in pixels."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with strictly positive extent on both axes."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(
                f"degenerate box ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, point: PixelPoint) -> bool:
        return self.x_min <= point.x <= self.x_max and self.y_min <= point.y <= self.y_max


@dataclass(frozen=True)
class ImageDims:
    """Integer pixel dimensions of an image."""

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be >= 1, got {self.width}x{self.height}")

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


class BinaryMask:
    """Immutable row-major boolean pixel grid.

    Wraps a read-only numpy array of shape (height, width).  Construct from
    a 2D array-like of truthy values, or from a flat row-major bit sequence
    via :meth:`from_bits`.
    """

    __slots__ = ("_pixels",)

    def __init__(self, pixels) -> None:
        arr = np.asarray(pixels, dtype=bool)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"mask must be a non-empty 2D grid, got shape {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "_pixels", arr)

    @classmethod
    def from_bits(cls, width: int, height: int, bits) -> "BinaryMask":
        flat = np.asarray(bits, dtype=bool)
        if flat.size != width * height:
            raise ValueError(f"expected {width * height} bits, got {flat.size}")
        return cls(flat.reshape(height, width))

    @classmethod
    def zeros(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def pixels(self) -> np.ndarray:
        """Read-only (height, width) boolean array."""
        return self._pixels

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    @property
    def height(self) -> int:
        return self._pixels.shape[0]

    @property
    def dims(self) -> ImageDims:
        return ImageDims(self.width, self.height)

    def count(self) -> int:
        """Number of set pixels."""
        return int(self._pixels.sum())

    def is_empty(self) -> bool:
        return not self._pixels.any()

    def tight_bbox(self) -> BoundingBox:
        """Smallest box enclosing all set pixels (outer pixel edges)."""
        if self.is_empty():
            raise EmptyMaskError("empty mask has no bounding box")
        ys, xs = np.nonzero(self._pixels)
        return BoundingBox(
            float(xs.min()), float(ys.min()), float(xs.max()) + 1.0, float(ys.max()) + 1.0
        )

    def overlaps(self, other: "BinaryMask") -> bool:
        self._check_dims(other)
        return bool(np.logical_and(self._pixels, other._pixels).any())

    def _check_dims(self, other: "BinaryMask") -> None:
        if self._pixels.shape != other._pixels.shape:
            raise DimensionMismatchError(
                f"mask dims differ: {self.width}x{self.height} vs {other.width}x{other.height}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self._pixels.shape == other._pixels.shape and bool(
            np.array_equal(self._pixels, other._pixels)
        )

    def __hash__(self) -> int:
        return hash((self._pixels.shape, self._pixels.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMask({self.width}x{self.height}, {self.count()} set)"


def centroid(mask: BinaryMask) -> PixelPoint:
    """Center of mass of a mask's set pixels, at pixel-center convention.

    Raises EmptyMaskError when no pixel is set.
    """
    if mask.is_empty():
        raise EmptyMaskError("cannot take the centroid of an empty mask")
    ys, xs = np.nonzero(mask.pixels)
    return PixelPoint(float(xs.mean()) + 0.5, float(ys.mean()) + 0.5)


def bbox_center(box: BoundingBox) -> PixelPoint:
    """Midpoint of a bounding box."""
    return PixelPoint((box.x_min + box.x_max) / 2.0, (box.y_min + box.y_max) / 2.0)


def distance(a: PixelPoint, b: PixelPoint) -> float:
    """Euclidean distance between two points, in pixels."""
    return math.hypot(a.x - b.x, a.y - b.y)


def union_masks(masks: list[BinaryMask]) -> BinaryMask:
    """Bitwise OR of same-sized masks.

    Raises DimensionMismatchError if the masks disagree on size, and
    ValueError on an empty list.
    """
    if not masks:
        raise ValueError("union_masks requires at least one mask")
    first = masks[0]
    acc = first.pixels.copy()
    for m in masks[1:]:
        first._check_dims(m)
        np.logical_or(acc, m.pixels, out=acc)
    return BinaryMask(acc)


def nearest_pixel_gap(a: BinaryMask, b: BinaryMask) -> float:
    """Smallest Euclidean distance between a set pixel of ``a`` and one of ``b``.

    Zero iff the masks share a set pixel.  Raises EmptyMaskError when either
    mask is empty and DimensionMismatchError on size disagreement.
    """
    a._check_dims(b)
    if a.is_empty() or b.is_empty():
        raise EmptyMaskError("nearest_pixel_gap needs set pixels on both sides")
    if a.overlaps(b):
        return 0.0
    from scipy.spatial import cKDTree

    ys_a, xs_a = np.nonzero(a.pixels)
    ys_b, xs_b = np.nonzero(b.pixels)
    tree = cKDTree(np.column_stack([xs_a, ys_a]))
    dists, _ = tree.query(np.column_stack([xs_b, ys_b]), k=1)
    return float(dists.min())


def normalize_scale(dims: ImageDims, target_pixels: int) -> tuple[float, ImageDims]:
    """Uniform scale factor taking ``dims`` to roughly ``target_pixels`` total.

    The scale is sqrt(target / current); each axis is scaled and rounded
    half-to-even independently, with a floor of one pixel, so aspect ratio is
    preserved up to per-axis rounding.
    """
    if target_pixels < 1:
        raise ValueError(f"target_pixels must be >= 1, got {target_pixels}")
    scale = math.sqrt(target_pixels / dims.pixel_count)
    new_w = max(1, round(dims.width * scale))
    new_h = max(1, round(dims.height * scale))
    return scale, ImageDims(new_w, new_h)
