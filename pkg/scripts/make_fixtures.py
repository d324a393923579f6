#!/usr/bin/env python3
"""Regenerate the committed test fixtures under tests/fixtures/.

Three fixture sets:

* ``verrocchio/`` : one three-figure baptism scene where two attributes tie
  at the same confidence and the identity fall-through has to resolve them.
* ``corpus/``     : eleven single-figure images whose pooled evaluation
  yields fixed per-saint precision/recall targets (see tests/fixtures/README.md).
* ``blank/``      : an image with an empty perception response.

Everything is deterministic; run from the repository root:

    python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from iconoscope import BinaryMask, encode_mask, to_json  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

PARCHMENT = (222, 205, 170)
ROBE = [(108, 52, 46), (52, 72, 108), (86, 98, 56)]
HALO = (212, 175, 55)
WHITE = (245, 245, 240)
WOOD = (92, 64, 40)
GRAY = (120, 120, 120)


def rect_mask(size: int, x0: int, y0: int, x1: int, y1: int) -> dict:
    px = np.zeros((size, size), dtype=bool)
    px[y0:y1, x0:x1] = True
    return encode_mask(BinaryMask(px))


def draw_person(draw: ImageDraw.ImageDraw, x0: int, y0: int, x1: int, y1: int, color) -> None:
    head_r = max(6, (x1 - x0) // 6)
    cx = (x0 + x1) // 2
    draw.rectangle([x0, y0 + head_r, x1 - 1, y1 - 1], fill=color)
    draw.ellipse([cx - head_r - 4, y0 - head_r, cx + head_r + 4, y0 + head_r + 8], fill=HALO)
    draw.ellipse([cx - head_r, y0 - head_r + 4, cx + head_r, y0 + head_r + 4], fill=(224, 188, 153))


def draw_glyph(draw: ImageDraw.ImageDraw, label: str, box: list[float]) -> None:
    x0, y0, x1, y1 = box
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    if label == "dove":
        draw.ellipse([cx - 16, cy - 10, cx + 16, cy + 10], fill=WHITE)
        draw.polygon([(cx - 14, cy), (cx - 30, cy - 12), (cx - 22, cy + 2)], fill=WHITE)
        draw.polygon([(cx + 14, cy), (cx + 30, cy - 12), (cx + 22, cy + 2)], fill=WHITE)
    elif label == "cross":
        w = (x1 - x0) / 5
        draw.rectangle([cx - w / 2, y0, cx + w / 2, y1], fill=WOOD)
        draw.rectangle([x0, cy - (y1 - y0) / 3, x1, cy - (y1 - y0) / 3 + w], fill=WOOD)
    elif label == "winged_lion":
        draw.ellipse([x0, cy - 14, x1, cy + 18], fill=(176, 137, 54))
        draw.polygon([(cx - 10, cy - 10), (cx - 34, cy - 36), (cx + 2, cy - 14)], fill=WHITE)
        draw.polygon([(cx + 10, cy - 10), (cx + 34, cy - 36), (cx - 2, cy - 14)], fill=WHITE)
    elif label == "eagle":
        draw.polygon([(cx, cy - 18), (cx - 26, cy + 12), (cx + 26, cy + 12)], fill=(70, 50, 30))
    elif label == "keys":
        draw.ellipse([cx - 14, cy - 14, cx, cy], outline=HALO, width=4)
        draw.rectangle([cx - 2, cy - 8, cx + 18, cy - 4], fill=HALO)
    else:
        draw.rectangle([cx - 10, cy - 10, cx + 10, cy + 10], fill=GRAY)


def paint(size: int, persons: list[tuple[int, int, int, int]],
          glyphs: list[tuple[str, list[float]]]) -> Image.Image:
    img = Image.new("RGB", (size, size), PARCHMENT)
    draw = ImageDraw.Draw(img)
    for i, (x0, y0, x1, y1) in enumerate(persons):
        draw_person(draw, x0, y0, x1, y1, ROBE[i % len(ROBE)])
    for label, box in glyphs:
        draw_glyph(draw, label, box)
    return img


def write_fixture(directory: Path, stem: str, image: Image.Image, response: dict) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    image.save(directory / f"{stem}.png")
    (directory / f"{stem}.detections.json").write_text(to_json(response), encoding="utf-8")


def person_region(size: int, rect: tuple[int, int, int, int], confidence: float = 0.97) -> dict:
    return {"raw_label": "person", "confidence": confidence, "mask": rect_mask(size, *rect)}


def make_verrocchio() -> None:
    size = 512
    left = (40, 200, 150, 480)
    center = (210, 140, 300, 500)
    right = (360, 120, 470, 500)
    bird = (235, 60, 275, 150)
    dove_box = [230.0, 55.0, 280.0, 155.0]
    cross_box = [430.0, 100.0, 470.0, 260.0]
    response = {
        "dims": {"width": size, "height": size},
        "detections": [
            {"label": "dove", "confidence": 0.99, "box": dove_box,
             "mask": rect_mask(size, *bird)},
            {"label": "cross", "confidence": 0.99, "box": cross_box},
        ],
        "regions": [
            person_region(size, left, 0.98),
            person_region(size, center, 0.99),
            person_region(size, right, 0.97),
            {"raw_label": "bird", "confidence": 0.88, "mask": rect_mask(size, *bird)},
        ],
    }
    image = paint(size, [left, center, right],
                  [("dove", dove_box), ("cross", cross_box)])
    write_fixture(FIXTURES / "verrocchio", "baptism", image, response)

    # Same attribute associations as the bundled database except that the
    # dove names Christ here: in a baptism the dove descends on him.
    override = {
        "version": "1-baptism",
        "entries": [
            {"attribute": "cross",
             "candidates": [{"saint": "Christ", "prior": 0.6},
                            {"saint": "John the Baptist", "prior": 0.4}]},
            {"attribute": "dove",
             "candidates": [{"saint": "Christ", "prior": 1.0}]},
            {"attribute": "angel", "candidates": [{"saint": "Saint Matthew", "prior": 1.0}]},
            {"attribute": "winged_lion", "candidates": [{"saint": "Saint Mark", "prior": 1.0}]},
            {"attribute": "bull", "candidates": [{"saint": "Saint Luke", "prior": 1.0}]},
            {"attribute": "boat", "candidates": [{"saint": "Saint Simon", "prior": 1.0}]},
            {"attribute": "ax", "candidates": [{"saint": "Saint Thomas", "prior": 1.0}]},
            {"attribute": "wheel", "candidates": [{"saint": "Saint Catherine", "prior": 1.0}]},
            {"attribute": "lion", "candidates": [{"saint": "Saint Daniel", "prior": 1.0}]},
            {"attribute": "dragon", "candidates": [{"saint": "Saint George", "prior": 1.0}]},
            {"attribute": "eagle", "candidates": [{"saint": "Saint John", "prior": 1.0}]},
            {"attribute": "keys", "candidates": [{"saint": "Saint Peter", "prior": 1.0}]},
        ],
    }
    (FIXTURES / "verrocchio" / "db_override.json").write_text(to_json(override), encoding="utf-8")


def make_corpus() -> None:
    directory = FIXTURES / "corpus"
    size = 512
    person = (180, 120, 330, 480)

    def single(stem: str, detections: list[dict], extra_regions: list[dict] | None = None,
               glyphs: list[tuple[str, list[float]]] | None = None) -> None:
        response = {
            "dims": {"width": size, "height": size},
            "detections": detections,
            "regions": [person_region(size, person)] + (extra_regions or []),
        }
        image = paint(size, [person], glyphs or [])
        write_fixture(directory, stem, image, response)

    def det(label: str, confidence: float, box: list[float]) -> dict:
        return {"label": label, "confidence": confidence, "box": box}

    lion_box = [200.0, 350.0, 300.0, 450.0]
    eagle_box = [210.0, 60.0, 300.0, 130.0]
    keys_box = [330.0, 300.0, 390.0, 360.0]

    # trinity_a is authored at 1024x1024, double the working resolution,
    # so its response exercises the rescaling path end to end.
    big = 1024
    big_person = (360, 240, 660, 960)
    dove_box_big = [420.0, 80.0, 520.0, 180.0]
    response_a = {
        "dims": {"width": big, "height": big},
        "detections": [det("dove", 0.97, dove_box_big)],
        "regions": [person_region(big, big_person)],
    }
    write_fixture(directory, "trinity_a",
                  paint(big, [big_person], [("dove", dove_box_big)]), response_a)

    dove_box = [210.0, 40.0, 260.0, 90.0]
    single("trinity_b", [det("dove", 0.95, dove_box)], glyphs=[("dove", dove_box)])
    single("mark_writing", [det("winged_lion", 0.96, lion_box)],
           extra_regions=[{"raw_label": "chair", "confidence": 0.80,
                           "mask": rect_mask(size, 60, 380, 150, 470)}],
           glyphs=[("winged_lion", lion_box)])
    single("mark_lion", [det("winged_lion", 0.93, lion_box)],
           extra_regions=[{"raw_label": "cat", "confidence": 0.85,
                           "mask": rect_mask(size, 300, 380, 400, 480)}],
           glyphs=[("winged_lion", lion_box)])
    single("mark_spurious", [det("winged_lion", 0.92, lion_box)],
           glyphs=[("winged_lion", lion_box)])
    single("john_eagle_a", [det("eagle", 0.98, eagle_box)], glyphs=[("eagle", eagle_box)])
    single("john_eagle_b", [det("eagle", 0.94, eagle_box)], glyphs=[("eagle", eagle_box)])
    single("john_eagle_c", [det("eagle", 0.91, eagle_box)], glyphs=[("eagle", eagle_box)])
    single("john_missed", [det("eagle", 0.40, eagle_box)], glyphs=[("eagle", eagle_box)])
    single("peter_keys", [det("keys", 0.99, keys_box)], glyphs=[("keys", keys_box)])
    single("peter_missed", [])

    stems = [
        "trinity_a", "trinity_b", "mark_writing", "mark_lion", "mark_spurious",
        "john_eagle_a", "john_eagle_b", "john_eagle_c", "john_missed",
        "peter_keys", "peter_missed",
    ]
    manifest = [{"image_id": stem, "image_path": f"{stem}.png"} for stem in stems]
    (directory / "manifest.json").write_text(to_json(manifest), encoding="utf-8")

    saints_by_id = {
        "trinity_a": [{"saint": "God", "box": [150, 200, 360, 400]}],
        "trinity_b": [{"saint": "God"}],
        "mark_writing": [{"saint": "Saint Mark"}],
        "mark_lion": [{"saint": "Saint Mark"}],
        "mark_spurious": [],
        "john_eagle_a": [{"saint": "Saint John"}],
        "john_eagle_b": [{"saint": "Saint John"}],
        "john_eagle_c": [{"saint": "Saint John"}],
        "john_missed": [{"saint": "Saint John"}],
        "peter_keys": [{"saint": "Saint Peter"}],
        "peter_missed": [{"saint": "Saint Peter"}],
    }
    truth = [{"image_id": stem, "saints": saints_by_id[stem]} for stem in stems]
    (directory / "truth.json").write_text(to_json(truth), encoding="utf-8")


def make_blank() -> None:
    directory = FIXTURES / "blank"
    size = 64
    response = {"dims": {"width": size, "height": size}, "detections": [], "regions": []}
    write_fixture(directory, "blank", Image.new("RGB", (size, size), PARCHMENT), response)


def main() -> None:
    make_verrocchio()
    make_corpus()
    make_blank()
    count = sum(1 for _ in FIXTURES.rglob("*") if _.is_file())
    print(f"wrote fixtures under {FIXTURES} ({count} files)")


if __name__ == "__main__":
    main()
