import json

import pytest
from PIL import Image

from iconoscope import (
    FixtureProvider,
    ImageUnreadableError,
    analyze_image,
    default_database,
    load_database,
)
from iconoscope.overlay import render_overlay


def test_renders_assigned_reading(corpus_dir, tmp_path):
    reading = analyze_image(FixtureProvider(), corpus_dir / "peter_keys.png",
                            default_database())
    out = tmp_path / "overlay.png"
    render_overlay(corpus_dir / "peter_keys.png", reading, out)
    with Image.open(out) as img:
        assert img.size == (512, 512)


def test_renders_unassigned_attributes(corpus_dir, tmp_path):
    crossless = load_database(json.dumps({
        "version": "x",
        "entries": [{"attribute": "cross",
                     "candidates": [{"saint": "Christ", "prior": 1.0}]}],
    }))
    reading = analyze_image(FixtureProvider(), corpus_dir / "peter_keys.png", crossless)
    assert reading.reading.unassigned_attributes
    out = tmp_path / "overlay.png"
    render_overlay(corpus_dir / "peter_keys.png", reading, out)
    assert out.stat().st_size > 0


def test_renders_empty_reading(blank_dir, tmp_path):
    reading = analyze_image(FixtureProvider(), blank_dir / "blank.png",
                            default_database())
    out = tmp_path / "overlay.png"
    render_overlay(blank_dir / "blank.png", reading, out)
    with Image.open(out) as img:
        assert img.size == (reading.dims.width, reading.dims.height)


def test_missing_image(corpus_dir, tmp_path):
    reading = analyze_image(FixtureProvider(), corpus_dir / "peter_keys.png",
                            default_database())
    with pytest.raises(ImageUnreadableError):
        render_overlay(tmp_path / "absent.png", reading, tmp_path / "o.png")
