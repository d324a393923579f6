"""Shared fixtures: seeded weights, sample panels, provider invocations.

Pretrained COCO checkpoints cannot be downloaded in this environment, so
the suite runs the real architecture with reproducible randomly initialized
weights: wire format, exit codes and determinism are fully exercised, while
detection quality stays gated behind real weights (see test_cli).
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest
import torch
from PIL import Image, ImageDraw

from iconoscope_provider.coco import COCO_CATEGORIES
from iconoscope_provider.model import build_model

# Small rescale bounds keep CPU inference around a second per image.
FAST_ARGS = ("--min-size", "64", "--max-size", "96", "--min-score", "0.0")

_PROVIDER_ENV_VARS = (
    "ICONOSCOPE_PROVIDER_WEIGHTS",
    "ICONOSCOPE_PROVIDER_LABEL_MAP",
    "ICONOSCOPE_PROVIDER_MIN_SCORE",
    "ICONOSCOPE_PROVIDER_MIN_SIZE",
    "ICONOSCOPE_PROVIDER_MAX_SIZE",
    "ICONOSCOPE_PROVIDER_SEED",
)


@pytest.fixture(scope="session")
def checkpoint_path(tmp_path_factory):
    torch.manual_seed(0xC0C0)
    model = build_model(min_size=64, max_size=96)
    path = tmp_path_factory.mktemp("weights") / "seeded_random_init.pt"
    torch.save(model.state_dict(), path)
    return path


def _paint(width: int, height: int, accent: int) -> Image.Image:
    img = Image.new("RGB", (width, height), (24 + accent * 9, 38, 66))
    draw = ImageDraw.Draw(img)
    draw.rectangle([4, height // 3, width - 5, height - 4], fill=(90, 70 + accent * 8, 40))
    draw.ellipse([width // 4, 4, 3 * width // 4, height // 2], fill=(200, 180, 120))
    draw.line([0, height - 6, width, height - 6], fill=(230, 230, 210), width=2)
    return img


@pytest.fixture(scope="session")
def sample_images(tmp_path_factory):
    """Five synthetic panels with varied sizes and orientations."""
    directory = tmp_path_factory.mktemp("panels")
    paths = []
    for index, (width, height) in enumerate(
        [(64, 64), (80, 56), (56, 80), (72, 72), (64, 96)]
    ):
        path = directory / f"panel_{index}.png"
        _paint(width, height, index).save(path)
        paths.append(path)
    return paths


@pytest.fixture(scope="session")
def wide_label_map_path(tmp_path_factory):
    """Test-only map covering every real category, both ways.

    The shipped map is honest about COCO's vocabulary gap, which with
    untrained weights usually means empty documents. Mapping everything
    guarantees hits, so masks and boxes actually flow across the wire.
    """
    token_by_category = {
        category: category.replace(" ", "_")
        for category in COCO_CATEGORIES
        if category not in ("__background__", "N/A")
    }
    doc = {
        "version": "wide-test",
        "detections": token_by_category,
        "regions": token_by_category,
    }
    path = tmp_path_factory.mktemp("maps") / "wide_label_map.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def invoke_provider():
    """Run the CLI in a fresh process, isolated from ambient provider env."""

    def run(args, env_extra=None):
        env = {
            key: value
            for key, value in os.environ.items()
            if key not in _PROVIDER_ENV_VARS
        }
        env.update(env_extra or {})
        return subprocess.run(
            [sys.executable, "-m", "iconoscope_provider", *map(str, args)],
            capture_output=True,
            text=True,
            env=env,
            timeout=300,
        )

    return run


@pytest.fixture(scope="session")
def provider_outputs(invoke_provider, checkpoint_path, sample_images):
    """Stdout of one default-map run per sample panel."""
    outputs = {}
    for path in sample_images:
        result = invoke_provider(
            ["--weights", checkpoint_path, *FAST_ARGS, path]
        )
        assert result.returncode == 0, result.stderr
        outputs[path] = result.stdout
    return outputs


@pytest.fixture(scope="session")
def wide_output(invoke_provider, checkpoint_path, wide_label_map_path, sample_images):
    """One run with the wide map; guaranteed non-empty lists."""
    result = invoke_provider(
        [
            "--weights", checkpoint_path,
            "--label-map", wide_label_map_path,
            *FAST_ARGS,
            sample_images[0],
        ]
    )
    assert result.returncode == 0, result.stderr
    return result.stdout


@pytest.fixture(scope="session")
def provider_script(tmp_path_factory, checkpoint_path, wide_label_map_path):
    """Wrapper invokable as `script <image>`, the shape the engine calls.

    All configuration flows through environment variables here, proving a
    bare executable path is enough for the engine's subprocess provider.
    """
    path = tmp_path_factory.mktemp("bin") / "provider"
    path.write_text(
        "#!/bin/sh\n"
        f'ICONOSCOPE_PROVIDER_WEIGHTS="{checkpoint_path}" \\\n'
        f'ICONOSCOPE_PROVIDER_LABEL_MAP="{wide_label_map_path}" \\\n'
        "ICONOSCOPE_PROVIDER_MIN_SIZE=64 \\\n"
        "ICONOSCOPE_PROVIDER_MAX_SIZE=96 \\\n"
        "ICONOSCOPE_PROVIDER_MIN_SCORE=0.0 \\\n"
        f'exec "{sys.executable}" -m iconoscope_provider "$1"\n',
        encoding="utf-8",
    )
    path.chmod(0o755)
    return path
