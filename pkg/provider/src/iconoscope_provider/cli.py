"""Command-line entry point speaking the subprocess provider protocol.

Invoked as `iconoscope-provider <image>`: the result document goes to
standard output, diagnostics to standard error, and any failure exits 2
with standard output left empty. Every option can also come from an
environment variable, so a bare executable path handed to the engine
still carries its configuration.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .labelmap import LabelMapError, default_label_map, load_label_map
from .model import (
    ImageError,
    WeightsError,
    build_model,
    detect,
    load_image,
    load_weights,
)
from .response import render, response_document

WEIGHTS_ENV_VAR = "ICONOSCOPE_PROVIDER_WEIGHTS"
LABEL_MAP_ENV_VAR = "ICONOSCOPE_PROVIDER_LABEL_MAP"
MIN_SCORE_ENV_VAR = "ICONOSCOPE_PROVIDER_MIN_SCORE"
MIN_SIZE_ENV_VAR = "ICONOSCOPE_PROVIDER_MIN_SIZE"
MAX_SIZE_ENV_VAR = "ICONOSCOPE_PROVIDER_MAX_SIZE"
SEED_ENV_VAR = "ICONOSCOPE_PROVIDER_SEED"

EXIT_OK = 0
EXIT_UNUSABLE_INPUT = 2


def _read_label_map(path: str | None):
    if path is None:
        return default_label_map()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise LabelMapError(f"cannot read label map: {exc}") from exc
    return load_label_map(text)


@click.command()
@click.version_option(__version__)
@click.argument("image", type=click.Path())
@click.option(
    "--weights",
    envvar=WEIGHTS_ENV_VAR,
    type=click.Path(),
    default=None,
    help="Checkpoint holding the model state dict.",
)
@click.option(
    "--label-map",
    "label_map_path",
    envvar=LABEL_MAP_ENV_VAR,
    type=click.Path(),
    default=None,
    help="Category translation table; defaults to the shipped map.",
)
@click.option(
    "--min-score",
    envvar=MIN_SCORE_ENV_VAR,
    type=click.FloatRange(0.0, 1.0),
    default=0.05,
    show_default=True,
    help="Drop raw hits scoring below this; the engine applies its own "
    "retention threshold on top.",
)
@click.option(
    "--min-size",
    envvar=MIN_SIZE_ENV_VAR,
    type=click.IntRange(min=1),
    default=800,
    show_default=True,
    help="Shorter-side target for the internal rescale.",
)
@click.option(
    "--max-size",
    envvar=MAX_SIZE_ENV_VAR,
    type=click.IntRange(min=1),
    default=1333,
    show_default=True,
    help="Longer-side cap for the internal rescale.",
)
@click.option(
    "--seed",
    envvar=SEED_ENV_VAR,
    type=int,
    default=0,
    show_default=True,
    help="Seed pinning inference randomness for reproducible output.",
)
def main(image, weights, label_map_path, min_score, min_size, max_size, seed):
    """Detect figures and attribute cues in IMAGE, print the result as JSON.

    The document matches the engine's provider wire schema: detections carry
    attribute labels from the label map, regions carry raw body labels for
    figure building. Coordinates are in the image's own pixel space.
    """
    try:
        if weights is None:
            raise WeightsError(
                f"no weights given; pass --weights or set {WEIGHTS_ENV_VAR}"
            )
        if not Path(weights).is_file():
            raise WeightsError(f"weights not found: {weights}")
        label_map = _read_label_map(label_map_path)
        # Image decode is cheap; fail on it before paying for model build.
        tensor, dims = load_image(image)
        model = build_model(min_size=min_size, max_size=max_size)
        load_weights(model, weights)
        output = detect(model, tensor, seed=seed)
    except (ImageError, LabelMapError, WeightsError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_UNUSABLE_INPUT)
    document = response_document(output, dims, label_map, min_score=min_score)
    click.echo(render(document), nl=False)
