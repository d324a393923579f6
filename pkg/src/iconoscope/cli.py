"""Command-line interface.

Three commands: ``analyze`` reads one image and prints its reading as
JSON, ``evaluate`` scores a manifest of images against ground truth, and
``db validate`` checks an association database.

Exit codes are uniform across commands: 0 for success, 1 when the inputs
were readable but the run surfaced findings (validation errors, missing
ground truth, per-image perception failures), 2 when an input could not
be read or a provider misbehaved at the protocol level.
"""

from __future__ import annotations

import os
import sys
from contextlib import contextmanager
from pathlib import Path

import click

from .errors import (
    ImageUnreadableError,
    ManifestError,
    MissingTruthError,
    ParseError,
    ProtocolError,
    ProviderUnavailableError,
    SchemaError,
    ValidationError,
)
from .evaluation import format_table
from .knowledge import AssociationDatabase, default_database, load_database_file, validate_database
from .pipeline import (
    PipelineConfig,
    ProviderSpec,
    analyze_image,
    evaluation_document,
    load_config,
    load_manifest,
    load_truth,
    reading_document,
    run_evaluation,
    to_json,
)
from .providers import FixtureProvider, SubprocessProvider

PROVIDER_ENV_VAR = "ICONOSCOPE_PROVIDER"

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_UNUSABLE_INPUT = 2


@contextmanager
def _mapped_errors():
    try:
        yield
    except (
        ImageUnreadableError,
        ProviderUnavailableError,
        ProtocolError,
        ParseError,
        SchemaError,
        ManifestError,
    ) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_UNUSABLE_INPUT)
    except (ValidationError, MissingTruthError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FINDINGS)


def _load_db(db_path: Path | None, config: PipelineConfig) -> AssociationDatabase:
    """Database precedence: --db flag, then config database_path, then bundled."""
    path = db_path if db_path is not None else config.database_path
    if path is None:
        return default_database()
    return load_database_file(path)


def _load_config(config_path: Path | None) -> PipelineConfig:
    if config_path is None:
        return PipelineConfig()
    return load_config(config_path)


def _provider_factory(provider_exe: str | None, sidecar: Path | None, config: PipelineConfig):
    """Pick the perception provider.

    Precedence: an explicit ``--provider`` executable, then an explicit
    ``--fixture`` sidecar path, then the config file's provider, then the
    executable named by ICONOSCOPE_PROVIDER, then sidecar files beside
    each image.
    """
    if provider_exe and sidecar is not None:
        raise click.UsageError("--provider conflicts with --fixture")
    if provider_exe:
        return lambda: SubprocessProvider(provider_exe)
    if sidecar is not None:
        return lambda: FixtureProvider(sidecar)
    if config.provider is not None:
        return config.provider.make
    env_exe = os.environ.get(PROVIDER_ENV_VAR)
    if env_exe:
        return lambda: SubprocessProvider(env_exe)
    return lambda: FixtureProvider()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")


@click.group()
@click.version_option(package_name="iconoscope")
def main() -> None:
    """Identify saints in paintings from detected attributes."""


@main.command()
@click.argument("image", type=click.Path(path_type=Path))
@click.option("--fixture", "sidecar", type=click.Path(path_type=Path),
              help="Fixture sidecar JSON to use for this image.")
@click.option("--provider", "provider_exe", metavar="EXECUTABLE",
              help="Perception executable invoked as EXECUTABLE <image>.")
@click.option("--db", "db_path", type=click.Path(path_type=Path),
              help="Association database JSON (default: bundled database).")
@click.option("--config", "config_path", type=click.Path(path_type=Path),
              help="Pipeline config JSON; flags override its values.")
@click.option("--out", type=click.Path(path_type=Path),
              help="Write the reading JSON here instead of stdout.")
@click.option("--overlay", type=click.Path(path_type=Path),
              help="Also render a diagnostic overlay PNG here.")
def analyze(image: Path, sidecar: Path | None, provider_exe: str | None,
            db_path: Path | None, config_path: Path | None,
            out: Path | None, overlay: Path | None) -> None:
    """Analyze one IMAGE and emit its reading as JSON."""
    with _mapped_errors():
        config = _load_config(config_path)
        database = _load_db(db_path, config)
        provider = _provider_factory(provider_exe, sidecar, config)()
        image_reading = analyze_image(provider, image, database, config)
        _emit(to_json(reading_document(image_reading, config)), out)
        if overlay is not None:
            from .overlay import render_overlay

            render_overlay(image, image_reading, overlay)


@main.command()
@click.argument("manifest", type=click.Path(path_type=Path))
@click.argument("truth", type=click.Path(path_type=Path))
@click.option("--provider", "provider_exe", metavar="EXECUTABLE",
              help="Perception executable invoked as EXECUTABLE <image>.")
@click.option("--db", "db_path", type=click.Path(path_type=Path),
              help="Association database JSON (default: bundled database).")
@click.option("--config", "config_path", type=click.Path(path_type=Path),
              help="Pipeline config JSON; flags override its values.")
@click.option("--out", type=click.Path(path_type=Path),
              help="Write the report JSON here instead of stdout.")
@click.option("--table", is_flag=True, help="Print a text table instead of JSON on stdout.")
@click.option("--jobs", type=int, default=None,
              help="Worker threads (default: CPU count). Results do not depend on it.")
def evaluate(manifest: Path, truth: Path, provider_exe: str | None,
             db_path: Path | None, config_path: Path | None, out: Path | None,
             table: bool, jobs: int | None) -> None:
    """Score the MANIFEST corpus against TRUTH with per-saint precision/recall."""
    with _mapped_errors():
        if jobs is not None and jobs < 1:
            raise click.UsageError("--jobs must be >= 1")
        config = _load_config(config_path)
        database = _load_db(db_path, config)
        factory = _provider_factory(provider_exe, None, config)
        entries = load_manifest(manifest)
        truths = load_truth(truth)
        outcome = run_evaluation(factory, entries, truths, database, config, jobs=jobs)
        document = to_json(evaluation_document(outcome))
        if out is not None:
            out.write_text(document, encoding="utf-8")
            if table:
                click.echo(format_table(outcome.report), nl=False)
        elif table:
            click.echo(format_table(outcome.report), nl=False)
        else:
            click.echo(document, nl=False)
        for error in outcome.errors:
            click.echo(f"image {error.image_id}: {error.error_type}: {error.message}", err=True)
        if outcome.errors:
            sys.exit(EXIT_FINDINGS)


@main.group()
def db() -> None:
    """Association-database utilities."""


@db.command("validate")
@click.argument("path", required=False, type=click.Path(path_type=Path))
def db_validate(path: Path | None) -> None:
    """Validate an association database (the bundled one without PATH)."""
    try:
        database = load_database_file(path) if path is not None else default_database()
    except (ParseError, SchemaError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_UNUSABLE_INPUT)
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_FINDINGS)
    findings = validate_database(database)
    for finding in findings:
        click.echo(str(finding))
    if any(f.level == "error" for f in findings):
        sys.exit(EXIT_FINDINGS)
    if not findings:
        click.echo(f"ok: {len(database.entries)} attributes, version {database.version}")


if __name__ == "__main__":
    main()
