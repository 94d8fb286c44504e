"""Command-line front end.

Exit codes: 0 on success, 1 when a chronology fails validation, 2 for
usage errors (click's default).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import interchange, pipeline
from .chronology import detect_gaps
from .ingest import CorpusError, detect_near_duplicates, load_corpus, load_manifest
from .layout import LayoutOptions, compute_layout
from .model import apply_perspective, validate
from .render import default_style, load_style, render_svg, render_view_json


@click.group()
def main() -> None:
    """Reconstruct chronologies from document corpora and draw them."""


def _read_chronology(path: Path):
    try:
        data = interchange.loads(Path(path).read_text(encoding="utf-8"))
        return interchange.chronology_from_dict(data)
    except (OSError, ValueError, KeyError) as exc:
        raise click.UsageError(f"cannot read chronology {path}: {exc}")


def _write_out(text: str, out: Path | None) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


@main.command()
@click.argument("manifest", type=click.Path(exists=True, path_type=Path))
def ingest(manifest: Path) -> None:
    """Parse a corpus manifest and report what was loaded."""
    try:
        corpus = load_corpus(load_manifest(manifest))
    except CorpusError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"objects: {len(corpus.objects)}")
    for warning in corpus.warnings:
        click.echo(f"warning: {warning}", err=True)


@main.command()
@click.argument("manifest", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "-o", type=click.Path(path_type=Path), help="Write the chronology document here instead of stdout.")
@click.option("--name", default=None, help="Chronology name (defaults to the corpus name).")
def extract(manifest: Path, out: Path | None, name: str | None) -> None:
    """Run the full pipeline: ingest, extract, relate, build."""
    try:
        result = pipeline.run_pipeline_from_path(manifest, name=name)
    except CorpusError as exc:
        raise click.ClickException(str(exc))
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    for rejection in result.rejections:
        click.echo(
            f"rejected: {rejection.relation.source} -> {rejection.relation.target}: "
            f"{rejection.reason}",
            err=True,
        )
    for proposal in result.proposals:
        click.echo(f"proposal: {proposal.rel_type.value} {proposal.source} -> {proposal.target}", err=True)
    _write_out(interchange.dumps(interchange.chronology_to_dict(result.chronology)), out)


@main.command("validate")
@click.argument("chronology", type=click.Path(exists=True, path_type=Path))
def validate_cmd(chronology: Path) -> None:
    """Check chronology invariants; exit 1 when any are violated."""
    violations = validate(_read_chronology(chronology))
    for violation in violations:
        click.echo(f"{violation.element}: {violation.rule}: {violation.message}")
    if violations:
        sys.exit(1)
    click.echo("ok")


@main.command()
@click.argument("chronology", type=click.Path(exists=True, path_type=Path))
@click.option("--perspective", type=click.Path(exists=True, path_type=Path), help="Perspective document to apply first.")
@click.option("--format", "fmt", type=click.Choice(["svg", "json"]), default="svg", show_default=True)
@click.option("--spacing", type=click.Choice(["uniform", "proportional"]), default="uniform", show_default=True)
@click.option("--style", "style_path", type=click.Path(exists=True, path_type=Path), help="Style table overriding the defaults.")
@click.option("--out", "-o", type=click.Path(path_type=Path))
def render(chronology, perspective, fmt, spacing, style_path, out) -> None:
    """Draw a chronology as a TimeFlow diagram."""
    view = _read_chronology(chronology)
    if perspective:
        data = interchange.loads(Path(perspective).read_text(encoding="utf-8"))
        view = apply_perspective(view, interchange.perspective_from_dict(data))
    layout = compute_layout(view, LayoutOptions(spacing=spacing))
    style = load_style(style_path) if style_path else default_style()
    if fmt == "svg":
        _write_out(render_svg(layout, view, style), out)
    else:
        _write_out(interchange.dumps(render_view_json(layout, view, style)), out)


@main.command()
@click.argument("chronology", type=click.Path(exists=True, path_type=Path))
@click.option("--min-days", default=365, show_default=True, help="Smallest uncovered stretch worth reporting.")
def gaps(chronology: Path, min_days: int) -> None:
    """List uncovered stretches between event anchors."""
    for gap in detect_gaps(_read_chronology(chronology), min_days):
        click.echo(f"{gap.start.isoformat()} .. {gap.end.isoformat()}")


@main.command()
@click.argument("manifest", type=click.Path(exists=True, path_type=Path))
@click.option("--threshold", default=0.9, show_default=True, help="Minimum shingle similarity to report.")
def dedup(manifest: Path, threshold: float) -> None:
    """Report near-duplicate object pairs in a corpus."""
    try:
        corpus = load_corpus(load_manifest(manifest))
    except CorpusError as exc:
        raise click.ClickException(str(exc))
    for left, right, score in detect_near_duplicates(corpus.objects, threshold):
        click.echo(f"{left}\t{right}\t{score:.6f}")


@main.command()
@click.option("--addr", default=None, help="host:port to bind (default 127.0.0.1:8000, or TIMEFLOW_ADDR).")
@click.option("--root", type=click.Path(path_type=Path), default=None, help="Repository directory (default ./timeflow-data, or TIMEFLOW_ROOT).")
def serve(addr: str | None, root: Path | None) -> None:
    """Run the HTTP service."""
    import os

    import uvicorn

    from .service import create_app
    from .store import Repository

    addr = addr or os.environ.get("TIMEFLOW_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise click.UsageError(f"--addr must look like host:port, got {addr!r}")
    root = root or Path(os.environ.get("TIMEFLOW_ROOT", "timeflow-data"))
    uvicorn.run(create_app(Repository(Path(root))), host=host, port=int(port))


if __name__ == "__main__":
    main()
