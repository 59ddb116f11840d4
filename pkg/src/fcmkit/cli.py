"""Command-line entry points: extract, run, equilibria, mix, agentic, serve."""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import engine
from .errors import FcmError, InputError
from .extraction.pipeline import ExtractionConfig, extract_fcm
from .extraction.providers import HttpProvider, ReplayProvider
from .loop import LocalDirectorySource, LoopConfig, run_loop
from .mixer import MixSpec, mix
from .model import (
    CLAMPED_LINEAR,
    HARD_THRESHOLD,
    LOGISTIC,
    TOOL_VERSION,
    Squasher,
    StateVector,
)
from .persistence import export_trajectory, load_fcm, save_fcm

PHI_CHOICES = (HARD_THRESHOLD, LOGISTIC, CLAMPED_LINEAR)


def _fail_on_fcm_error(command):
    """Domain failures exit 1 with the message (pipeline errors carry a stage tag)."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except click.ClickException:
            raise
        except FcmError as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _parse_init(text: str, n: int) -> StateVector:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise click.UsageError(f"--init must be comma-separated numbers: {exc}") from exc
    if len(values) != n:
        raise click.UsageError(f"--init has {len(values)} values but the FCM has {n} nodes")
    try:
        return StateVector(values=values)
    except InputError as exc:
        raise click.UsageError(str(exc)) from exc


def _squasher(phi: str, threshold: float, steepness: float) -> Squasher:
    return Squasher(kind=phi, threshold=threshold, steepness=steepness)


def _bits(state: StateVector) -> str:
    return "".join("1" if v > 0.5 else "0" for v in state.values)


@click.group()
@click.version_option(version=TOOL_VERSION, prog_name="fcmkit")
def main():
    """Build, run, and steer fuzzy cognitive maps."""


@main.command()
@click.argument("text_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--model", default="", help="Model identifier passed to the provider.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Where to write the extracted FCM (default: <text_file>.fcm.json).")
@click.option("--replay-dir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              default=None, help="Answer from recorded transcripts instead of a live provider.")
@_fail_on_fcm_error
def extract(text_file: Path, model: str, out: Path | None, replay_dir: Path | None):
    """Extract an FCM from a plain-text document."""
    from .extraction.documents import document_from_text

    text = text_file.read_text(encoding="utf-8")
    doc = document_from_text(text, title=text_file.name)
    provider = ReplayProvider(replay_dir) if replay_dir else HttpProvider(model=model or None)
    config = ExtractionConfig(model=model)
    fcm, artifacts = extract_fcm(doc, provider, config)
    out = out or text_file.with_suffix(".fcm.json")
    save_fcm(fcm, out)
    click.echo(f"document {doc.doc_id}: {fcm.n} nodes, {fcm.edges.nonzero_count()} edges")
    if artifacts.rejected_edges:
        click.echo(f"rejected {len(artifacts.rejected_edges)} edge(s) as potential hallucinations:")
        for edge, reason in artifacts.rejected_edges:
            click.echo(f"  {edge.source_label} -> {edge.target_label}: {reason}")
    click.echo(f"wrote {out}")


@main.command()
@click.argument("fcm_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--init", "init_text", required=True,
              help="Comma-separated initial activations, one per node.")
@click.option("--phi", type=click.Choice(PHI_CHOICES), default=HARD_THRESHOLD)
@click.option("--threshold", type=float, default=0.0, show_default=True)
@click.option("--steepness", type=float, default=5.0, show_default=True)
@click.option("--max-steps", type=int, default=None)
@click.option("--export", "export_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Write the trajectory as CSV (plus .meta.json sidecar).")
@_fail_on_fcm_error
def run(fcm_file: Path, init_text: str, phi: str, threshold: float, steepness: float,
        max_steps: int | None, export_path: Path | None):
    """Run one trajectory and report where it settles."""
    fcm = load_fcm(fcm_file)
    init = _parse_init(init_text, fcm.n)
    squasher = _squasher(phi, threshold, steepness)
    states, classification = engine.run_trajectory(fcm, init, squasher, max_steps=max_steps)
    click.echo(classification.describe())
    click.echo(f"steps: {len(states) - 1}")
    if classification.resolved:
        for state in classification.cycle_states:
            click.echo(f"  cycle state: [{', '.join(format(v, 'g') for v in state.values)}]")
    if export_path is not None:
        export_trajectory(states, classification, fcm.labels, export_path)
        click.echo(f"wrote {export_path} and {export_path}.meta.json")


@main.command()
@click.argument("fcm_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--enumerate-binary", "enumerate_binary", is_flag=True,
              help="Visit all 2^n binary inits and report every attractor with its basin size.")
@click.option("--threshold", type=float, default=0.0, show_default=True)
@_fail_on_fcm_error
def equilibria(fcm_file: Path, enumerate_binary: bool, threshold: float):
    """Summarize attractors under the hard-threshold update."""
    fcm = load_fcm(fcm_file)
    squasher = Squasher.hard_threshold(threshold)
    if not enumerate_binary:
        init = StateVector(values=(1.0,) * fcm.n)
        _, classification = engine.run_trajectory(fcm, init, squasher)
        click.echo(f"from the all-ones init: {classification.describe()}")
        for state in classification.cycle_states:
            click.echo(f"  cycle state: {_bits(state)}")
        return
    basins = engine.enumerate_basins(fcm, squasher)
    ranked = sorted(
        basins.items(), key=lambda item: (len(item[1]), tuple(_bits(s) for s in item[0]))
    )
    sizes = ", ".join(str(len(basin)) for _, basin in ranked)
    click.echo(f"{len(ranked)} attractors, basin sizes {sizes}")
    for cycle, basin in ranked:
        kind = "fixed point" if len(cycle) == 1 else f"{len(cycle)}-step cycle"
        states = " -> ".join(_bits(state) for state in cycle)
        click.echo(f"  {kind} [{states}]: basin {len(basin)}")


@main.command(name="mix")
@click.argument("fcm_files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--weights", "weights_text", required=True,
              help="Comma-separated convex weights, one per FCM.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None)
@_fail_on_fcm_error
def mix_command(fcm_files, weights_text: str, out: Path | None):
    """Convex-combine FCMs over the union of their node sets."""
    try:
        weights = tuple(float(part) for part in weights_text.split(","))
    except ValueError as exc:
        raise click.UsageError(f"--weights must be comma-separated numbers: {exc}") from exc
    components = tuple(load_fcm(path) for path in fcm_files)
    try:
        spec = MixSpec(components=components, weights=weights)
    except InputError as exc:
        raise click.UsageError(str(exc)) from exc
    mixed = mix(spec)
    click.echo(
        f"mixed {len(components)} FCMs -> {mixed.n} nodes, {mixed.edges.nonzero_count()} edges"
    )
    if out is not None:
        save_fcm(mixed, out)
        click.echo(f"wrote {out}")


@main.command()
@click.option("--fcm", "fcm_file", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Initial FCM to grow.")
@click.option("--corpus", "corpus_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory of .txt documents to pull from.")
@click.option("--iterations", type=int, default=5, show_default=True)
@click.option("--mix-weight", type=float, default=0.5, show_default=True,
              help="Convex weight given to each newly extracted FCM.")
@click.option("--out", "run_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path),
              help="Run directory for the journal and per-iteration artifacts.")
@click.option("--replay-dir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              default=None, help="Answer from recorded transcripts instead of a live provider.")
@click.option("--model", default="", help="Model identifier passed to the provider.")
@_fail_on_fcm_error
def agentic(fcm_file: Path, corpus_dir: Path, iterations: int, mix_weight: float,
            run_dir: Path, replay_dir: Path | None, model: str):
    """Let the FCM's equilibria steer iterative extraction over a corpus."""
    initial = load_fcm(fcm_file)
    provider = ReplayProvider(replay_dir) if replay_dir else HttpProvider(model=model or None)
    config = LoopConfig(
        mix_weight_new=mix_weight,
        max_iterations=iterations,
        extraction=ExtractionConfig(model=model),
    )
    state = run_loop(initial, LocalDirectorySource(corpus_dir), provider, config, run_dir)
    for record in state.history:
        line = f"iteration {record.iteration}: {record.status}"
        if record.doc_title:
            line += f" ({record.doc_title})"
        if record.error:
            line += f" - {record.error}"
        click.echo(line)
    click.echo(
        f"final FCM: {state.current_fcm.n} nodes, "
        f"{state.current_fcm.edges.nonzero_count()} edges -> {run_dir}/final.json"
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--preload", "preload_paths", multiple=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="FCM files registered as snapshots at startup (repeatable).")
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              default=None, help="Static UI assets served at /.")
@click.option("--replay-dir", type=click.Path(exists=True, file_okay=False, path_type=Path),
              default=None, help="Back /api/extract with recorded transcripts.")
@_fail_on_fcm_error
def serve(host: str, port: int, preload_paths, ui_dir: Path | None, replay_dir: Path | None):
    """Serve the HTTP API (and optionally the UI) for scripts and the browser."""
    import uvicorn

    from .service import create_app

    provider = None
    if replay_dir is not None:
        provider = ReplayProvider(replay_dir)
    else:
        import os

        if os.environ.get("LLM_BASE_URL"):
            provider = HttpProvider()
    preload = [load_fcm(path) for path in preload_paths]
    app = create_app(provider=provider, preload=preload, ui_dir=ui_dir)
    for fcm, path in zip(preload, preload_paths):
        click.echo(f"preloaded {path}: {fcm.n} nodes")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
