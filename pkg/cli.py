#!/usr/bin/env python3
"""
Special Circles CLI
Constructs, verifies and draws the circle through an arbitrary point P of a
triangle's plane built from chords through a generator point D
"""

import json
import logging
import sys
from typing import Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from special_circles import __version__, constants
from special_circles.construction import (
    ConstructionOutput,
    ConstructionPath,
    NonCanonicalForClosedFormError,
    construct,
)
from special_circles.figure import FigureOptions, write_svg
from special_circles.frames import construct_in_frame
from special_circles.geometry import GeometryError
from special_circles.scene_loader import SceneError, encode_scalar, load_scene, output_to_document
from special_circles.verify import PolicyUnsatisfiableError, Report, ScenePolicy, verify_batch, verify_scene

console = Console()
err_console = Console(stderr=True)


# Exit codes for scripted runs
class ExitCodes:
    SUCCESS = 0
    ERROR = 1
    DEGENERATE = 2


def env(name: str) -> str:
    return f"{constants.ENV_PREFIX}_{name}"


def setup_logging(log_level: str, json_output: bool = False) -> logging.Logger:
    """Configure logging with optional JSON output for scripted runs."""
    logger = logging.getLogger()
    logger.handlers.clear()

    if json_output:
        formatter = logging.Formatter(
            '{"timestamp":"%(asctime)s","level":"%(levelname)s","module":"%(name)s","message":"%(message)s"}'
        )
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(formatter)
    else:
        handler = RichHandler(console=err_console, show_time=True, show_path=False)

    logger.addHandler(handler)
    logger.setLevel(getattr(logging, log_level.upper()))
    return logger


def report_error(ctx: click.Context, code: str, message: str) -> None:
    """Prints ``error[CODE]: message`` (or a JSON object) to standard error and exits 1."""
    if ctx.obj.get("json_output"):
        click.echo(json.dumps({"status": "error", "code": code, "message": message}), err=True)
    else:
        click.echo(f"error[{code}]: {message}", err=True)
    sys.exit(ExitCodes.ERROR)


class SpecialCirclesGroup(click.Group):
    """Command group whose usage errors exit with ExitCodes.ERROR."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as e:
            e.exit_code = ExitCodes.ERROR
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = ExitCodes.ERROR
            raise


@click.group(cls=SpecialCirclesGroup)
@click.version_option(version=__version__, prog_name="special-circles")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default="WARNING",
    envvar=constants.ENV_LOG_LEVEL,
    help=f"Set logging level (env: {constants.ENV_LOG_LEVEL})",
)
@click.option(
    "--json-output",
    is_flag=True,
    envvar=constants.ENV_JSON_OUTPUT,
    help=f"Structured JSON logs and results (env: {constants.ENV_JSON_OUTPUT})",
)
@click.pass_context
def cli(ctx, log_level: str, json_output: bool):
    """Special circles through an arbitrary point of a triangle's plane."""
    ctx.ensure_object(dict)
    ctx.obj["logger"] = setup_logging(log_level, json_output)
    ctx.obj["json_output"] = json_output


scene_option = click.option(
    "--scene",
    "scene_path",
    required=True,
    type=click.Path(dir_okay=False),
    envvar=env("SCENE"),
    help=f"Scene document (JSON) (env: {env('SCENE')})",
)
path_option = click.option(
    "--path",
    "construction_path",
    type=click.Choice([p.value for p in ConstructionPath]),
    default=ConstructionPath.CLOSED_FORM.value,
    envvar=env("PATH"),
    show_default=True,
    help=f"Construction path (env: {env('PATH')})",
)
printed_option = click.option(
    "--printed-eq32",
    "printed_form",
    is_flag=True,
    envvar=env("PRINTED_EQ32"),
    help="Use the special circle equation with the -2mn*y coefficient (known to be wrong)",
)


def _build(
    scene_path: str, construction_path: str, printed_form: bool, logger: logging.Logger
) -> ConstructionOutput:
    """Closed form through the canonical frame, falling back to the geometric path where it has no parameters."""
    scene = load_scene(scene_path)
    path = ConstructionPath(construction_path)
    if path is ConstructionPath.CLOSED_FORM:
        try:
            return construct_in_frame(scene, path, printed_form)
        except NonCanonicalForClosedFormError as e:
            logger.warning(f"{e}; using the geometric path instead")
    return construct(scene, ConstructionPath.GEOMETRIC)


def _print_construction(output: ConstructionOutput) -> None:
    table = Table(title=f"Construction ({output.path.value}, {output.scene.backend.value})")
    table.add_column("Point", style="cyan")
    table.add_column("x", style="green")
    table.add_column("y", style="green")
    for name, point in output.named_points().items():
        table.add_row(name, str(encode_scalar(point.x)), str(encode_scalar(point.y)))
    console.print(table)

    for label, circle in (("Special circle", output.special_circle), ("Midpoint circle", output.midpoint_circle)):
        if circle is not None:
            console.print(
                f"{label}: center ({encode_scalar(circle.center.x)}, {encode_scalar(circle.center.y)}), "
                f"r² = {encode_scalar(circle.radius_squared)}"
            )
    if output.flags:
        console.print(f"⚠️  Flags: {', '.join(output.flags)}", style="yellow")


@cli.command("construct")
@scene_option
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True),
    envvar=env("OUT"),
    help=f"Write the construction JSON here instead of standard output (env: {env('OUT')})",
)
@path_option
@printed_option
@click.pass_context
def construct_command(ctx, scene_path: str, out: Optional[str], construction_path: str, printed_form: bool):
    """Construct U, V, W and the special circle for a scene."""
    logger = ctx.obj["logger"]
    json_output = ctx.obj["json_output"]

    try:
        output = _build(scene_path, construction_path, printed_form, logger)
    except (SceneError, GeometryError) as e:
        report_error(ctx, e.code, str(e))

    document = json.dumps(output_to_document(output), indent=2) + "\n"
    if out:
        try:
            with open(out, "w", encoding="utf-8") as f:
                f.write(document)
        except OSError as e:
            report_error(ctx, "IO_ERROR", f"Cannot write {out}: {e}")
        logger.info(f"Wrote construction to {out}")

    if json_output or not out:
        click.echo(document, nl=False)
    else:
        _print_construction(output)
        console.print(f"✅ Construction written to {out}", style="green")

    sys.exit(ExitCodes.DEGENERATE if output.degenerate else ExitCodes.SUCCESS)


def _print_report(report: Report) -> None:
    table = Table(title=f"Verification ({report.trials} trial(s), seed {report.seed})")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Passed", justify="right")
    table.add_column("Failed", justify="right")
    table.add_column("Residual", style="yellow")
    for record in report.checks:
        status = "[green]PASS[/green]" if record.ok else "[red]FAIL[/red]"
        table.add_row(record.name, status, str(record.passed), str(record.failed), record.residual or "exact")
    console.print(table)
    if report.passed:
        console.print(f"✅ {report.status}", style="bold green")
    else:
        console.print(f"❌ {report.status}: {len(report.failures())} check(s) failed", style="bold red")
        for record in report.failures():
            console.print(f"  - {record.name}: witness {json.dumps(record.witness)}")


@cli.command("verify")
@click.option(
    "--trials",
    type=click.IntRange(min=1),
    default=1000,
    show_default=True,
    envvar=env("TRIALS"),
    help=f"Number of random scenes (env: {env('TRIALS')})",
)
@click.option(
    "--seed", type=int, default=42, show_default=True, envvar=env("SEED"), help=f"Base seed (env: {env('SEED')})"
)
@click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, writable=True),
    envvar=env("REPORT"),
    help=f"Write the report JSON here (env: {env('REPORT')})",
)
@printed_option
@click.option(
    "--frame",
    type=click.Choice(["canonical", "arbitrary"]),
    default="canonical",
    show_default=True,
    envvar=env("FRAME"),
    help=f"Frame of the random scenes (env: {env('FRAME')})",
)
@click.option("--k-zero", is_flag=True, envvar=env("K_ZERO"), help="Put P at the circumcenter (P = Q = O)")
@click.option("--allow-origin", is_flag=True, envvar=env("ALLOW_ORIGIN"), help="Allow the generator D = O")
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    envvar=env("WORKERS"),
    help=f"Worker processes (env: {env('WORKERS')})",
)
@click.option("--timing", is_flag=True, help="Include elapsed time in the report")
@click.option(
    "--scene",
    "scene_path",
    type=click.Path(dir_okay=False),
    help="Verify this scene document (for example a failure witness) instead of random scenes",
)
@click.pass_context
def verify_command(
    ctx,
    trials: int,
    seed: int,
    report_path: Optional[str],
    printed_form: bool,
    frame: str,
    k_zero: bool,
    allow_origin: bool,
    workers: int,
    timing: bool,
    scene_path: Optional[str],
):
    """Check every invariant on seeded random scenes and write a report."""
    logger = ctx.obj["logger"]
    json_output = ctx.obj["json_output"]

    try:
        if scene_path:
            report = verify_scene(load_scene(scene_path), printed_form=printed_form)
        else:
            policy = ScenePolicy(frame=frame, k_zero=k_zero, allow_origin_generator=allow_origin)
            with Progress(
                SpinnerColumn(),
                TextColumn("[progress.description]{task.description}"),
                BarColumn(),
                console=err_console,
                disable=json_output or workers > 1,
            ) as progress:
                task = progress.add_task("Verifying scenes...", total=trials)
                report = verify_batch(
                    trials,
                    seed,
                    policy=policy,
                    printed_form=printed_form,
                    workers=workers,
                    progress=lambda done: progress.update(task, completed=done),
                )
    except (SceneError, GeometryError, PolicyUnsatisfiableError) as e:
        report_error(ctx, e.code, str(e))

    document = report.to_json(include_timing=timing)
    if report_path:
        try:
            with open(report_path, "w", encoding="utf-8") as f:
                f.write(document)
        except OSError as e:
            report_error(ctx, "IO_ERROR", f"Cannot write {report_path}: {e}")
        logger.info(f"Wrote report to {report_path}")

    if json_output:
        click.echo(document, nl=False)
    else:
        _print_report(report)

    sys.exit(ExitCodes.SUCCESS if report.passed else ExitCodes.ERROR)


@cli.command("figure")
@scene_option
@click.option(
    "--svg",
    "svg_path",
    required=True,
    type=click.Path(dir_okay=False, writable=True),
    envvar=env("SVG"),
    help=f"Output SVG file (env: {env('SVG')})",
)
@path_option
@click.option("--width", type=click.IntRange(min=1), default=constants.DEFAULT_CANVAS_WIDTH, show_default=True)
@click.option("--height", type=click.IntRange(min=1), default=constants.DEFAULT_CANVAS_HEIGHT, show_default=True)
@click.option("--labels/--no-labels", default=True, show_default=True)
@click.option("--special-circle/--no-special-circle", default=True, show_default=True)
@click.option("--midcircle/--no-midcircle", default=True, show_default=True)
@click.option("--hagge/--no-hagge", default=False, show_default=True, help="Overlay the classic Hagge circle")
@click.option("--diagonals/--no-diagonals", default=True, show_default=True)
@click.pass_context
def figure_command(
    ctx,
    scene_path: str,
    svg_path: str,
    construction_path: str,
    width: int,
    height: int,
    labels: bool,
    special_circle: bool,
    midcircle: bool,
    hagge: bool,
    diagonals: bool,
):
    """Draw the construction as a deterministic SVG figure."""
    logger = ctx.obj["logger"]
    json_output = ctx.obj["json_output"]
    options = FigureOptions(
        width=width,
        height=height,
        labels=labels,
        special_circle=special_circle,
        midpoint_circle=midcircle,
        hagge=hagge,
        diagonals=diagonals,
    )

    try:
        output = _build(scene_path, construction_path, False, logger)
        write_svg(output, svg_path, options)
    except (SceneError, GeometryError) as e:
        report_error(ctx, e.code, str(e))
    except OSError as e:
        report_error(ctx, "IO_ERROR", f"Cannot write {svg_path}: {e}")

    if json_output:
        click.echo(json.dumps({"status": "success", "svg": svg_path, "flags": list(output.flags)}))
    else:
        console.print(f"🖼️  Figure written to {svg_path}", style="green")
        if output.degenerate:
            console.print("⚠️  Degenerate scene: U, V, W collapse onto P", style="yellow")

    sys.exit(ExitCodes.DEGENERATE if output.degenerate else ExitCodes.SUCCESS)


if __name__ == "__main__":
    cli()
