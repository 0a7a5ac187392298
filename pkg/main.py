#!/usr/bin/env python3
"""
Spherical Interpolation Study - Main Orchestrator and CLI

Command-line entry point for the spherical interpolation library:

    eval         dense samples of an interpolant through a knot corpus
    validate     adjacency, sign-flip and degeneracy report for a corpus
    select       SENO stencil decisions per interval
    convergence  error / order table for a generating curve
    efficiency   time-versus-error records
    reproduce    run every enabled experiment module from config.yaml

Exit codes: 0 success, 2 parse error, 3 validation failure, 4 numerical failure.
"""

import functools
import logging
import subprocess
import sys
from datetime import datetime
from pathlib import Path

import click
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler

from modules.curve_io import read_knots, write_table
from modules.errors import (
    AmbiguousAntipode,
    DatasetFormatError,
    InterpolationError,
    NonUnitInput,
    UniformTimeRequired,
    WindowSize,
)
from modules.geodesic_interp import Method
from modules.harness import (
    GeneratingCurve,
    convergence_frame,
    convergence_study,
    doubling_range,
    efficiency_study,
    sample_curve,
    timing_frame,
)
from modules.interpolants import build_interpolant
from modules.seno import seno_selections
from modules.settings import load_settings, with_overrides
from modules.sider import prepare_knots, validate_knots

logger = logging.getLogger(__name__)

METHODS = [m.value for m in Method]
VALIDATION_ERRORS = (AmbiguousAntipode, UniformTimeRequired, NonUnitInput, WindowSize)


class InterpolationStudyOrchestrator:
    """Runs the numbered experiment modules listed in config.yaml."""

    def __init__(self, config_file: str = "config.yaml"):
        self.base_dir = Path(__file__).parent
        self.config_file = self.base_dir / config_file
        self.settings = load_settings(self.config_file)
        self.timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")

    def enabled_modules(self):
        modules = self.settings.modules.items()
        enabled = [(name, info) for name, info in modules if info.get("enabled", True)]
        return sorted(enabled, key=lambda item: item[1].get("priority", 0))

    def execute_module(self, module_id: str, module_info: dict) -> dict:
        """Run one experiment module's main file in its own directory."""
        module_path = self.base_dir / module_info.get("path", module_id)
        main_file = module_path / module_info.get("main_file", "main.py")
        if not main_file.exists():
            print(f"❌ Module {module_id}: {main_file} not found")
            return {"success": False, "error": "main file not found", "module_id": module_id}

        print(f"🚀 Executing module {module_id}: {module_info.get('description', '')}")
        (module_path / "output").mkdir(exist_ok=True)
        result = subprocess.run(
            [sys.executable, main_file.name],
            capture_output=True,
            text=True,
            cwd=str(module_path),
        )
        if result.returncode != 0:
            print(f"❌ Module {module_id} failed (exit {result.returncode})")
            return {"success": False, "error": result.stderr, "module_id": module_id}

        outputs = sorted((module_path / "output").glob(module_info.get("output_pattern", "*")))
        print(f"✅ Module {module_id} completed ({len(outputs)} output files)")
        return {"success": True, "output": result.stdout, "files": outputs, "module_id": module_id}

    def run(self) -> bool:
        print(f"📊 Spherical interpolation study run {self.timestamp}")
        results = [self.execute_module(name, info) for name, info in self.enabled_modules()]
        failed = [r["module_id"] for r in results if not r["success"]]
        if failed:
            print(f"⚠️ {len(failed)} module(s) failed: {failed}")
            return False
        print(f"✅ All {len(results)} modules completed")
        return True


def _configure_logging(verbosity: int):
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
    )


def exit_codes(command):
    """Map library failures onto the CLI exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except DatasetFormatError as exc:
            click.echo(f"❌ parse error: {exc}", err=True)
            sys.exit(2)
        except VALIDATION_ERRORS as exc:
            click.echo(f"❌ validation failed: {exc}", err=True)
            sys.exit(3)
        except (InterpolationError, FloatingPointError) as exc:
            click.echo(f"❌ numerical failure: {exc}", err=True)
            sys.exit(4)

    return wrapper


def _load_corpus(path, settings):
    knots = read_knots(path, settings.numerics.input_normalize_tolerance)
    report = validate_knots(knots)
    for message in report.warnings:
        click.echo(f"⚠️ {message}", err=True)
    return prepare_knots(knots)


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Alternative YAML configuration file.")
@click.option("-v", "--verbose", count=True, help="Increase log verbosity (-v info, -vv debug).")
@click.option("--quiet", is_flag=True, help="Disable progress bars.")
@click.pass_context
def cli(ctx, config_path, verbose, quiet):
    """Spherical interpolation: SLERP, SQUAD, SIDER-n and SENO-n on the unit sphere."""
    _configure_logging(verbose)
    ctx.obj = {"settings": load_settings(config_path), "progress": not quiet and sys.stderr.isatty()}


@cli.command("eval")
@click.argument("input_file", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), default="seno3", show_default=True)
@click.option("--density", type=click.IntRange(min=1), default=200, show_default=True)
@click.option("--k", type=click.IntRange(min=1), default=None, help="SENO quadrature points.")
@click.option("--derivatives", is_flag=True, help="Add fd velocity channels dx, dy, dz.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.pass_context
@exit_codes
def eval_command(ctx, input_file, method, density, k, derivatives, out, fmt):
    """Write dense samples of an interpolant through INPUT_FILE."""
    settings = ctx.obj["settings"]
    knots = _load_corpus(input_file, settings)
    curve = build_interpolant(method, knots, k or settings.harness.seno_k, settings.numerics.max_sider_order)
    frame = sample_curve(curve, density, derivatives=derivatives, h=settings.derivatives.fd_step)
    write_table(frame, out, fmt, settings.harness.float_digits)


@cli.command("validate")
@click.argument("input_file", type=click.Path(dir_okay=False))
@click.pass_context
@exit_codes
def validate_command(ctx, input_file):
    """Report adjacency angles, sign flips and degeneracies of INPUT_FILE."""
    report = validate_knots(read_knots(input_file, ctx.obj["settings"].numerics.input_normalize_tolerance))
    for pair in report.pairs:
        flag = " flipped" if pair.flipped else ""
        flag += " AMBIGUOUS" if pair.ambiguous else ""
        click.echo(f"pair {pair.index}: angle {pair.angle:.17g}{flag}")
    for message in report.warnings:
        click.echo(f"⚠️ {message}")
    report.raise_if_fatal()
    click.echo("✅ knots valid")


@cli.command("select")
@click.argument("input_file", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(["seno2", "seno3"]), default="seno3", show_default=True)
@click.option("--k", type=click.IntRange(min=1), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@click.pass_context
@exit_codes
def select_command(ctx, input_file, method, k, out, fmt):
    """Print the SENO stencil chosen for every interval of INPUT_FILE."""
    settings = ctx.obj["settings"]
    knots = _load_corpus(input_file, settings)
    selections = seno_selections(knots, Method(method).order, k or settings.harness.seno_k)
    rows = [
        {"interval": s.interval, "candidate_start": start, "variation": length, "selected": start == s.start_index}
        for s in selections
        for start, length in sorted(s.variations.items())
    ]
    write_table(pd.DataFrame(rows), out, fmt, settings.harness.float_digits)


def _study_options(command):
    options = [
        click.option("--curve", type=click.Choice(["smooth", "kinked"]), default="smooth", show_default=True),
        click.option("--method", "methods", type=click.Choice(METHODS), multiple=True,
                     help="Repeatable; defaults to the configured methods."),
        click.option("--sigma", type=float, default=None),
        click.option("--inv-dt-min", type=click.IntRange(min=2), default=None),
        click.option("--inv-dt-max", type=click.IntRange(min=2), default=None),
        click.option("--samples", "samples_per_interval", type=click.IntRange(min=1), default=None,
                     help="Error samples per knot interval."),
        click.option("--k", "seno_k", type=click.IntRange(min=1), default=None),
        click.option("--out", type=click.Path(dir_okay=False), default=None),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@cli.command("convergence")
@_study_options
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.pass_context
@exit_codes
def convergence_command(ctx, curve, methods, out, fmt, **overrides):
    """Errors and convergence orders under grid doubling."""
    harness = with_overrides(ctx.obj["settings"], methods=methods or None, **overrides).harness
    rows = convergence_study(
        GeneratingCurve(curve, harness.sigma),
        harness.methods,
        doubling_range(harness.inv_dt_min, harness.inv_dt_max),
        harness.samples_per_interval,
        harness.seno_k,
        harness.workers,
        ctx.obj["progress"],
    )
    write_table(convergence_frame(rows), out, fmt, harness.float_digits)


@cli.command("efficiency")
@_study_options
@click.option("--reps", type=click.IntRange(min=3), default=None)
@click.pass_context
@exit_codes
def efficiency_command(ctx, curve, methods, out, fmt, **overrides):
    """Median wall time versus error for each method and grid."""
    harness = with_overrides(ctx.obj["settings"], methods=methods or None, **overrides).harness
    records = efficiency_study(
        GeneratingCurve(curve, harness.sigma),
        harness.methods,
        doubling_range(harness.inv_dt_min, harness.inv_dt_max),
        harness.reps,
        harness.samples_per_interval,
        harness.seno_k,
        ctx.obj["progress"],
    )
    write_table(timing_frame(records), out, fmt, harness.float_digits)


@cli.command("reproduce")
def reproduce_command():
    """Run every enabled experiment module from config.yaml."""
    orchestrator = InterpolationStudyOrchestrator()
    sys.exit(0 if orchestrator.run() else 1)


def main():
    cli(prog_name="main.py")


if __name__ == "__main__":
    main()
