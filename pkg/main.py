#!/usr/bin/env python3
"""
Complex plane wave verification engine: CLI entry point.

Usage examples:
  python main.py verify                                   # bundled spec, all suites
  python main.py verify --spec defaults/specs/singular_n1.cfg --suite metric
  python main.py verify --spec defaults/specs/broken_cr.cfg   # exits 1, Cauchy-Riemann fails
  python main.py geodesic --out output/run1
  python main.py holonomy --spec defaults/specs/singular_n2.cfg
  python main.py liealg --mutate z1,w2,z2                 # flipped bracket, Jacobi fails
  python main.py wave --spec defaults/specs/wave_ssi.cfg
  python main.py quaternion --p 1 --q 1
  python main.py plotdata --report output/verify_report.json
  python main.py specs

Exit status: 0 when every check passes, 1 when a check fails, 2 on a bad
spec, a missing file or a bad option.
"""
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from config import DEFAULT_SPECS_DIR, Config
from engine.errors import NonIsotropicXi, SpecError
from models.report import ReportDoc
from pipeline.processor import VERIFY_SUITES, SuiteProcessor
from pipeline.spec_io import load_spec


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s  %(levelname)-8s  %(name)s — %(message)s",
        datefmt="%H:%M:%S",
    )


def _config(
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    out: Optional[str] = None,
) -> Config:
    config = Config().apply(samples=samples, seed=seed, tol=tol, output_dir=out)
    config.ensure_output_dir()
    return config


def _finish(doc: ReportDoc) -> None:
    """Echo the summary and exit with the run's status."""
    click.echo(f"\n=== {doc.command}: {doc.check_count} checks ===\n")
    for suite in doc.suites:
        for check in suite.checks:
            mark = {"pass": "✓", "fail": "✗", "skipped": "-"}[check.status]
            note = " (diagnostic)" if check.diagnostic else ""
            residual = "" if check.max_residual is None else f"  residual={check.max_residual:.3e}"
            click.echo(f"  {mark} {suite.name}.{check.name}{residual}{note}")
    click.echo(f"\n  Failed: {doc.failure_count}   Skipped: {doc.skipped_count}")
    if doc.failures:
        click.echo("  Failures:")
        for name in doc.failures:
            click.echo(f"    {name}")
        sys.exit(1)


def _abort(exc: Exception) -> None:
    click.echo(f"Error: {exc}", err=True)
    sys.exit(2)


spec_option = click.option("--spec", "spec_path", default=None, type=click.Path(), help="Spec file (key = value)")
samples_option = click.option("--samples", type=int, default=None, help="Random sample points")
seed_option = click.option("--seed", type=int, default=None, help="Seed for the sample points")
tol_option = click.option("--tol", type=float, default=None, help="Integrator and formula tolerance")
out_option = click.option("--out", default=None, type=click.Path(), help="Output directory")


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """Verification and simulation engine for complex plane wave metrics."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    _setup_logging(verbose)


# --------------------------------------------------------------------
# verify command
# --------------------------------------------------------------------

@cli.command()
@spec_option
@click.option("--suite", type=click.Choice(VERIFY_SUITES), default=None, help="Run a single suite")
@samples_option
@seed_option
@tol_option
@out_option
@click.pass_context
def verify(ctx: click.Context, spec_path, suite, samples, seed, tol, out) -> None:
    """Metric, Kähler, Ambrose-Singer, VSI, Osserman and Walker suites."""
    processor = SuiteProcessor(_config(samples, seed, tol, out))
    try:
        doc = processor.verify(spec_path, suite)
    except SpecError as exc:
        _abort(exc)
    _finish(doc)


# --------------------------------------------------------------------
# geodesic / holonomy commands
# --------------------------------------------------------------------

@cli.command()
@spec_option
@tol_option
@out_option
@click.pass_context
def geodesic(ctx: click.Context, spec_path, tol, out) -> None:
    """Integrate the incomplete geodesics and the parallel frame along them."""
    processor = SuiteProcessor(_config(tol=tol, out=out))
    try:
        doc = processor.geodesic(spec_path)
    except SpecError as exc:
        _abort(exc)
    _finish(doc)


@cli.command()
@spec_option
@samples_option
@seed_option
@out_option
@click.pass_context
def holonomy(ctx: click.Context, spec_path, samples, seed, out) -> None:
    """Infinitesimal holonomy and its su(1,1) normal form."""
    processor = SuiteProcessor(_config(samples, seed, out=out))
    try:
        doc = processor.holonomy(spec_path)
    except SpecError as exc:
        _abort(exc)
    _finish(doc)


# --------------------------------------------------------------------
# liealg command
# --------------------------------------------------------------------

@cli.command()
@spec_option
@click.option("--mutate", default=None, help="Flip one structure constant: i,j,k (labels like z1,w2,z2)")
@seed_option
@tol_option
@out_option
@click.pass_context
def liealg(ctx: click.Context, spec_path, mutate, seed, tol, out) -> None:
    """Transvection algebra, its structure and the K geodesics."""
    labels = None
    if mutate:
        labels = [x.strip() for x in mutate.split(",")]
        if len(labels) != 3:
            _abort(SpecError("--mutate takes three labels i,j,k"))
    processor = SuiteProcessor(_config(seed=seed, tol=tol, out=out))
    try:
        doc = processor.liealg(spec_path, labels)
    except (SpecError, ValueError, KeyError) as exc:
        _abort(exc)
    _finish(doc)


# --------------------------------------------------------------------
# wave / quaternion commands
# --------------------------------------------------------------------

@cli.command()
@spec_option
@samples_option
@seed_option
@tol_option
@out_option
@click.pass_context
def wave(ctx: click.Context, spec_path, samples, seed, tol, out) -> None:
    """Lorentzian plane wave: Killing fields, curvature and homogeneity."""
    if spec_path is None:
        spec_path = str(DEFAULT_SPECS_DIR / "wave_cw.cfg")
    processor = SuiteProcessor(_config(samples, seed, tol, out))
    try:
        doc = processor.wave(spec_path)
    except SpecError as exc:
        _abort(exc)
    _finish(doc)


@cli.command()
@click.option("--p", "p", type=int, default=1, show_default=True, help="Positive quaternionic dimension")
@click.option("--q", "q", type=int, default=1, show_default=True, help="Negative quaternionic dimension")
@click.option("--xi", default=None, help="Isotropic vector as comma-separated integers")
@seed_option
@out_option
@click.pass_context
def quaternion(ctx: click.Context, p, q, xi, seed, out) -> None:
    """Flatness argument on the flat quaternionic model."""
    vector = None
    if xi:
        try:
            vector = [int(x) for x in xi.split(",")]
        except ValueError as exc:
            _abort(SpecError(f"--xi: {exc}"))
    processor = SuiteProcessor(_config(seed=seed, out=out))
    try:
        doc = processor.quaternion(p, q, vector)
    except (NonIsotropicXi, ValueError) as exc:
        _abort(exc)
    _finish(doc)


# --------------------------------------------------------------------
# plotdata / specs commands
# --------------------------------------------------------------------

@cli.command()
@spec_option
@click.option("--report", "report_path", default=None, type=click.Path(), help="Report JSON whose spec to use")
@tol_option
@out_option
@click.pass_context
def plotdata(ctx: click.Context, spec_path, report_path, tol, out) -> None:
    """Write frame_curvature.csv and geodesic_trace.csv."""
    processor = SuiteProcessor(_config(tol=tol, out=out))
    try:
        paths = processor.plotdata(spec_path, report_path)
    except SpecError as exc:
        _abort(exc)
    for path in paths:
        click.echo(f"  ✓ {path}")


@cli.command()
@click.pass_context
def specs(ctx: click.Context) -> None:
    """List the bundled spec files."""
    click.echo(f"\n=== Bundled specs ({DEFAULT_SPECS_DIR}) ===\n")
    for path in sorted(Path(DEFAULT_SPECS_DIR).glob("*.cfg")):
        try:
            spec = load_spec(path)
        except SpecError as exc:
            click.echo(f"  ✗ {path.name}: {exc}")
            continue
        kind = spec.profile.kind if hasattr(spec.profile, "kind") else spec.profile.variant
        click.echo(f"  {path.name:<22} n={spec.n}  {kind}")


if __name__ == "__main__":
    cli(obj={})
