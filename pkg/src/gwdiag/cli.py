"""Command-line front end.

Subcommands: ``global`` (whole-dataset diagnostics + Moran's I), ``gw``
(diagnostic surfaces with optional permutation tests), ``sweep`` (one
diagnostic over a ladder of adaptive bandwidth fractions) and ``synth``
(seeded synthetic sample generator).

Exit codes: 0 success, 1 domain or data error, 2 usage error. Commands
compute everything before writing, so a nonzero exit leaves no output files
behind. With a fixed ``--seed`` every output is byte-identical across runs
and across ``--threads`` settings.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import __version__
from .diagnostics import (
    DEFAULT_SWEEP_FRACTIONS,
    bandwidth_sweep,
    evaluate_surfaces,
    global_diagnostics,
)
from .errors import GwdiagError
from .inference import TAILS, PermutationConfig, local_permutation_test, morans_i_test
from .io import read_samples, write_grid_values, write_reports, write_samples, write_surface
from .model import ALL_KINDS, DiagnosticKind, EvaluationGrid, KernelSpec, SampleSet
from .spatial import SpatialIndex
from .synth import DEFAULT_SYNTH_N, generate_samples

_BANDWIDTH_HELP = "Kernel bandwidth: 'adaptive:0.10' (fraction or neighbor count) or 'fixed:2000'."


def _threads_option(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("GWDIAG_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise click.UsageError(f"GWDIAG_THREADS must be an integer, got {env!r}")
    return 1


def _load_samples(path: str) -> SampleSet:
    try:
        with open(path, "rb") as fh:
            return read_samples(fh)
    except OSError as exc:
        raise GwdiagError(f"cannot read input file '{path}': {exc.strerror or exc}") from exc


def _parse_kinds(text: Optional[str]) -> tuple[DiagnosticKind, ...]:
    if not text:
        return ALL_KINDS
    return tuple(DiagnosticKind.coerce(part.strip()) for part in text.split(",") if part.strip())


def _parse_fractions(text: Optional[str]) -> tuple[float, ...]:
    if not text:
        return DEFAULT_SWEEP_FRACTIONS
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise click.UsageError(f"--fractions must be a comma-separated list of numbers, got {text!r}")


def _resolve_grid(samples: SampleSet, bbox: Optional[str], cellsize: Optional[float]) -> EvaluationGrid:
    if bbox is None and cellsize is None:
        return EvaluationGrid.cover_samples(samples)
    if bbox is None or cellsize is None:
        raise click.UsageError("--bbox and --cellsize must be given together")
    parts = bbox.split(",")
    if len(parts) != 4:
        raise click.UsageError("--bbox must be 'xmin,ymin,xmax,ymax'")
    try:
        x0, y0, x1, y1 = (float(p) for p in parts)
    except ValueError:
        raise click.UsageError(f"--bbox holds a non-numeric value: {bbox!r}")
    return EvaluationGrid.from_bbox(x0, y0, x1, y1, cellsize)


def _surface_summary(kind: DiagnosticKind, values: np.ndarray) -> str:
    finite = values[~np.isnan(values)]
    missing = values.size - finite.size
    if finite.size == 0:
        return f"{kind.value}: min=NA max=NA missing={missing}"
    return f"{kind.value}: min={finite.min():.6g} max={finite.max():.6g} missing={missing}"


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group()
@click.version_option(version=__version__, prog_name="gwdiag")
def main() -> None:
    """Geographically weighted error diagnostics for point-sampled predictions."""


@main.command("global")
@click.option("-i", "--input", "input_path", required=True, help="Sample CSV (id,x,y,predicted,reference).")
@click.option("-o", "--output-dir", required=True, help="Directory for the report file.")
@click.option("--permutations", default=999, show_default=True, help="Permutations for the Moran's I test.")
@click.option("--seed", default=0, show_default=True, help="RNG seed.")
@click.option("--tail", default="two_sided", show_default=True, type=click.Choice(TAILS))
@click.option("--row-standardize", is_flag=True, help="Row-standardize the inverse-distance-squared weights.")
def cmd_global(input_path: str, output_dir: str, permutations: int, seed: int,
               tail: str, row_standardize: bool) -> None:
    """Whole-dataset msd/mae/rmse/r plus Moran's I of the deviations."""
    try:
        samples = _load_samples(input_path)
        report = global_diagnostics(samples)
        cfg = PermutationConfig(n_permutations=permutations, seed=seed, tail=tail)
        moran = morans_i_test(samples, cfg, row_standardize=row_standardize)
    except GwdiagError as exc:
        _fail(exc)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "global_report.txt"
    with open(path, "wb") as fh:
        write_reports(report, moran, fh)
    click.echo(f"wrote {path}")


@main.command("gw")
@click.option("-i", "--input", "input_path", required=True, help="Sample CSV (id,x,y,predicted,reference).")
@click.option("-o", "--output-dir", required=True, help="Directory for .asc surfaces.")
@click.option("--kinds", default=None, help="Comma-separated diagnostics (default: all four).")
@click.option("--kernel", default="bisquare", show_default=True, help="Kernel family.")
@click.option("--bandwidth", default="adaptive:0.10", show_default=True, help=_BANDWIDTH_HELP)
@click.option("--bbox", default=None, help="Grid extent 'xmin,ymin,xmax,ymax' (default: padded sample bbox).")
@click.option("--cellsize", default=None, type=float, help="Grid cell size (required with --bbox).")
@click.option("--permutations", default=999, show_default=True,
              help="Permutation count for significance surfaces; 0 disables testing.")
@click.option("--alpha", default=0.01, show_default=True, help="Significance level for the masks.")
@click.option("--tail", default="two_sided", show_default=True, type=click.Choice(TAILS))
@click.option("--seed", default=0, show_default=True, help="RNG seed.")
@click.option("--min-r-points", default=3, show_default=True,
              help="Minimum positive-weight points for a local correlation.")
@click.option("--threads", default=None, type=int,
              help="Worker threads (default: GWDIAG_THREADS or 1); outputs do not depend on it.")
def cmd_gw(input_path: str, output_dir: str, kinds: Optional[str], kernel: str, bandwidth: str,
           bbox: Optional[str], cellsize: Optional[float], permutations: int, alpha: float,
           tail: str, seed: int, min_r_points: int, threads: Optional[int]) -> None:
    """Map GW diagnostic surfaces, optionally with permutation p-values and masks."""
    n_jobs = _threads_option(threads)
    try:
        samples = _load_samples(input_path)
        kind_list = _parse_kinds(kinds)
        spec = KernelSpec.parse(bandwidth)
        if kernel != spec.family:
            raise GwdiagError(f"unknown kernel family '{kernel}'")
        grid = _resolve_grid(samples, bbox, cellsize)
        index = SpatialIndex.for_samples(samples)
        surfaces = evaluate_surfaces(samples, grid, spec, kinds=kind_list,
                                     min_r_points=min_r_points, n_jobs=n_jobs, index=index)
        reports = {}
        if permutations > 0:
            cfg = PermutationConfig(n_permutations=permutations, seed=seed, alpha=alpha, tail=tail)
            for kind in kind_list:
                reports[kind] = local_permutation_test(
                    samples, grid, spec, kind, cfg,
                    min_r_points=min_r_points, n_jobs=n_jobs, index=index)
    except GwdiagError as exc:
        _fail(exc)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for surface in surfaces:
        name = surface.kind.value
        with open(out / f"{name}.asc", "wb") as fh:
            write_surface(surface, fh)
        if surface.kind in reports:
            rep = reports[surface.kind]
            with open(out / f"{name}_p.asc", "wb") as fh:
                write_grid_values(grid, rep.p_values, fh)
            with open(out / f"{name}_sig.asc", "wb") as fh:
                write_grid_values(grid, rep.significant.astype(np.float64), fh)
        click.echo(_surface_summary(surface.kind, surface.values))


@main.command("sweep")
@click.option("-i", "--input", "input_path", required=True, help="Sample CSV (id,x,y,predicted,reference).")
@click.option("-o", "--output-dir", required=True, help="Directory for .asc surfaces.")
@click.option("--kind", default="gw_mae", show_default=True, help="Diagnostic to sweep.")
@click.option("--fractions", default=None,
              help="Comma-separated adaptive fractions (default: 0.05..0.50 in 0.05 steps).")
@click.option("--bbox", default=None, help="Grid extent 'xmin,ymin,xmax,ymax' (default: padded sample bbox).")
@click.option("--cellsize", default=None, type=float, help="Grid cell size (required with --bbox).")
@click.option("--min-r-points", default=3, show_default=True)
@click.option("--threads", default=None, type=int,
              help="Worker threads (default: GWDIAG_THREADS or 1); outputs do not depend on it.")
def cmd_sweep(input_path: str, output_dir: str, kind: str, fractions: Optional[str],
              bbox: Optional[str], cellsize: Optional[float], min_r_points: int,
              threads: Optional[int]) -> None:
    """One diagnostic surface per adaptive bandwidth fraction, plus a summary table."""
    n_jobs = _threads_option(threads)
    try:
        samples = _load_samples(input_path)
        kind_enum = DiagnosticKind.coerce(kind)
        fracs = _parse_fractions(fractions)
        grid = _resolve_grid(samples, bbox, cellsize)
        results = bandwidth_sweep(samples, grid, kind_enum, fracs,
                                  min_r_points=min_r_points, n_jobs=n_jobs)
    except GwdiagError as exc:
        _fail(exc)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_lines = ["fraction mean sd"]
    for fraction, surface in results:
        percent = int(round(fraction * 100))
        with open(out / f"{kind_enum.value}_f{percent:02d}.asc", "wb") as fh:
            write_surface(surface, fh)
        finite = surface.values[~np.isnan(surface.values)]
        mean = "NA" if finite.size == 0 else "%.10g" % finite.mean()
        sd = "NA" if finite.size == 0 else "%.10g" % finite.std()
        summary_lines.append(f"{fraction:g} {mean} {sd}")
    summary = "\n".join(summary_lines) + "\n"
    with open(out / f"{kind_enum.value}_sweep_summary.txt", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(summary)
    click.echo(summary, nl=False)


@main.command("synth")
@click.option("-o", "--output", "output_path", required=True, help="Destination CSV path.")
@click.option("--scenario", default="null", show_default=True,
              help="One of: null, cluster, bias.")
@click.option("--n", default=DEFAULT_SYNTH_N, show_default=True, help="Number of sample points.")
@click.option("--seed", default=0, show_default=True, help="RNG seed.")
def cmd_synth(output_path: str, scenario: str, n: int, seed: int) -> None:
    """Write a synthetic sample CSV for demos and calibration runs."""
    try:
        samples = generate_samples(scenario, n=n, seed=seed)
    except GwdiagError as exc:
        _fail(exc)
    parent = Path(output_path).parent
    if str(parent):
        parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "wb") as fh:
        write_samples(samples, fh)
    click.echo(f"wrote {output_path} ({samples.n} points, scenario {scenario})")


if __name__ == "__main__":
    main()
