"""Sample ingestion, ESRI ASCII grid output and report serialization.

File formats
------------
Samples: delimited text (comma by default) with a mandatory header naming the
columns ``id, x, y, predicted, reference`` in any order (case-insensitive);
extra columns are ignored.

Surfaces: ESRI ASCII grid with the header keys ``ncols, nrows, xllcorner,
yllcorner, cellsize, NODATA_value`` in that order, NODATA fixed at -9999, data
rows written north to south. Values use up to 17 significant digits, which
round-trips 64-bit floats exactly; writers are deterministic byte for byte.

Reports: one ``key value`` pair per line with 10 significant digits; missing
scalars render as the literal token ``NA``.
"""

from __future__ import annotations

import io as _io
import math
from dataclasses import dataclass
from typing import BinaryIO, Union

import numpy as np

from .diagnostics import GlobalReport
from .errors import (
    DuplicateIdError,
    InvalidConfigError,
    MissingColumnError,
    NonFiniteError,
    ParseError,
)
from .inference import MoranReport
from .model import DiagnosticKind, DiagnosticSurface, EvaluationGrid, KernelSpec, SamplePoint, SampleSet, validate_sample_set

__all__ = [
    "SampleFileFormat",
    "NODATA_VALUE",
    "read_samples",
    "write_samples",
    "write_surface",
    "read_surface",
    "write_grid_values",
    "write_reports",
]

NODATA_VALUE = -9999.0

_REQUIRED_COLUMNS = ("id", "x", "y", "predicted", "reference")

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "NODATA_value")

# Paths and binary streams are both accepted everywhere a Source appears.
Source = Union[str, BinaryIO]


@dataclass(frozen=True)
class SampleFileFormat:
    """Delimited-text layout for sample files."""

    delimiter: str = ","

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise InvalidConfigError(f"delimiter must be a single character, got {self.delimiter!r}")


def _as_text_reader(source):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        return open(source, "r", encoding="utf-8", newline=""), True
    return _io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def _as_text_writer(sink):
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        return open(sink, "w", encoding="utf-8", newline="\n"), True
    return _io.TextIOWrapper(sink, encoding="utf-8", newline="\n"), False


def _finish_text(stream, owned: bool) -> None:
    if owned:
        stream.close()
    else:
        stream.flush()
        stream.detach()


def _float_token(value: float) -> str:
    return "%.17g" % value


def read_samples(source: Source, fmt: SampleFileFormat = SampleFileFormat()) -> SampleSet:
    """Parse and validate a delimited sample file.

    Raises MissingColumnError, ParseError (with 1-based physical line
    numbers) and the core validation errors (NonFiniteError, DuplicateIdError,
    TooFewPointsError) with line context where applicable.
    """
    stream, owned = _as_text_reader(source)
    try:
        header_line = stream.readline()
        if not header_line:
            raise MissingColumnError("id")
        header = [h.strip().lower() for h in header_line.rstrip("\r\n").split(fmt.delimiter)]
        positions: dict[str, int] = {}
        for name in _REQUIRED_COLUMNS:
            if name not in header:
                raise MissingColumnError(name)
            positions[name] = header.index(name)
        points: list[SamplePoint] = []
        seen: dict[str, int] = {}
        for line_no, line in enumerate(stream, start=2):
            raw = line.rstrip("\r\n")
            if not raw.strip():
                continue
            cells = raw.split(fmt.delimiter)
            if len(cells) < len(header):
                raise ParseError(line_no, "row", raw)
            pid = cells[positions["id"]].strip()
            numeric: dict[str, float] = {}
            for name in ("x", "y", "predicted", "reference"):
                token = cells[positions[name]].strip()
                try:
                    numeric[name] = float(token)
                except ValueError:
                    raise ParseError(line_no, name, token) from None
                if not math.isfinite(numeric[name]):
                    raise NonFiniteError(pid, name, line=line_no)
            if pid in seen:
                raise DuplicateIdError(pid, line=line_no)
            seen[pid] = line_no
            points.append(SamplePoint(pid, numeric["x"], numeric["y"],
                                      numeric["predicted"], numeric["reference"]))
        return validate_sample_set(points)
    finally:
        _finish_text(stream, owned)


def write_samples(samples: SampleSet, sink: Source, fmt: SampleFileFormat = SampleFileFormat()) -> None:
    """Write a sample set back to delimited text (column order id,x,y,predicted,reference)."""
    stream, owned = _as_text_writer(sink)
    try:
        d = fmt.delimiter
        stream.write(d.join(_REQUIRED_COLUMNS) + "\n")
        for p in samples.points:
            stream.write(d.join((p.id, repr(p.x), repr(p.y), repr(p.predicted), repr(p.reference))) + "\n")
    finally:
        _finish_text(stream, owned)


def write_grid_values(grid: EvaluationGrid, values: np.ndarray, sink: Source) -> None:
    """Write one (n_rows, n_cols) array as an ESRI ASCII grid.

    Row 0 of ``values`` is the southernmost row, so rows are emitted in
    reverse; NaN cells serialize as -9999.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (grid.n_rows, grid.n_cols):
        raise InvalidConfigError(f"values shape {values.shape} does not match grid")
    stream, owned = _as_text_writer(sink)
    try:
        stream.write(f"{'ncols':<14}{grid.n_cols}\n")
        stream.write(f"{'nrows':<14}{grid.n_rows}\n")
        stream.write(f"{'xllcorner':<14}{_float_token(grid.x_min)}\n")
        stream.write(f"{'yllcorner':<14}{_float_token(grid.y_min)}\n")
        stream.write(f"{'cellsize':<14}{_float_token(grid.cell_size)}\n")
        stream.write(f"{'NODATA_value':<14}{_float_token(NODATA_VALUE)}\n")
        for r in range(grid.n_rows - 1, -1, -1):
            row = values[r]
            tokens = ["-9999" if math.isnan(v) else _float_token(v) for v in row]
            stream.write(" ".join(tokens) + "\n")
    finally:
        _finish_text(stream, owned)


def write_surface(surface: DiagnosticSurface, sink: Source) -> None:
    """Serialize a diagnostic surface as an ESRI ASCII grid."""
    write_grid_values(surface.grid, surface.values, sink)


def read_surface(source: Source, kind: DiagnosticKind | str | None = None,
                 kernel: KernelSpec | None = None):
    """Read an ESRI ASCII grid back.

    Returns ``(grid, values)`` with NaN where the file holds the NODATA value;
    pass ``kind`` (and optionally ``kernel``) to get a DiagnosticSurface
    instead.
    """
    stream, owned = _as_text_reader(source)
    try:
        header: dict[str, float] = {}
        for expected in _HEADER_KEYS:
            line = stream.readline()
            parts = line.split()
            if len(parts) != 2 or parts[0].lower() != expected.lower():
                raise ParseError(len(header) + 1, expected, line.rstrip("\r\n"))
            header[expected] = float(parts[1])
        n_cols = int(header["ncols"])
        n_rows = int(header["nrows"])
        nodata = header["NODATA_value"]
        grid = EvaluationGrid(header["xllcorner"], header["yllcorner"],
                              header["cellsize"], n_cols, n_rows)
        values = np.empty((n_rows, n_cols), dtype=np.float64)
        for file_row in range(n_rows):
            line = stream.readline()
            tokens = line.split()
            if len(tokens) != n_cols:
                raise ParseError(len(_HEADER_KEYS) + file_row + 1, "row", line.rstrip("\r\n"))
            row = np.array([float(t) for t in tokens])
            row[row == nodata] = np.nan
            values[n_rows - 1 - file_row] = row
        values.flags.writeable = False
    finally:
        _finish_text(stream, owned)
    if kind is None:
        return grid, values
    kernel = kernel if kernel is not None else KernelSpec.adaptive_fraction(0.1)
    return DiagnosticSurface(grid=grid, kind=DiagnosticKind.coerce(kind), values=values, kernel=kernel)


def _scalar_token(value: float) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "NA"
    return "%.10g" % value


def write_reports(global_report: GlobalReport, moran: MoranReport, sink: Source) -> None:
    """Write the global diagnostics and Moran's I as a key-value document.

    Field order is fixed: msd, mae, rmse, r, moran_i, moran_p, n, seed,
    n_permutations.
    """
    stream, owned = _as_text_writer(sink)
    try:
        stream.write(f"msd {_scalar_token(global_report.msd)}\n")
        stream.write(f"mae {_scalar_token(global_report.mae)}\n")
        stream.write(f"rmse {_scalar_token(global_report.rmse)}\n")
        stream.write(f"r {_scalar_token(global_report.r)}\n")
        stream.write(f"moran_i {_scalar_token(moran.i_value)}\n")
        stream.write(f"moran_p {_scalar_token(moran.p_value)}\n")
        stream.write(f"n {global_report.n}\n")
        stream.write(f"seed {moran.seed}\n")
        stream.write(f"n_permutations {moran.n_permutations}\n")
    finally:
        _finish_text(stream, owned)
