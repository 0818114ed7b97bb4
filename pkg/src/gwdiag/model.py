"""Core domain types: sample points, kernel specifications, evaluation grids, surfaces.

All types here are immutable after construction and safe to share across
threads. NaN is the in-memory missing-value marker for surface cells and
optional scalar statistics; file-format sentinels exist only in :mod:`gwdiag.io`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Union

import numpy as np

from .errors import (
    DuplicateIdError,
    GridTooLargeError,
    InvalidConfigError,
    NonFiniteError,
    NonPositiveBandwidthError,
    TooFewPointsError,
    WrongBandwidthKindError,
)

__all__ = [
    "SamplePoint",
    "SampleSet",
    "validate_sample_set",
    "FixedBandwidth",
    "AdaptiveFraction",
    "AdaptiveCount",
    "Bandwidth",
    "KernelSpec",
    "resolve_bandwidth_count",
    "DiagnosticKind",
    "EvaluationGrid",
    "DiagnosticSurface",
]

# Guard for ceil(fraction * n): absorbs the binary representation error of
# decimal fractions (0.10 * 550 evaluates to 55.000000000000007).
_CEIL_GUARD = 1e-9


@dataclass(frozen=True)
class SamplePoint:
    """One sampled location with a predicted and a reference value."""

    id: str
    x: float
    y: float
    predicted: float
    reference: float

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.x, self.y, self.predicted, self.reference))


@dataclass(frozen=True)
class SampleSet:
    """An ordered, immutable collection of sample points.

    Use :func:`validate_sample_set` to construct one with all invariants
    checked. Derived numpy arrays are cached and marked read-only.
    """

    points: tuple[SamplePoint, ...]

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.points)

    @cached_property
    def coords(self) -> np.ndarray:
        """(n, 2) array of planar coordinates, read-only."""
        a = np.array([(p.x, p.y) for p in self.points], dtype=np.float64).reshape(-1, 2)
        a.flags.writeable = False
        return a

    @cached_property
    def predicted(self) -> np.ndarray:
        a = np.array([p.predicted for p in self.points], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def reference(self) -> np.ndarray:
        a = np.array([p.reference for p in self.points], dtype=np.float64)
        a.flags.writeable = False
        return a

    @cached_property
    def deviations(self) -> np.ndarray:
        """predicted - reference, per point; positive means over-prediction."""
        a = self.predicted - self.reference
        a.flags.writeable = False
        return a

    def bounds(self) -> tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max) of the sample locations."""
        c = self.coords
        return float(c[:, 0].min()), float(c[:, 1].min()), float(c[:, 0].max()), float(c[:, 1].max())

    def diameter(self) -> float:
        x0, y0, x1, y1 = self.bounds()
        return math.hypot(x1 - x0, y1 - y0)

    def with_pairs(self, predicted: np.ndarray, reference: np.ndarray) -> "SampleSet":
        """A new set with the same locations/ids but replaced value pairs."""
        pts = tuple(
            SamplePoint(p.id, p.x, p.y, float(predicted[j]), float(reference[j]))
            for j, p in enumerate(self.points)
        )
        return SampleSet(pts)


def validate_sample_set(raw: Iterable[SamplePoint]) -> SampleSet:
    """Check finiteness, id uniqueness and minimum size; preserve input order.

    Raises
    ------
    NonFiniteError
        if any coordinate or value field is NaN/Inf.
    DuplicateIdError
        if two points share an id.
    TooFewPointsError
        if fewer than 2 points are given.
    """
    points = tuple(raw)
    seen: set[str] = set()
    for p in points:
        for name in ("x", "y", "predicted", "reference"):
            if not math.isfinite(getattr(p, name)):
                raise NonFiniteError(p.id, name)
        if p.id in seen:
            raise DuplicateIdError(p.id)
        seen.add(p.id)
    if len(points) < 2:
        raise TooFewPointsError(len(points), 2)
    return SampleSet(points)


@dataclass(frozen=True)
class FixedBandwidth:
    """Constant kernel radius (same length unit as the coordinates)."""

    distance: float

    def __post_init__(self):
        if not (math.isfinite(self.distance) and self.distance > 0):
            raise NonPositiveBandwidthError(self.distance)


@dataclass(frozen=True)
class AdaptiveFraction:
    """Kernel radius reaching the nearest ``ceil(fraction * n)`` samples."""

    fraction: float

    def __post_init__(self):
        if not (0.0 < self.fraction <= 1.0):
            raise InvalidConfigError(f"adaptive fraction must lie in (0, 1], got {self.fraction!r}")


@dataclass(frozen=True)
class AdaptiveCount:
    """Kernel radius reaching a fixed number of nearest samples."""

    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 2:
            raise InvalidConfigError(f"adaptive neighbor count must be an integer >= 2, got {self.count!r}")


Bandwidth = Union[FixedBandwidth, AdaptiveFraction, AdaptiveCount]

_KERNEL_FAMILIES = ("bisquare",)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth rule.

    Only the bi-square family is implemented; the enumeration exists so the
    spec string syntax stays forward-compatible.
    """

    bandwidth: Bandwidth
    family: str = "bisquare"

    def __post_init__(self):
        if self.family not in _KERNEL_FAMILIES:
            raise InvalidConfigError(
                f"unknown kernel family '{self.family}'; supported: {', '.join(_KERNEL_FAMILIES)}"
            )
        if not isinstance(self.bandwidth, (FixedBandwidth, AdaptiveFraction, AdaptiveCount)):
            raise InvalidConfigError(f"bandwidth must be a Bandwidth variant, got {type(self.bandwidth).__name__}")

    @property
    def is_fixed(self) -> bool:
        return isinstance(self.bandwidth, FixedBandwidth)

    @classmethod
    def fixed(cls, distance: float) -> "KernelSpec":
        return cls(FixedBandwidth(float(distance)))

    @classmethod
    def adaptive_fraction(cls, fraction: float) -> "KernelSpec":
        return cls(AdaptiveFraction(float(fraction)))

    @classmethod
    def adaptive_count(cls, count: int) -> "KernelSpec":
        return cls(AdaptiveCount(int(count)))

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """Parse the CLI bandwidth syntax: ``fixed:2000`` or ``adaptive:0.10``.

        An adaptive value in (0, 1] is a fraction of the sample size; an
        integral value >= 2 is a neighbor count.
        """
        kind, sep, value = text.partition(":")
        if not sep:
            raise InvalidConfigError(f"bandwidth spec '{text}' must look like 'fixed:2000' or 'adaptive:0.10'")
        try:
            v = float(value)
        except ValueError:
            raise InvalidConfigError(f"bandwidth value '{value}' is not a number") from None
        if kind == "fixed":
            return cls.fixed(v)
        if kind == "adaptive":
            if 0.0 < v <= 1.0:
                return cls.adaptive_fraction(v)
            if v >= 2 and float(int(v)) == v:
                return cls.adaptive_count(int(v))
            raise InvalidConfigError(
                f"adaptive bandwidth '{value}' must be a fraction in (0, 1] or an integer count >= 2"
            )
        raise InvalidConfigError(f"unknown bandwidth kind '{kind}'; expected 'fixed' or 'adaptive'")


def resolve_bandwidth_count(spec: KernelSpec, n: int) -> int:
    """Number of neighbors an adaptive bandwidth must enclose, clamped to [2, n].

    Fractions resolve to ``ceil(fraction * n)``; the ceiling guarantees at
    least the stated share of the data contributes.
    """
    if n < 2:
        raise TooFewPointsError(n, 2)
    bw = spec.bandwidth
    if isinstance(bw, AdaptiveFraction):
        k = math.ceil(bw.fraction * n - _CEIL_GUARD)
    elif isinstance(bw, AdaptiveCount):
        k = bw.count
    else:
        raise WrongBandwidthKindError("resolve_bandwidth_count needs an adaptive bandwidth, got a fixed one")
    return min(max(k, 2), n)


class DiagnosticKind(str, Enum):
    """The four local diagnostics that can be mapped onto surfaces."""

    GW_MSD = "gw_msd"
    GW_MAE = "gw_mae"
    GW_RMSE = "gw_rmse"
    GW_R = "gw_r"

    def __str__(self) -> str:  # click/argparse friendliness
        return self.value

    @classmethod
    def coerce(cls, value: "DiagnosticKind | str") -> "DiagnosticKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise InvalidConfigError(
                f"unknown diagnostic kind '{value}'; expected one of {', '.join(k.value for k in cls)}"
            ) from None


ALL_KINDS: tuple[DiagnosticKind, ...] = tuple(DiagnosticKind)


@dataclass(frozen=True)
class EvaluationGrid:
    """Axis-aligned regular lattice of evaluation centers.

    Cell (col, row) has its center at
    ``(x_min + (col + 0.5) * cell_size, y_min + (row + 0.5) * cell_size)``;
    row 0 is the southernmost row.
    """

    x_min: float
    y_min: float
    cell_size: float
    n_cols: int
    n_rows: int

    def __post_init__(self):
        if not (math.isfinite(self.cell_size) and self.cell_size > 0):
            raise InvalidConfigError(f"cell_size must be > 0, got {self.cell_size!r}")
        if self.n_cols < 1 or self.n_rows < 1:
            raise InvalidConfigError("grid must have at least one column and one row")
        if not (math.isfinite(self.x_min) and math.isfinite(self.y_min)):
            raise InvalidConfigError("grid origin must be finite")

    @property
    def n_cells(self) -> int:
        return self.n_cols * self.n_rows

    @property
    def x_max(self) -> float:
        return self.x_min + self.n_cols * self.cell_size

    @property
    def y_max(self) -> float:
        return self.y_min + self.n_rows * self.cell_size

    def center(self, col: int, row: int) -> tuple[float, float]:
        return (
            self.x_min + (col + 0.5) * self.cell_size,
            self.y_min + (row + 0.5) * self.cell_size,
        )

    def cell_centers(self) -> np.ndarray:
        """(n_cells, 2) centers in row-major order: index = row * n_cols + col."""
        xs = self.x_min + (np.arange(self.n_cols) + 0.5) * self.cell_size
        ys = self.y_min + (np.arange(self.n_rows) + 0.5) * self.cell_size
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def check_size(self, cap: int = 10_000_000) -> None:
        if self.n_cells > cap:
            raise GridTooLargeError(self.n_cells, cap)

    @classmethod
    def from_bbox(cls, x_min: float, y_min: float, x_max: float, y_max: float,
                  cell_size: float) -> "EvaluationGrid":
        """Smallest grid of square cells anchored at (x_min, y_min) covering the box."""
        if x_max <= x_min or y_max <= y_min:
            raise InvalidConfigError("bounding box must have positive width and height")
        n_cols = max(1, math.ceil((x_max - x_min) / cell_size - 1e-12))
        n_rows = max(1, math.ceil((y_max - y_min) / cell_size - 1e-12))
        return cls(x_min, y_min, cell_size, n_cols, n_rows)

    @classmethod
    def cover_samples(cls, samples: SampleSet, pad_fraction: float = 0.05,
                      target_cells: int = 100) -> "EvaluationGrid":
        """Auto grid over the padded sample bounding box.

        Each side is padded by ``pad_fraction`` of its span (0.5 absolute for a
        degenerate span); the longer axis gets exactly ``target_cells`` cells.
        """
        x0, y0, x1, y1 = samples.bounds()
        w, h = x1 - x0, y1 - y0
        pad_x = pad_fraction * w if w > 0 else 0.5
        pad_y = pad_fraction * h if h > 0 else 0.5
        x0, x1 = x0 - pad_x, x1 + pad_x
        y0, y1 = y0 - pad_y, y1 + pad_y
        cell = max(x1 - x0, y1 - y0) / target_cells
        return cls.from_bbox(x0, y0, x1, y1, cell)


@dataclass(frozen=True)
class DiagnosticSurface:
    """Per-cell values of one diagnostic on an evaluation grid.

    ``values`` has shape (n_rows, n_cols) with NaN marking missing cells;
    row 0 is the southernmost row.
    """

    grid: EvaluationGrid
    kind: DiagnosticKind
    values: np.ndarray
    kernel: KernelSpec

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.n_rows, self.grid.n_cols):
            raise InvalidConfigError(
                f"surface shape {v.shape} does not match grid ({self.grid.n_rows}, {self.grid.n_cols})"
            )
        if not v.flags.writeable:
            object.__setattr__(self, "values", v)
        else:
            v = v.copy()
            v.flags.writeable = False
            object.__setattr__(self, "values", v)

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def n_missing(self) -> int:
        return int(np.isnan(self.values).sum())

    def validate(self) -> None:
        """Check the per-kind value invariants; raises InvalidConfigError on violation."""
        v = self.values[~np.isnan(self.values)]
        if v.size == 0:
            return
        if self.kind is DiagnosticKind.GW_R:
            if v.min() < -1.0 or v.max() > 1.0:
                raise InvalidConfigError("gw_r surface holds values outside [-1, 1]")
        elif self.kind in (DiagnosticKind.GW_MAE, DiagnosticKind.GW_RMSE):
            if v.min() < 0.0:
                raise InvalidConfigError(f"{self.kind.value} surface holds negative values")
