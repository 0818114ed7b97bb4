"""Global and geographically weighted error diagnostics.

The deviation convention throughout is ``predicted - reference``, so a
positive mean signed deviation means over-prediction. The geographically
weighted (GW) statistics are kernel-weighted counterparts of the global ones,
evaluated at arbitrary planar centers:

    gw_msd  = sum(w_j * dev_j) / sum(w_j)
    gw_mae  = sum(w_j * |dev_j|) / sum(w_j)
    gw_rmse = sqrt(sum(w_j * dev_j^2) / sum(w_j))
    gw_r    = gw_cov(ref, pred) / (gw_sd(ref) * gw_sd(pred))

with population-style weighted standard deviations and covariance. Weighted
accumulation always runs in ascending sample-index order, so surfaces are
bit-reproducible across runs and worker counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import EmptySupportError, InvalidConfigError, NumericalBlowupError, TooFewPointsError
from .model import (
    ALL_KINDS,
    DiagnosticKind,
    DiagnosticSurface,
    EvaluationGrid,
    KernelSpec,
    SampleSet,
)
from .spatial import SpatialIndex, WeightVector, weight_vector

__all__ = [
    "GlobalReport",
    "LocalDiagnostics",
    "global_diagnostics",
    "gw_msd",
    "gw_mae",
    "gw_rmse",
    "gw_mean",
    "gw_sd",
    "gw_covariance",
    "gw_r",
    "local_diagnostics",
    "evaluate_surfaces",
    "bandwidth_sweep",
    "DEFAULT_SWEEP_FRACTIONS",
]

# Correlations may exceed 1 in magnitude by at most this much before the
# computation is considered broken rather than merely rounded.
_R_ROUNDING_TOL = 1e-12

DEFAULT_SWEEP_FRACTIONS: tuple[float, ...] = tuple(i / 20 for i in range(1, 11))

DEFAULT_MIN_R_POINTS = 3
DEFAULT_MAX_CELLS = 10_000_000


@dataclass(frozen=True)
class GlobalReport:
    """Whole-dataset diagnostics; ``r`` is NaN when undefined."""

    msd: float
    mae: float
    rmse: float
    r: float
    n: int


@dataclass(frozen=True)
class LocalDiagnostics:
    """All four GW diagnostics at one center; NaN fields are missing."""

    center: tuple[float, float]
    gw_msd: float
    gw_mae: float
    gw_rmse: float
    gw_r: float
    effective_weight_sum: float


def _clamp_correlation(r: float) -> float:
    if abs(r) > 1.0 + _R_ROUNDING_TOL:
        raise NumericalBlowupError(r)
    return min(1.0, max(-1.0, r))


def global_diagnostics(samples: SampleSet) -> GlobalReport:
    """Unweighted msd, mae, rmse and Pearson r over the whole sample set.

    ``r`` is NaN when either series is constant or when n < 3 (a two-point
    correlation is always +-1 and carries no information).
    """
    n = samples.n
    if n < 2:
        raise TooFewPointsError(n, 2)
    dev = samples.deviations
    msd = float(np.mean(dev))
    mae = float(np.mean(np.abs(dev)))
    rmse = float(math.sqrt(np.mean(dev * dev)))
    ref, pred = samples.reference, samples.predicted
    if n < 3 or ref.min() == ref.max() or pred.min() == pred.max():
        r = float("nan")
    else:
        cr = ref - ref.mean()
        cp = pred - pred.mean()
        r = _clamp_correlation(float(np.dot(cr, cp) / math.sqrt(np.dot(cr, cr) * np.dot(cp, cp))))
    return GlobalReport(msd=msd, mae=mae, rmse=rmse, r=r, n=n)


def _check_support(w: WeightVector) -> float:
    s = w.weight_sum
    if not s > 0.0:
        raise EmptySupportError(w.center)
    return s


def gw_msd(samples: SampleSet, w: WeightVector) -> float:
    """Weighted mean signed deviation at the weight vector's center."""
    s = _check_support(w)
    dev = samples.deviations[w.indices]
    return float(np.dot(w.weights, dev) / s)


def gw_mae(samples: SampleSet, w: WeightVector) -> float:
    """Weighted mean absolute deviation."""
    s = _check_support(w)
    dev = np.abs(samples.deviations[w.indices])
    return float(np.dot(w.weights, dev) / s)


def gw_rmse(samples: SampleSet, w: WeightVector) -> float:
    """Weighted root mean squared deviation."""
    s = _check_support(w)
    dev = samples.deviations[w.indices]
    return float(math.sqrt(np.dot(w.weights, dev * dev) / s))


def gw_mean(values: np.ndarray, w: WeightVector) -> float:
    """Weighted mean of a per-sample series under the vector's kernel weights."""
    s = _check_support(w)
    v = np.asarray(values, dtype=np.float64)[w.indices]
    return float(np.dot(w.weights, v) / s)


def gw_sd(values: np.ndarray, w: WeightVector) -> float:
    """Population-style weighted standard deviation.

    Exactly 0.0 for a constant selected series; the naive formula would leave
    ~1e-16 noise there and misclassify degenerate correlations.
    """
    s = _check_support(w)
    v = np.asarray(values, dtype=np.float64)[w.indices]
    if v.min() == v.max():
        return 0.0
    c = v - gw_mean(values, w)
    return float(math.sqrt(np.dot(w.weights, c * c) / s))


def gw_covariance(a: np.ndarray, b: np.ndarray, w: WeightVector) -> float:
    """Weighted covariance of two per-sample series (population form)."""
    s = _check_support(w)
    av = np.asarray(a, dtype=np.float64)[w.indices]
    bv = np.asarray(b, dtype=np.float64)[w.indices]
    if av.min() == av.max() or bv.min() == bv.max():
        return 0.0
    ca = av - gw_mean(a, w)
    cb = bv - gw_mean(b, w)
    return float(np.dot(w.weights, ca * cb) / s)


def gw_r(samples: SampleSet, w: WeightVector) -> float:
    """Weighted Pearson correlation of reference and predicted values.

    NaN when either local standard deviation is 0; clamped to [-1, 1] to
    absorb rounding, raising NumericalBlowupError beyond the rounding band.
    """
    sd_ref = gw_sd(samples.reference, w)
    sd_pred = gw_sd(samples.predicted, w)
    if sd_ref == 0.0 or sd_pred == 0.0:
        return float("nan")
    cov = gw_covariance(samples.reference, samples.predicted, w)
    return _clamp_correlation(cov / (sd_ref * sd_pred))


def local_diagnostics(samples: SampleSet, index: SpatialIndex, center: Sequence[float],
                      spec: KernelSpec, min_r_points: int = DEFAULT_MIN_R_POINTS) -> LocalDiagnostics:
    """All four GW diagnostics at one center, sharing a single weight vector."""
    w = weight_vector(index, center, spec)
    r = gw_r(samples, w) if w.size >= min_r_points else float("nan")
    return LocalDiagnostics(
        center=w.center,
        gw_msd=gw_msd(samples, w),
        gw_mae=gw_mae(samples, w),
        gw_rmse=gw_rmse(samples, w),
        gw_r=r,
        effective_weight_sum=w.weight_sum,
    )


_KIND_FUNCS = {
    DiagnosticKind.GW_MSD: gw_msd,
    DiagnosticKind.GW_MAE: gw_mae,
    DiagnosticKind.GW_RMSE: gw_rmse,
}


def _cell_values(samples: SampleSet, w: Optional[WeightVector],
                 kinds: tuple[DiagnosticKind, ...], min_r_points: int) -> list[float]:
    if w is None:
        return [float("nan")] * len(kinds)
    out = []
    for kind in kinds:
        if kind is DiagnosticKind.GW_R:
            out.append(gw_r(samples, w) if w.size >= min_r_points else float("nan"))
        else:
            out.append(_KIND_FUNCS[kind](samples, w))
    return out


def _chunk_slices(n: int, n_chunks: int) -> list[slice]:
    n_chunks = max(1, min(n_chunks, n))
    bounds = np.linspace(0, n, n_chunks + 1, dtype=int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _normalize_jobs(n_jobs: Optional[int]) -> int:
    if n_jobs is None or n_jobs < 1:
        return 1
    return int(n_jobs)


def compute_weight_vectors(index: SpatialIndex, centers: np.ndarray, spec: KernelSpec,
                           n_jobs: Optional[int] = None) -> list[Optional[WeightVector]]:
    """Weight vectors for many centers, optionally chunked over a thread pool.

    Results are combined by center index, so the output is independent of the
    worker count.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    jobs = _normalize_jobs(n_jobs)
    if jobs == 1 or centers.shape[0] < 64:
        return index.weight_vectors(centers, spec)
    slices = _chunk_slices(centers.shape[0], jobs * 4)
    out: list[Optional[WeightVector]] = [None] * centers.shape[0]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for sl, chunk in zip(slices, pool.map(lambda s: index.weight_vectors(centers[s], spec), slices)):
            out[sl] = chunk
    return out


def evaluate_surfaces(samples: SampleSet, grid: EvaluationGrid, spec: KernelSpec,
                      kinds: Optional[Iterable[DiagnosticKind | str]] = None, *,
                      algorithm: str = "kdtree",
                      min_r_points: int = DEFAULT_MIN_R_POINTS,
                      max_cells: int = DEFAULT_MAX_CELLS,
                      n_jobs: Optional[int] = None,
                      index: Optional[SpatialIndex] = None) -> list[DiagnosticSurface]:
    """One surface per requested kind, evaluated at every cell center.

    Cells with empty kernel support, a degenerate adaptive bandwidth, or an
    undefined local correlation become NaN. All requested kinds at a cell share
    one weight-vector computation.
    """
    kind_tuple = tuple(DiagnosticKind.coerce(k) for k in (kinds if kinds is not None else ALL_KINDS))
    if len(set(kind_tuple)) != len(kind_tuple):
        raise InvalidConfigError("duplicate diagnostic kinds requested")
    grid.check_size(max_cells)
    if index is None:
        index = SpatialIndex.for_samples(samples, algorithm=algorithm)
    centers = grid.cell_centers()
    m = centers.shape[0]
    values = np.full((len(kind_tuple), m), np.nan)

    def run(sl: slice) -> np.ndarray:
        wvs = index.weight_vectors(centers[sl], spec)
        block = np.empty((len(kind_tuple), sl.stop - sl.start))
        for i, w in enumerate(wvs):
            block[:, i] = _cell_values(samples, w, kind_tuple, min_r_points)
        return block

    jobs = _normalize_jobs(n_jobs)
    slices = _chunk_slices(m, jobs * 4 if jobs > 1 else 1)
    if jobs == 1:
        for sl in slices:
            values[:, sl] = run(sl)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for sl, block in zip(slices, pool.map(run, slices)):
                values[:, sl] = block

    shape = (grid.n_rows, grid.n_cols)
    return [
        DiagnosticSurface(grid=grid, kind=k, values=values[i].reshape(shape), kernel=spec)
        for i, k in enumerate(kind_tuple)
    ]


def bandwidth_sweep(samples: SampleSet, grid: EvaluationGrid, kind: DiagnosticKind | str,
                    fractions: Optional[Sequence[float]] = None,
                    **kwargs) -> list[tuple[float, DiagnosticSurface]]:
    """The same surface over a ladder of adaptive bandwidth fractions.

    Defaults to 5% through 50% in 5% steps. Extra keyword arguments pass
    through to :func:`evaluate_surfaces`.
    """
    kind = DiagnosticKind.coerce(kind)
    if fractions is None:
        fractions = DEFAULT_SWEEP_FRACTIONS
    fractions = [float(f) for f in fractions]
    for f in fractions:
        if not 0.0 < f <= 1.0:
            raise InvalidConfigError(f"sweep fraction must lie in (0, 1], got {f!r}")
    if "index" not in kwargs:
        kwargs["index"] = SpatialIndex.for_samples(samples, algorithm=kwargs.pop("algorithm", "kdtree"))
    else:
        kwargs.pop("algorithm", None)
    out = []
    for f in fractions:
        spec = KernelSpec.adaptive_fraction(f)
        surface = evaluate_surfaces(samples, grid, spec, kinds=[kind], **kwargs)[0]
        out.append((f, surface))
    return out
