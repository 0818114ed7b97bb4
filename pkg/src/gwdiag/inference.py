"""Monte Carlo permutation tests and Moran's I of prediction deviations.

Randomization scheme
--------------------
The exchangeable unit is the (predicted, reference) pair: a permutation
reassigns intact pairs across locations, preserving the global error
distribution while destroying its spatial arrangement. Pseudo p-values follow
the add-one convention: the actual outcome is ranked among all
``n_permutations + 1`` outcomes, so no p can fall below ``1/(n+1)``.

Reproducibility
---------------
All randomness comes from numpy's PCG64. Permutation ``i`` draws from
``Generator(PCG64(SeedSequence(seed, spawn_key=(i,))))``, so replicates are
independent of evaluation order and worker count, and a seed fully determines
every report. Internally, the actual statistic is evaluated through the same
vectorized path as the permuted ones (as row 0, the identity permutation) so
that complete ties are exact ties.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    CoincidentPointsError,
    InvalidConfigError,
    NumericalBlowupError,
    TooFewPointsError,
    ZeroVarianceError,
)
from .diagnostics import (
    DEFAULT_MAX_CELLS,
    DEFAULT_MIN_R_POINTS,
    _chunk_slices,
    _normalize_jobs,
    compute_weight_vectors,
)
from .model import DiagnosticKind, EvaluationGrid, KernelSpec, SampleSet
from .spatial import SpatialIndex, WeightVector

__all__ = [
    "TAILS",
    "PermutationConfig",
    "PermutationReport",
    "MoranReport",
    "permutation_rng",
    "permute_pairs",
    "pseudo_p_value",
    "local_permutation_test",
    "morans_i",
    "morans_i_test",
]

TAILS = ("two_sided", "upper", "lower")


@dataclass(frozen=True)
class PermutationConfig:
    """Settings shared by every permutation test."""

    n_permutations: int = 999
    seed: int = 0
    alpha: float = 0.01
    tail: str = "two_sided"

    def __post_init__(self):
        if self.n_permutations < 19:
            raise InvalidConfigError(
                f"n_permutations must be >= 19 for a usable two-sided resolution, got {self.n_permutations}"
            )
        if not (0.0 < self.alpha < 1.0):
            raise InvalidConfigError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if self.tail not in TAILS:
            raise InvalidConfigError(f"tail must be one of {TAILS}, got {self.tail!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class PermutationReport:
    """Per-cell pseudo p-values and the significance mask for one diagnostic."""

    grid: EvaluationGrid
    kind: DiagnosticKind
    p_values: np.ndarray
    significant: np.ndarray
    config: PermutationConfig

    def __post_init__(self):
        for name in ("p_values", "significant"):
            a = getattr(self, name)
            if a.flags.writeable:
                a = a.copy()
                a.flags.writeable = False
                object.__setattr__(self, name, a)


@dataclass(frozen=True)
class MoranReport:
    i_value: float
    p_value: float
    n_permutations: int
    seed: int


def permutation_rng(seed: int, index: int) -> np.random.Generator:
    """The generator that produces permutation ``index`` under ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def permute_pairs(samples: SampleSet, rng: np.random.Generator) -> SampleSet:
    """Reassign the (predicted, reference) pairs across locations uniformly at random."""
    perm = rng.permutation(samples.n)
    return samples.with_pairs(samples.predicted[perm], samples.reference[perm])


def _permutation_matrix(n: int, cfg: PermutationConfig) -> np.ndarray:
    """(n_permutations + 1, n) sample-index rows; row 0 is the identity."""
    mat = np.empty((cfg.n_permutations + 1, n), dtype=np.intp)
    mat[0] = np.arange(n)
    for i in range(cfg.n_permutations):
        mat[i + 1] = permutation_rng(cfg.seed, i).permutation(n)
    return mat


def pseudo_p_value(actual: float, permuted: np.ndarray, tail: str = "two_sided") -> float:
    """Add-one pseudo p-value of ``actual`` among ``permuted`` outcomes.

    Undefined permuted outcomes (NaN) are counted as extreme in both tails,
    which can only enlarge the p-value.
    """
    if tail not in TAILS:
        raise InvalidConfigError(f"tail must be one of {TAILS}, got {tail!r}")
    permuted = np.asarray(permuted, dtype=np.float64)
    n_nan = int(np.isnan(permuted).sum())
    g_upper = 1 + int(np.sum(permuted >= actual)) + n_nan
    g_lower = 1 + int(np.sum(permuted <= actual)) + n_nan
    denom = permuted.size + 1
    if tail == "upper":
        p = g_upper / denom
    elif tail == "lower":
        p = g_lower / denom
    else:
        p = 2.0 * min(g_upper, g_lower) / denom
    return min(p, 1.0)


def _perm_stats(kind: DiagnosticKind, samples: SampleSet, perm_rows: np.ndarray,
                w: WeightVector) -> np.ndarray:
    """The local statistic under every permutation row (row 0 = actual)."""
    idx, wts, s = w.indices, w.weights, w.weight_sum
    gathered = perm_rows[:, idx]
    if kind is DiagnosticKind.GW_R:
        a = samples.reference[gathered]
        b = samples.predicted[gathered]
        const_a = a.min(axis=1) == a.max(axis=1)
        const_b = b.min(axis=1) == b.max(axis=1)
        ma = a @ wts / s
        mb = b @ wts / s
        ca = a - ma[:, None]
        cb = b - mb[:, None]
        va = (ca * ca) @ wts / s
        vb = (cb * cb) @ wts / s
        cov = (ca * cb) @ wts / s
        undefined = const_a | const_b | (va <= 0.0) | (vb <= 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = cov / np.sqrt(va * vb)
        r[undefined] = np.nan
        finite = r[~np.isnan(r)]
        if finite.size and np.max(np.abs(finite)) > 1.0 + 1e-12:
            raise NumericalBlowupError(float(finite[np.argmax(np.abs(finite))]))
        return np.clip(r, -1.0, 1.0)
    dev = samples.deviations[gathered]
    if kind is DiagnosticKind.GW_MSD:
        return dev @ wts / s
    if kind is DiagnosticKind.GW_MAE:
        return np.abs(dev) @ wts / s
    if kind is DiagnosticKind.GW_RMSE:
        return np.sqrt((dev * dev) @ wts / s)
    raise InvalidConfigError(f"unsupported diagnostic kind {kind!r}")


def local_permutation_test(samples: SampleSet, grid: EvaluationGrid, spec: KernelSpec,
                           kind: DiagnosticKind | str, cfg: PermutationConfig, *,
                           algorithm: str = "kdtree",
                           min_r_points: int = DEFAULT_MIN_R_POINTS,
                           max_cells: int = DEFAULT_MAX_CELLS,
                           n_jobs: Optional[int] = None,
                           index: Optional[SpatialIndex] = None) -> PermutationReport:
    """Cell-wise Monte Carlo significance of one GW diagnostic.

    Weight vectors are location-determined, so they are computed once per cell
    and reused across all permutations. Cells that are missing in the actual
    surface stay missing in the report and are never flagged.
    """
    kind = DiagnosticKind.coerce(kind)
    grid.check_size(max_cells)
    if index is None:
        index = SpatialIndex.for_samples(samples, algorithm=algorithm)
    centers = grid.cell_centers()
    wvs = compute_weight_vectors(index, centers, spec, n_jobs=n_jobs)
    perm_rows = _permutation_matrix(samples.n, cfg)

    m = centers.shape[0]
    p_flat = np.full(m, np.nan)

    def run(sl: slice) -> np.ndarray:
        out = np.full(sl.stop - sl.start, np.nan)
        for i in range(sl.start, sl.stop):
            w = wvs[i]
            if w is None:
                continue
            if kind is DiagnosticKind.GW_R and w.size < min_r_points:
                continue
            stats = _perm_stats(kind, samples, perm_rows, w)
            actual = stats[0]
            if math.isnan(actual):
                continue
            out[i - sl.start] = pseudo_p_value(actual, stats[1:], cfg.tail)
        return out

    jobs = _normalize_jobs(n_jobs)
    slices = _chunk_slices(m, jobs * 4 if jobs > 1 else 1)
    if jobs == 1:
        for sl in slices:
            p_flat[sl] = run(sl)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for sl, block in zip(slices, pool.map(run, slices)):
                p_flat[sl] = block

    shape = (grid.n_rows, grid.n_cols)
    p_values = p_flat.reshape(shape)
    with np.errstate(invalid="ignore"):
        significant = np.where(np.isnan(p_values), False, p_values < cfg.alpha)
    return PermutationReport(grid=grid, kind=kind, p_values=p_values,
                             significant=significant.astype(bool), config=cfg)


def _inverse_distance_squared_weights(samples: SampleSet, row_standardize: bool) -> np.ndarray:
    coords = samples.coords
    dx = coords[:, 0][:, None] - coords[:, 0][None, :]
    dy = coords[:, 1][:, None] - coords[:, 1][None, :]
    d2 = dx * dx + dy * dy
    off_diag_zero = (d2 == 0.0) & ~np.eye(samples.n, dtype=bool)
    if off_diag_zero.any():
        i, j = np.argwhere(off_diag_zero)[0]
        raise CoincidentPointsError(samples.ids[int(i)], samples.ids[int(j)])
    with np.errstate(divide="ignore"):
        w = 1.0 / d2
    np.fill_diagonal(w, 0.0)
    if row_standardize:
        sums = w.sum(axis=1, keepdims=True)
        w = w / sums
    return w


def morans_i(samples: SampleSet, row_standardize: bool = False) -> float:
    """Moran's I of the deviations with inverse-distance-squared weights.

    Uses the standard cross-product form ``(n / S0) * (e' W e) / (e' e)`` on
    mean-centered deviations, with ``w_ij = 1 / d_ij^2`` and a zero diagonal.
    Weights are not row-standardized unless requested.
    """
    n = samples.n
    if n < 3:
        raise TooFewPointsError(n, 3)
    w = _inverse_distance_squared_weights(samples, row_standardize)
    dev = samples.deviations
    if dev.min() == dev.max():
        raise ZeroVarianceError("deviations")
    e = dev - dev.mean()
    s0 = float(w.sum())
    return float(n / s0 * (e @ w @ e) / np.dot(e, e))


def morans_i_test(samples: SampleSet, cfg: PermutationConfig,
                  row_standardize: bool = False) -> MoranReport:
    """Permutation test of Moran's I (deviations shuffled across locations)."""
    i_actual = morans_i(samples, row_standardize)
    w = _inverse_distance_squared_weights(samples, row_standardize)
    s0 = float(w.sum())
    n = samples.n
    perm_rows = _permutation_matrix(n, cfg)
    e_all = samples.deviations[perm_rows]
    e_all = e_all - e_all.mean(axis=1, keepdims=True)
    num = np.einsum("pi,pi->p", e_all @ w, e_all)
    den = np.einsum("pi,pi->p", e_all, e_all)
    i_all = n / s0 * num / den
    p = pseudo_p_value(float(i_all[0]), i_all[1:], cfg.tail)
    return MoranReport(i_value=i_actual, p_value=p,
                       n_permutations=cfg.n_permutations, seed=cfg.seed)
