"""Scikit-learn style front end over the functional diagnostics core.

``GwErrorDiagnostics`` follows the estimator contract (``get_params`` /
``set_params`` / ``fit`` / ``transform``), so it clones, pipelines and
grid-searches like any other estimator. Fitting stores the sample set and its
spatial index; transforming evaluates the configured local diagnostics at
arbitrary planar centers.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .diagnostics import (
    DEFAULT_MIN_R_POINTS,
    _cell_values,
    compute_weight_vectors,
    evaluate_surfaces,
    global_diagnostics,
)
from .errors import InvalidConfigError, NonFiniteError
from .model import (
    ALL_KINDS,
    DiagnosticKind,
    DiagnosticSurface,
    EvaluationGrid,
    KernelSpec,
    SamplePoint,
    validate_sample_set,
)
from .spatial import SpatialIndex

__all__ = ["check_coordinates", "check_value_array", "GwErrorDiagnostics"]


def check_coordinates(X, name: str = "X") -> np.ndarray:
    """Coerce to a finite (n, 2) float64 array or raise."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != 2:
        raise InvalidConfigError(f"{name} must have shape (n, 2); got {X.shape}")
    if not np.isfinite(X).all():
        bad = int(np.argwhere(~np.isfinite(X).all(axis=1))[0, 0])
        raise NonFiniteError(str(bad), name)
    return X


def check_value_array(values, n: int, name: str) -> np.ndarray:
    """Coerce to a finite length-n float64 vector or raise."""
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.shape[0] != n:
        raise InvalidConfigError(f"{name} must have length {n}; got {v.shape[0]}")
    if not np.isfinite(v).all():
        bad = int(np.argwhere(~np.isfinite(v))[0, 0])
        raise NonFiniteError(str(bad), name)
    return v


class GwErrorDiagnostics(BaseEstimator):
    """Geographically weighted error diagnostics as an estimator.

    Parameters
    ----------
    kinds : sequence of str or DiagnosticKind, default all four
        Diagnostics computed by :meth:`transform`, in column order.
    bandwidth : float, int or str, default 0.10
        With ``fixed=False``: a value in (0, 1] is the fraction of samples an
        adaptive kernel must enclose, an integer >= 2 a neighbor count. With
        ``fixed=True``: a kernel radius in coordinate units. Strings use the
        CLI syntax, e.g. ``"fixed:2000"`` or ``"adaptive:0.10"``.
    fixed : bool, default False
        Interpret ``bandwidth`` as a fixed radius instead of an adaptive rule.
    kernel : str, default "bisquare"
        Kernel family; only the bi-square kernel is available.
    min_r_points : int, default 3
        Minimum points with positive weight for a local correlation.
    algorithm : {"kdtree", "brute"}, default "kdtree"
        Neighbor search backend; both produce identical results.
    n_jobs : int or None
        Worker threads for grid evaluation; results do not depend on it.

    Attributes
    ----------
    sample_set_ : SampleSet
    index_ : SpatialIndex
    kernel_spec_ : KernelSpec
    global_report_ : GlobalReport
    """

    def __init__(self, kinds: Sequence[DiagnosticKind | str] = tuple(k.value for k in ALL_KINDS),
                 bandwidth: float | str = 0.10, fixed: bool = False, kernel: str = "bisquare",
                 min_r_points: int = DEFAULT_MIN_R_POINTS, algorithm: str = "kdtree",
                 n_jobs: Optional[int] = None):
        self.kinds = kinds
        self.bandwidth = bandwidth
        self.fixed = fixed
        self.kernel = kernel
        self.min_r_points = min_r_points
        self.algorithm = algorithm
        self.n_jobs = n_jobs

    def _resolve_kernel_spec(self) -> KernelSpec:
        bw = self.bandwidth
        if isinstance(bw, KernelSpec):
            return bw
        if isinstance(bw, str):
            spec = KernelSpec.parse(bw)
        elif self.fixed:
            spec = KernelSpec.fixed(float(bw))
        elif 0.0 < float(bw) <= 1.0:
            spec = KernelSpec.adaptive_fraction(float(bw))
        elif float(bw) >= 2 and float(int(bw)) == float(bw):
            spec = KernelSpec.adaptive_count(int(bw))
        else:
            raise InvalidConfigError(
                f"adaptive bandwidth must be a fraction in (0, 1] or an integer count >= 2, got {bw!r}"
            )
        if self.kernel != spec.family:
            raise InvalidConfigError(f"unknown kernel family '{self.kernel}'")
        return spec

    def _resolve_kinds(self) -> tuple[DiagnosticKind, ...]:
        kinds = tuple(DiagnosticKind.coerce(k) for k in self.kinds)
        if not kinds:
            raise InvalidConfigError("kinds must not be empty")
        return kinds

    def fit(self, X, predicted, reference):
        """Store validated samples and build the neighbor index.

        Parameters
        ----------
        X : (n, 2) array of planar coordinates.
        predicted, reference : length-n value arrays.
        """
        if self.kernel != "bisquare":
            raise InvalidConfigError(f"unknown kernel family '{self.kernel}'")
        X = check_coordinates(X)
        n = X.shape[0]
        pred = check_value_array(predicted, n, "predicted")
        ref = check_value_array(reference, n, "reference")
        points = [SamplePoint(str(j), float(X[j, 0]), float(X[j, 1]), float(pred[j]), float(ref[j]))
                  for j in range(n)]
        self.sample_set_ = validate_sample_set(points)
        self.kernel_spec_ = self._resolve_kernel_spec()
        self.kinds_ = self._resolve_kinds()
        self.index_ = SpatialIndex.for_samples(self.sample_set_, algorithm=self.algorithm)
        self.global_report_ = global_diagnostics(self.sample_set_)
        self.n_features_in_ = 2
        return self

    def transform(self, X) -> np.ndarray:
        """Local diagnostics at the given centers.

        Returns an (m, len(kinds)) array; NaN marks centers where a diagnostic
        is undefined (empty kernel support or degenerate local correlation).
        """
        check_is_fitted(self, "sample_set_")
        centers = check_coordinates(X, "centers")
        wvs = compute_weight_vectors(self.index_, centers, self.kernel_spec_, n_jobs=self.n_jobs)
        out = np.empty((centers.shape[0], len(self.kinds_)))
        for i, w in enumerate(wvs):
            out[i] = _cell_values(self.sample_set_, w, self.kinds_, self.min_r_points)
        return out

    def fit_transform(self, X, predicted, reference) -> np.ndarray:
        """Fit on the samples, then evaluate the diagnostics at those same locations."""
        return self.fit(X, predicted, reference).transform(X)

    def evaluate_grid(self, grid: EvaluationGrid) -> list[DiagnosticSurface]:
        """Diagnostic surfaces over an evaluation grid (one per configured kind)."""
        check_is_fitted(self, "sample_set_")
        return evaluate_surfaces(self.sample_set_, grid, self.kernel_spec_, kinds=self.kinds_,
                                 min_r_points=self.min_r_points, n_jobs=self.n_jobs,
                                 index=self.index_)
