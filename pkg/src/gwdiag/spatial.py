"""Distance computation, neighbor queries and bi-square kernel weighting.

The spatial index accelerates neighbor candidate search with a k-d tree, but
every distance and weight that enters a statistic is recomputed with one
canonical expression over the candidate set. The tree therefore only proposes
candidate supersets (with a generous radius margin), and the results are
bitwise identical to a brute-force scan over all samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    DegenerateBandwidthError,
    EmptySupportError,
    InvalidConfigError,
    NonPositiveBandwidthError,
)
from .model import FixedBandwidth, KernelSpec, SampleSet, resolve_bandwidth_count

__all__ = [
    "euclidean_distance",
    "bisquare_weight",
    "bisquare_weights",
    "WeightVector",
    "SpatialIndex",
    "resolve_local_bandwidth",
    "weight_vector",
]

# Inflation applied to the k-th neighbor distance so that neighbor gets a
# strictly positive weight (the kernel is zero at its support boundary).
BANDWIDTH_INFLATION = 1.0 + 1e-9

# Margin on tree-query radii so candidate sets are guaranteed supersets of the
# canonical-arithmetic truth; generous compared to any ulp-level disagreement
# between the tree's distance evaluation and the canonical one.
_CANDIDATE_MARGIN = 1.0 + 1e-7


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Planar Euclidean distance between two points."""
    dx = float(a[0]) - float(b[0])
    dy = float(a[1]) - float(b[1])
    return math.sqrt(dx * dx + dy * dy)


def bisquare_weight(d: float, b: float) -> float:
    """Bi-square kernel weight for distance ``d`` under bandwidth ``b``.

    ``(1 - (d/b)^2)^2`` inside the support radius, exactly 0 at and beyond it.
    """
    if not b > 0:
        raise NonPositiveBandwidthError(b)
    if d < 0 or not math.isfinite(d):
        raise InvalidConfigError(f"distance must be finite and >= 0, got {d!r}")
    if d >= b:
        return 0.0
    u = d / b
    t = 1.0 - u * u
    return t * t


def bisquare_weights(d: np.ndarray, b: float) -> np.ndarray:
    """Vectorized bi-square weights; same arithmetic as :func:`bisquare_weight`."""
    if not b > 0:
        raise NonPositiveBandwidthError(b)
    d = np.asarray(d, dtype=np.float64)
    u = d / b
    t = 1.0 - u * u
    # plain multiplies only: numpy's SIMD pow is not bit-identical to scalar **2
    return np.where(d < b, t * t, 0.0)


@dataclass(frozen=True)
class WeightVector:
    """Sparse kernel weights at one evaluation center.

    ``indices`` are ascending sample indices with strictly positive weight;
    zero-weight samples are omitted. Accumulation in any statistic follows
    this fixed index order, which is what makes results reproducible across
    worker counts.
    """

    center: tuple[float, float]
    indices: np.ndarray
    weights: np.ndarray
    bandwidth_used: float

    def __post_init__(self):
        for name in ("indices", "weights"):
            a = getattr(self, name)
            if a.flags.writeable:
                a = a.copy()
                a.flags.writeable = False
                object.__setattr__(self, name, a)

    @property
    def size(self) -> int:
        return int(self.indices.size)

    @property
    def weight_sum(self) -> float:
        return float(np.sum(self.weights))


class SpatialIndex:
    """Neighbor-candidate provider over fixed sample coordinates.

    Parameters
    ----------
    coords : (n, 2) array of planar coordinates.
    algorithm : "kdtree" or "brute". Both yield bitwise identical weight
        vectors; "brute" scans every sample and exists as the correctness
        oracle.
    """

    def __init__(self, coords: np.ndarray, algorithm: str = "kdtree"):
        coords = np.ascontiguousarray(np.asarray(coords, dtype=np.float64))
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise InvalidConfigError(f"coords must have shape (n, 2), got {coords.shape}")
        if coords.shape[0] < 2:
            raise InvalidConfigError("spatial index needs at least 2 points")
        if not np.isfinite(coords).all():
            raise InvalidConfigError("coords must be finite")
        if algorithm not in ("kdtree", "brute"):
            raise InvalidConfigError(f"algorithm must be 'kdtree' or 'brute', got {algorithm!r}")
        self._coords = coords
        self._coords.flags.writeable = False
        self.algorithm = algorithm
        self._tree = cKDTree(coords) if algorithm == "kdtree" else None

    @classmethod
    def for_samples(cls, samples: SampleSet, algorithm: str = "kdtree") -> "SpatialIndex":
        return cls(samples.coords, algorithm=algorithm)

    @property
    def n(self) -> int:
        return self._coords.shape[0]

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    # -- candidate supersets ------------------------------------------------

    def _all_indices(self) -> np.ndarray:
        return np.arange(self.n)

    def _candidates_fixed(self, centers: np.ndarray, bandwidth: float) -> list[np.ndarray]:
        if self._tree is None:
            allidx = self._all_indices()
            return [allidx] * centers.shape[0]
        hits = self._tree.query_ball_point(centers, bandwidth * _CANDIDATE_MARGIN)
        if centers.shape[0] == 1 and not isinstance(hits, np.ndarray):
            hits = [hits]
        return [np.sort(np.asarray(h, dtype=np.intp)) for h in hits]

    def _candidates_adaptive(self, centers: np.ndarray, k: int) -> list[np.ndarray]:
        if self._tree is None:
            allidx = self._all_indices()
            return [allidx] * centers.shape[0]
        dists, _ = self._tree.query(centers, k=k)
        dists = np.atleast_2d(dists)
        radii = dists[:, -1] * _CANDIDATE_MARGIN
        hits = self._tree.query_ball_point(centers, radii)
        if centers.shape[0] == 1 and not isinstance(hits, np.ndarray):
            hits = [hits]
        return [np.sort(np.asarray(h, dtype=np.intp)) for h in hits]

    # -- canonical per-center arithmetic -------------------------------------

    def _canonical_distances(self, candidates: np.ndarray, center: np.ndarray) -> np.ndarray:
        dx = self._coords[candidates, 0] - center[0]
        dy = self._coords[candidates, 1] - center[1]
        return np.sqrt(dx * dx + dy * dy)

    def _finalize(self, center: np.ndarray, candidates: np.ndarray,
                  spec: KernelSpec, k: Optional[int]) -> tuple[str, Optional[WeightVector]]:
        """Turn a candidate superset into a weight vector.

        Returns ("ok", wv), ("empty", None) or ("degenerate", None); raising is
        left to the scalar wrapper so grid evaluation can map failures to
        missing cells cheaply.
        """
        d = self._canonical_distances(candidates, center)
        if k is not None:
            # candidates are guaranteed to contain the true k nearest samples
            kth = np.partition(d, k - 1)[k - 1]
            bandwidth = float(kth) * BANDWIDTH_INFLATION
            if bandwidth == 0.0:
                return "degenerate", None
        else:
            bandwidth = spec.bandwidth.distance  # type: ignore[union-attr]
        inside = d < bandwidth
        idx = candidates[inside]
        w = bisquare_weights(d[inside], bandwidth)
        positive = w > 0.0
        idx, w = idx[positive], w[positive]
        if idx.size == 0:
            return "empty", None
        return "ok", WeightVector((float(center[0]), float(center[1])), idx, w, bandwidth)

    # -- public queries -------------------------------------------------------

    def weight_vectors(self, centers: np.ndarray, spec: KernelSpec) -> list[Optional[WeightVector]]:
        """Weight vectors for many centers; None where support is empty or degenerate."""
        centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
        if isinstance(spec.bandwidth, FixedBandwidth):
            k = None
            cands = self._candidates_fixed(centers, spec.bandwidth.distance)
        else:
            k = resolve_bandwidth_count(spec, self.n)
            cands = self._candidates_adaptive(centers, k)
        out: list[Optional[WeightVector]] = []
        for i in range(centers.shape[0]):
            status, wv = self._finalize(centers[i], cands[i], spec, k)
            out.append(wv if status == "ok" else None)
        return out

    def kth_neighbor_distance(self, center: Sequence[float], k: int) -> float:
        """Canonical distance from ``center`` to its k-th nearest sample."""
        if not 1 <= k <= self.n:
            raise InvalidConfigError(f"k must lie in [1, {self.n}], got {k}")
        c = np.asarray(center, dtype=np.float64)
        if self._tree is None:
            cand = self._all_indices()
        else:
            dists, _ = self._tree.query(c.reshape(1, 2), k=k)
            radius = float(np.atleast_2d(dists)[0, -1]) * _CANDIDATE_MARGIN
            cand = np.sort(np.asarray(self._tree.query_ball_point(c, radius), dtype=np.intp))
        d = self._canonical_distances(cand, c)
        return float(np.partition(d, k - 1)[k - 1])


def resolve_local_bandwidth(index: SpatialIndex, center: Sequence[float], spec: KernelSpec) -> float:
    """Kernel radius at one evaluation center.

    Fixed bandwidths pass through. Adaptive bandwidths take the distance to the
    k-th nearest sample and inflate it by (1 + 1e-9) so that neighbor lands
    strictly inside the support and receives a positive weight.
    """
    if isinstance(spec.bandwidth, FixedBandwidth):
        return spec.bandwidth.distance
    k = resolve_bandwidth_count(spec, index.n)
    b = index.kth_neighbor_distance(center, k) * BANDWIDTH_INFLATION
    if b == 0.0:
        raise DegenerateBandwidthError((float(center[0]), float(center[1])))
    return b


def weight_vector(index: SpatialIndex, center: Sequence[float], spec: KernelSpec) -> WeightVector:
    """Bi-square weight vector at one center; raises instead of returning None.

    Raises
    ------
    EmptySupportError
        if no sample lies strictly inside the support radius (only possible
        with a fixed bandwidth).
    DegenerateBandwidthError
        if an adaptive bandwidth resolves to 0.
    """
    c = np.asarray(center, dtype=np.float64).reshape(1, 2)
    if isinstance(spec.bandwidth, FixedBandwidth):
        k = None
        cands = index._candidates_fixed(c, spec.bandwidth.distance)
    else:
        k = resolve_bandwidth_count(spec, index.n)
        cands = index._candidates_adaptive(c, k)
    status, wv = index._finalize(c[0], cands[0], spec, k)
    if status == "degenerate":
        raise DegenerateBandwidthError((float(c[0, 0]), float(c[0, 1])))
    if status == "empty":
        b = spec.bandwidth.distance if isinstance(spec.bandwidth, FixedBandwidth) else None
        raise EmptySupportError((float(c[0, 0]), float(c[0, 1])), b)
    assert wv is not None
    return wv
