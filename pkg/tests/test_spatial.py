import numpy as np
import pytest

from gwdiag.errors import (
    DegenerateBandwidthError,
    EmptySupportError,
    InvalidConfigError,
    NonPositiveBandwidthError,
)
from gwdiag.model import KernelSpec, SamplePoint, validate_sample_set
from gwdiag.spatial import (
    BANDWIDTH_INFLATION,
    SpatialIndex,
    bisquare_weight,
    bisquare_weights,
    euclidean_distance,
    resolve_local_bandwidth,
    weight_vector,
)

from conftest import make_random_samples


def line_index(algorithm="kdtree"):
    pts = [SamplePoint(f"p{i}", float(i), 0.0, 1.0, 0.0) for i in range(4)]
    s = validate_sample_set(pts)
    return SpatialIndex.for_samples(s, algorithm=algorithm)


class TestEuclideanDistance:
    def test_identity(self):
        assert euclidean_distance((0.0, 0.0), (0.0, 0.0)) == 0.0

    def test_three_four_five(self):
        assert euclidean_distance((0.0, 0.0), (3.0, 4.0)) == 5.0

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            a, b = rng.uniform(-100, 100, (2, 2))
            assert euclidean_distance(a, b) == euclidean_distance(b, a)


class TestBisquareWeight:
    def test_kernel_center(self):
        assert bisquare_weight(0.0, 5.0) == 1.0

    def test_support_boundary(self):
        assert bisquare_weight(5.0, 5.0) == 0.0
        assert bisquare_weight(6.0, 5.0) == 0.0

    def test_half_bandwidth_exact(self):
        assert bisquare_weight(2.5, 5.0) == 0.5625

    def test_nonpositive_bandwidth(self):
        with pytest.raises(NonPositiveBandwidthError):
            bisquare_weight(1.0, 0.0)
        with pytest.raises(NonPositiveBandwidthError):
            bisquare_weights(np.array([1.0]), -2.0)

    def test_negative_distance_rejected(self):
        with pytest.raises(InvalidConfigError):
            bisquare_weight(-1.0, 5.0)

    def test_vectorized_matches_scalar_bitwise(self):
        rng = np.random.default_rng(11)
        d = rng.uniform(0.0, 12.0, 300)
        b = 7.3
        vec = bisquare_weights(d, b)
        for i in range(d.size):
            assert vec[i] == bisquare_weight(float(d[i]), b)

    def test_monotone_in_distance_and_bandwidth(self):
        ds = np.linspace(0.0, 10.0, 101)
        w = bisquare_weights(ds, 6.0)
        assert (np.diff(w) <= 0.0).all()
        d = 3.0
        ws = [bisquare_weight(d, b) for b in np.linspace(3.5, 50.0, 80)]
        assert all(b2 >= b1 for b1, b2 in zip(ws, ws[1:]))
        assert ((w >= 0.0) & (w <= 1.0)).all()


class TestResolveLocalBandwidth:
    def test_fixed_pass_through(self):
        idx = line_index()
        assert resolve_local_bandwidth(idx, (500.0, 123.0), KernelSpec.fixed(1000.0)) == 1000.0

    def test_adaptive_count_2_on_line(self):
        idx = line_index()
        b = resolve_local_bandwidth(idx, (0.0, 0.0), KernelSpec.adaptive_count(2))
        assert b == 1.0 * BANDWIDTH_INFLATION

    def test_adaptive_count_4_on_line(self):
        idx = line_index()
        b = resolve_local_bandwidth(idx, (0.0, 0.0), KernelSpec.adaptive_count(4))
        assert b == 3.0 * BANDWIDTH_INFLATION

    def test_degenerate_bandwidth(self):
        pts = [SamplePoint("a", 5.0, 5.0, 1.0, 0.0), SamplePoint("b", 5.0, 5.0, 2.0, 0.0)]
        idx = SpatialIndex.for_samples(validate_sample_set(pts))
        with pytest.raises(DegenerateBandwidthError):
            resolve_local_bandwidth(idx, (5.0, 5.0), KernelSpec.adaptive_count(2))


class TestWeightVector:
    def test_line_fixed_bandwidth_2(self):
        idx = line_index()
        w = weight_vector(idx, (0.0, 0.0), KernelSpec.fixed(2.0))
        assert list(w.indices) == [0, 1]
        assert w.weights[0] == 1.0
        assert w.weights[1] == 0.5625
        assert w.bandwidth_used == 2.0

    def test_empty_support(self):
        idx = line_index()
        with pytest.raises(EmptySupportError):
            weight_vector(idx, (10.0, 10.0), KernelSpec.fixed(0.5))

    def test_full_support_under_huge_bandwidth(self, random_samples):
        idx = SpatialIndex.for_samples(random_samples)
        w = weight_vector(idx, (500.0, 500.0), KernelSpec.fixed(1e9))
        assert w.size == random_samples.n
        assert (w.weights > 0.0).all()

    def test_adaptive_support_size_at_least_k(self, random_samples):
        idx = SpatialIndex.for_samples(random_samples)
        rng = np.random.default_rng(5)
        for k in (2, 5, 20):
            for _ in range(10):
                center = rng.uniform(0.0, 1000.0, 2)
                w = weight_vector(idx, center, KernelSpec.adaptive_count(k))
                assert w.size >= k

    def test_ties_at_kth_radius_all_included(self):
        # center equidistant from 4 corner points; k=2 must include all 4 ties
        pts = [SamplePoint(str(i), float(dx), float(dy), 1.0, 0.0)
               for i, (dx, dy) in enumerate([(1, 1), (-1, 1), (1, -1), (-1, -1)])]
        idx = SpatialIndex.for_samples(validate_sample_set(pts))
        w = weight_vector(idx, (0.0, 0.0), KernelSpec.adaptive_count(2))
        assert w.size == 4

    def test_indices_ascending_and_read_only(self, random_samples):
        idx = SpatialIndex.for_samples(random_samples)
        w = weight_vector(idx, (321.0, 654.0), KernelSpec.adaptive_fraction(0.1))
        assert (np.diff(w.indices) > 0).all()
        assert not w.indices.flags.writeable and not w.weights.flags.writeable

    def test_weights_in_unit_interval(self, random_samples):
        idx = SpatialIndex.for_samples(random_samples)
        w = weight_vector(idx, (100.0, 900.0), KernelSpec.adaptive_fraction(0.25))
        assert (w.weights > 0.0).all() and (w.weights <= 1.0).all()
        assert w.weight_sum > 0.0


def brute_weight_vector_oracle(samples, center, spec):
    """Independent all-pairs scan with scalar arithmetic only."""
    coords = samples.coords
    dists = [euclidean_distance(coords[j], center) for j in range(samples.n)]
    if spec.is_fixed:
        b = spec.bandwidth.distance
    else:
        from gwdiag.model import resolve_bandwidth_count

        k = resolve_bandwidth_count(spec, samples.n)
        b = sorted(dists)[k - 1] * BANDWIDTH_INFLATION
        if b == 0.0:
            return None
    entries = []
    for j, d in enumerate(dists):
        if d < b:
            w = bisquare_weight(d, b)
            if w > 0.0:
                entries.append((j, w))
    return b, entries


class TestOracleEquivalence:
    @pytest.mark.parametrize("spec", [KernelSpec.adaptive_fraction(0.1),
                                      KernelSpec.adaptive_count(7),
                                      KernelSpec.fixed(150.0)])
    def test_index_matches_brute_scan_exactly(self, spec):
        samples = make_random_samples(seed=2024, n=200)
        kd = SpatialIndex.for_samples(samples, algorithm="kdtree")
        br = SpatialIndex.for_samples(samples, algorithm="brute")
        rng = np.random.default_rng(77)
        centers = rng.uniform(0.0, 1000.0, (50, 2))
        kd_batch = kd.weight_vectors(centers, spec)
        br_batch = br.weight_vectors(centers, spec)
        for i, center in enumerate(centers):
            a, b = kd_batch[i], br_batch[i]
            oracle = brute_weight_vector_oracle(samples, center, spec)
            if a is None or b is None:
                assert a is None and b is None
                assert oracle is None or not oracle[1]
                continue
            assert np.array_equal(a.indices, b.indices)
            assert np.array_equal(a.weights, b.weights)  # zero difference required
            assert a.bandwidth_used == b.bandwidth_used
            ob, oentries = oracle
            assert a.bandwidth_used == ob
            assert [int(j) for j in a.indices] == [j for j, _ in oentries]
            assert [float(w) for w in a.weights] == [w for _, w in oentries]

    def test_batch_matches_single_queries(self, random_samples):
        spec = KernelSpec.adaptive_fraction(0.08)
        idx = SpatialIndex.for_samples(random_samples)
        rng = np.random.default_rng(8)
        centers = rng.uniform(0.0, 1000.0, (20, 2))
        batch = idx.weight_vectors(centers, spec)
        for i, center in enumerate(centers):
            single = weight_vector(idx, center, spec)
            assert np.array_equal(batch[i].indices, single.indices)
            assert np.array_equal(batch[i].weights, single.weights)
