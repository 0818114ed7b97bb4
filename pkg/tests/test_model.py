import numpy as np
import pytest

from gwdiag.errors import (
    DuplicateIdError,
    GridTooLargeError,
    InvalidConfigError,
    NonFiniteError,
    NonPositiveBandwidthError,
    TooFewPointsError,
    WrongBandwidthKindError,
)
from gwdiag.model import (
    DiagnosticKind,
    DiagnosticSurface,
    EvaluationGrid,
    KernelSpec,
    SamplePoint,
    resolve_bandwidth_count,
    validate_sample_set,
)


def _pts(n):
    return [SamplePoint(f"p{i}", float(i), float(i) * 2.0, 5.0 + i, 4.0) for i in range(n)]


class TestValidateSampleSet:
    def test_pass_through_preserves_order(self):
        pts = _pts(3)
        s = validate_sample_set(pts)
        assert s.n == 3
        assert list(s.points) == pts
        assert s.ids == ("p0", "p1", "p2")

    def test_nan_predicted_rejected(self):
        pts = _pts(3)
        pts[1] = SamplePoint("p1", 1.0, 2.0, float("nan"), 4.0)
        with pytest.raises(NonFiniteError) as err:
            validate_sample_set(pts)
        assert err.value.point_id == "p1"
        assert err.value.field == "predicted"

    def test_inf_coordinate_rejected(self):
        pts = _pts(2)
        pts[0] = SamplePoint("p0", float("inf"), 0.0, 1.0, 1.0)
        with pytest.raises(NonFiniteError):
            validate_sample_set(pts)

    def test_duplicate_id_rejected(self):
        pts = [SamplePoint("p1", 0.0, 0.0, 1.0, 1.0), SamplePoint("p1", 1.0, 1.0, 2.0, 2.0)]
        with pytest.raises(DuplicateIdError) as err:
            validate_sample_set(pts)
        assert err.value.point_id == "p1"

    def test_too_few_points(self):
        with pytest.raises(TooFewPointsError):
            validate_sample_set(_pts(1))

    def test_idempotent(self):
        s = validate_sample_set(_pts(5))
        assert validate_sample_set(s.points) == s

    def test_coincident_coordinates_permitted(self):
        pts = [SamplePoint("a", 1.0, 1.0, 2.0, 2.0), SamplePoint("b", 1.0, 1.0, 3.0, 3.0)]
        assert validate_sample_set(pts).n == 2

    def test_derived_arrays_read_only(self):
        s = validate_sample_set(_pts(4))
        for arr in (s.coords, s.predicted, s.reference, s.deviations):
            assert not arr.flags.writeable
        assert np.array_equal(s.deviations, s.predicted - s.reference)


class TestResolveBandwidthCount:
    def test_ten_percent_of_550(self):
        spec = KernelSpec.adaptive_fraction(0.10)
        assert resolve_bandwidth_count(spec, 550) == 55

    def test_full_sample(self):
        assert resolve_bandwidth_count(KernelSpec.adaptive_fraction(1.0), 7) == 7

    def test_clamped_to_minimum_two(self):
        # ceil(0.05 * 10) = 1, clamped up to 2
        assert resolve_bandwidth_count(KernelSpec.adaptive_fraction(0.05), 10) == 2

    def test_count_clamped_to_n(self):
        assert resolve_bandwidth_count(KernelSpec.adaptive_count(50), 10) == 10

    def test_fixed_bandwidth_rejected(self):
        with pytest.raises(WrongBandwidthKindError):
            resolve_bandwidth_count(KernelSpec.fixed(100.0), 10)

    def test_monotone_in_fraction_and_n(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            f1, f2 = sorted(rng.uniform(0.01, 1.0, 2))
            n1, n2 = sorted(rng.integers(2, 2000, 2))
            k_f1 = resolve_bandwidth_count(KernelSpec.adaptive_fraction(f1), int(n2))
            k_f2 = resolve_bandwidth_count(KernelSpec.adaptive_fraction(f2), int(n2))
            assert k_f1 <= k_f2
            k_n1 = resolve_bandwidth_count(KernelSpec.adaptive_fraction(f1), int(n1))
            k_n2 = resolve_bandwidth_count(KernelSpec.adaptive_fraction(f1), int(n2))
            assert k_n1 <= k_n2


class TestKernelSpec:
    def test_parse_fixed(self):
        spec = KernelSpec.parse("fixed:2000")
        assert spec.is_fixed and spec.bandwidth.distance == 2000.0

    def test_parse_adaptive_fraction(self):
        spec = KernelSpec.parse("adaptive:0.10")
        assert not spec.is_fixed and spec.bandwidth.fraction == 0.10

    def test_parse_adaptive_count(self):
        spec = KernelSpec.parse("adaptive:55")
        assert spec.bandwidth.count == 55

    @pytest.mark.parametrize("text", ["bogus:1", "adaptive:1.5", "adaptive:x", "fixed:", "20"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidConfigError):
            KernelSpec.parse(text)

    def test_fixed_must_be_positive(self):
        with pytest.raises(NonPositiveBandwidthError):
            KernelSpec.fixed(0.0)

    def test_fraction_bounds(self):
        with pytest.raises(InvalidConfigError):
            KernelSpec.adaptive_fraction(0.0)
        with pytest.raises(InvalidConfigError):
            KernelSpec.adaptive_fraction(1.2)

    def test_count_minimum(self):
        with pytest.raises(InvalidConfigError):
            KernelSpec.adaptive_count(1)

    def test_unknown_family(self):
        from gwdiag.model import FixedBandwidth

        with pytest.raises(InvalidConfigError):
            KernelSpec(FixedBandwidth(1.0), family="gaussian")


class TestDiagnosticKind:
    def test_coerce_string(self):
        assert DiagnosticKind.coerce("gw_mae") is DiagnosticKind.GW_MAE

    def test_coerce_unknown(self):
        with pytest.raises(InvalidConfigError):
            DiagnosticKind.coerce("gw_mape")

    def test_enumeration_closed(self):
        assert [k.value for k in DiagnosticKind] == ["gw_msd", "gw_mae", "gw_rmse", "gw_r"]


class TestEvaluationGrid:
    def test_center_formula(self):
        g = EvaluationGrid(10.0, 20.0, 2.0, 4, 3)
        assert g.center(0, 0) == (11.0, 21.0)
        assert g.center(3, 2) == (17.0, 25.0)

    def test_centers_strictly_inside_extent(self):
        g = EvaluationGrid(-5.0, 3.0, 0.25, 13, 9)
        c = g.cell_centers()
        assert c.shape == (13 * 9, 2)
        assert (c[:, 0] > g.x_min).all() and (c[:, 0] < g.x_max).all()
        assert (c[:, 1] > g.y_min).all() and (c[:, 1] < g.y_max).all()

    def test_cell_centers_row_major(self):
        g = EvaluationGrid(0.0, 0.0, 1.0, 3, 2)
        c = g.cell_centers()
        assert tuple(c[0]) == g.center(0, 0)
        assert tuple(c[1]) == g.center(1, 0)
        assert tuple(c[3]) == g.center(0, 1)

    def test_from_bbox_covers(self):
        g = EvaluationGrid.from_bbox(0.0, 0.0, 10.0, 4.0, 3.0)
        assert (g.n_cols, g.n_rows) == (4, 2)
        assert g.x_max >= 10.0 and g.y_max >= 4.0

    def test_cover_samples_pads_and_targets(self):
        s = validate_sample_set(_pts(10))
        g = EvaluationGrid.cover_samples(s, pad_fraction=0.05, target_cells=10)
        x0, y0, x1, y1 = s.bounds()
        assert g.x_min < x0 and g.y_min < y0
        assert g.x_max > x1 and g.y_max > y1
        assert max(g.n_cols, g.n_rows) == 10

    def test_size_cap(self):
        g = EvaluationGrid(0.0, 0.0, 1.0, 5000, 5000)
        with pytest.raises(GridTooLargeError):
            g.check_size(10_000_000)
        g.check_size(25_000_000)

    def test_invalid_cell_size(self):
        with pytest.raises(InvalidConfigError):
            EvaluationGrid(0.0, 0.0, 0.0, 2, 2)


class TestDiagnosticSurface:
    def _grid(self):
        return EvaluationGrid(0.0, 0.0, 1.0, 2, 2)

    def test_r_range_validation(self):
        spec = KernelSpec.adaptive_fraction(0.5)
        good = DiagnosticSurface(self._grid(), DiagnosticKind.GW_R,
                                 np.array([[0.5, np.nan], [-1.0, 1.0]]), spec)
        good.validate()
        bad = DiagnosticSurface(self._grid(), DiagnosticKind.GW_R,
                                np.array([[1.5, 0.0], [0.0, 0.0]]), spec)
        with pytest.raises(InvalidConfigError):
            bad.validate()

    def test_nonnegative_validation(self):
        spec = KernelSpec.adaptive_fraction(0.5)
        bad = DiagnosticSurface(self._grid(), DiagnosticKind.GW_MAE,
                                np.array([[1.0, -0.1], [0.0, 0.0]]), spec)
        with pytest.raises(InvalidConfigError):
            bad.validate()

    def test_shape_mismatch(self):
        with pytest.raises(InvalidConfigError):
            DiagnosticSurface(self._grid(), DiagnosticKind.GW_MAE,
                              np.zeros((3, 2)), KernelSpec.adaptive_fraction(0.5))

    def test_values_read_only_and_missing_mask(self):
        surf = DiagnosticSurface(self._grid(), DiagnosticKind.GW_MSD,
                                 np.array([[0.0, np.nan], [2.0, -1.0]]),
                                 KernelSpec.adaptive_fraction(0.5))
        assert not surf.values.flags.writeable
        assert surf.n_missing == 1
        assert surf.missing_mask[0, 1]
