import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from gwdiag.diagnostics import evaluate_surfaces
from gwdiag.errors import InvalidConfigError, NonFiniteError
from gwdiag.estimator import GwErrorDiagnostics, check_coordinates, check_value_array
from gwdiag.model import EvaluationGrid, KernelSpec

from conftest import make_random_samples


@pytest.fixture
def fitted():
    s = make_random_samples(seed=1, n=120)
    est = GwErrorDiagnostics()
    est.fit(s.coords, s.predicted, s.reference)
    return s, est


class TestValidationHelpers:
    def test_coordinates_shape(self):
        with pytest.raises(InvalidConfigError):
            check_coordinates(np.zeros((3, 3)))

    def test_coordinates_finite(self):
        bad = np.array([[0.0, 1.0], [np.inf, 2.0]])
        with pytest.raises(NonFiniteError):
            check_coordinates(bad)

    def test_value_array_length(self):
        with pytest.raises(InvalidConfigError):
            check_value_array([1.0, 2.0], 3, "predicted")

    def test_value_array_finite(self):
        with pytest.raises(NonFiniteError):
            check_value_array([1.0, np.nan], 2, "reference")


class TestEstimatorContract:
    def test_get_set_params_and_clone(self):
        est = GwErrorDiagnostics(bandwidth=0.25, kinds=("gw_mae",), n_jobs=2)
        params = est.get_params()
        assert params["bandwidth"] == 0.25 and params["kinds"] == ("gw_mae",)
        est.set_params(bandwidth=0.5)
        assert est.bandwidth == 0.5
        dup = clone(est)
        assert dup.get_params() == est.get_params()

    def test_transform_before_fit_raises(self):
        with pytest.raises(NotFittedError):
            GwErrorDiagnostics().transform(np.zeros((1, 2)))

    def test_fit_sets_state(self, fitted):
        s, est = fitted
        assert est.sample_set_.n == 120
        assert est.n_features_in_ == 2
        assert est.kernel_spec_ == KernelSpec.adaptive_fraction(0.10)
        assert est.global_report_.n == 120

    def test_fit_validates_inputs(self):
        est = GwErrorDiagnostics()
        with pytest.raises(InvalidConfigError):
            est.fit(np.zeros((5, 3)), np.zeros(5), np.zeros(5))
        with pytest.raises(NonFiniteError):
            est.fit(np.zeros((5, 2)), np.full(5, np.nan), np.zeros(5))


class TestBandwidthForms:
    def _fit(self, **kwargs):
        s = make_random_samples(seed=2, n=60)
        return GwErrorDiagnostics(**kwargs).fit(s.coords, s.predicted, s.reference)

    def test_fraction(self):
        assert self._fit(bandwidth=0.2).kernel_spec_ == KernelSpec.adaptive_fraction(0.2)

    def test_neighbor_count(self):
        assert self._fit(bandwidth=12).kernel_spec_ == KernelSpec.adaptive_count(12)

    def test_fixed_flag(self):
        assert self._fit(bandwidth=250.0, fixed=True).kernel_spec_ == KernelSpec.fixed(250.0)

    def test_string_syntax(self):
        assert self._fit(bandwidth="fixed:300").kernel_spec_ == KernelSpec.fixed(300.0)

    def test_kernel_spec_instance(self):
        spec = KernelSpec.adaptive_count(9)
        assert self._fit(bandwidth=spec).kernel_spec_ == spec

    def test_invalid_adaptive_value(self):
        with pytest.raises(InvalidConfigError):
            self._fit(bandwidth=1.5)

    def test_unknown_kernel_family(self):
        with pytest.raises(InvalidConfigError):
            self._fit(kernel="gaussian")


class TestTransform:
    def test_matches_functional_surfaces(self, fitted):
        s, est = fitted
        grid = EvaluationGrid.cover_samples(s, target_cells=7)
        cols = est.transform(grid.cell_centers())
        surfs = evaluate_surfaces(s, grid, KernelSpec.adaptive_fraction(0.10))
        assert cols.shape == (grid.n_cells, 4)
        for j, sf in enumerate(surfs):
            assert np.array_equal(cols[:, j].reshape(sf.values.shape), sf.values, equal_nan=True)

    def test_column_order_follows_kinds(self):
        s = make_random_samples(seed=3, n=80)
        est = GwErrorDiagnostics(kinds=("gw_rmse", "gw_msd")).fit(s.coords, s.predicted, s.reference)
        out = est.transform(s.coords[:5])
        assert out.shape == (5, 2)
        assert (out[:, 0] >= 0.0).all()  # rmse column

    def test_fit_transform(self):
        s = make_random_samples(seed=4, n=70)
        est = GwErrorDiagnostics(kinds=("gw_mae",))
        out = est.fit_transform(s.coords, s.predicted, s.reference)
        assert out.shape == (70, 1)
        assert np.isfinite(out).all()

    def test_evaluate_grid_returns_surfaces(self, fitted):
        s, est = fitted
        grid = EvaluationGrid.cover_samples(s, target_cells=5)
        surfs = est.evaluate_grid(grid)
        assert [sf.kind.value for sf in surfs] == ["gw_msd", "gw_mae", "gw_rmse", "gw_r"]
        direct = evaluate_surfaces(s, grid, est.kernel_spec_)
        for a, b in zip(surfs, direct):
            assert np.array_equal(a.values, b.values, equal_nan=True)
