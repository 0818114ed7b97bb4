"""Geographically weighted error diagnostics for point-sampled raster predictions.

Computes global and locally (kernel-)weighted error diagnostics - mean signed
deviation, mean absolute error, root mean squared error and Pearson
correlation - between predicted and reference values at point locations, maps
the local diagnostics onto raster surfaces, and flags unusual error clusters
with Monte Carlo permutation tests and Moran's I.
"""

__version__ = "0.1.0"

from .errors import (
    CoincidentPointsError,
    DegenerateBandwidthError,
    DuplicateIdError,
    EmptySupportError,
    GridTooLargeError,
    GwdiagError,
    InvalidConfigError,
    MissingColumnError,
    NonFiniteError,
    NonPositiveBandwidthError,
    NumericalBlowupError,
    ParseError,
    TooFewPointsError,
    UnknownScenarioError,
    WrongBandwidthKindError,
    ZeroVarianceError,
)
from .model import (
    ALL_KINDS,
    AdaptiveCount,
    AdaptiveFraction,
    DiagnosticKind,
    DiagnosticSurface,
    EvaluationGrid,
    FixedBandwidth,
    KernelSpec,
    SamplePoint,
    SampleSet,
    resolve_bandwidth_count,
    validate_sample_set,
)
from .spatial import (
    SpatialIndex,
    WeightVector,
    bisquare_weight,
    bisquare_weights,
    euclidean_distance,
    resolve_local_bandwidth,
    weight_vector,
)
from .diagnostics import (
    DEFAULT_SWEEP_FRACTIONS,
    GlobalReport,
    LocalDiagnostics,
    bandwidth_sweep,
    evaluate_surfaces,
    global_diagnostics,
    gw_covariance,
    gw_mae,
    gw_mean,
    gw_msd,
    gw_r,
    gw_rmse,
    gw_sd,
    local_diagnostics,
)
from .inference import (
    MoranReport,
    PermutationConfig,
    PermutationReport,
    local_permutation_test,
    morans_i,
    morans_i_test,
    permutation_rng,
    permute_pairs,
    pseudo_p_value,
)
from .io import (
    SampleFileFormat,
    read_samples,
    read_surface,
    write_reports,
    write_samples,
    write_surface,
)
from .estimator import GwErrorDiagnostics, check_coordinates, check_value_array
from .synth import SCENARIOS, generate_samples

__all__ = [
    "__version__",
    # errors
    "GwdiagError", "NonFiniteError", "DuplicateIdError", "TooFewPointsError",
    "WrongBandwidthKindError", "NonPositiveBandwidthError", "DegenerateBandwidthError",
    "EmptySupportError", "NumericalBlowupError", "GridTooLargeError",
    "CoincidentPointsError", "ZeroVarianceError", "InvalidConfigError",
    "MissingColumnError", "ParseError", "UnknownScenarioError",
    # model
    "SamplePoint", "SampleSet", "validate_sample_set", "KernelSpec",
    "FixedBandwidth", "AdaptiveFraction", "AdaptiveCount", "resolve_bandwidth_count",
    "DiagnosticKind", "ALL_KINDS", "EvaluationGrid", "DiagnosticSurface",
    # spatial
    "SpatialIndex", "WeightVector", "euclidean_distance", "bisquare_weight",
    "bisquare_weights", "resolve_local_bandwidth", "weight_vector",
    # diagnostics
    "GlobalReport", "LocalDiagnostics", "global_diagnostics", "gw_msd", "gw_mae",
    "gw_rmse", "gw_mean", "gw_sd", "gw_covariance", "gw_r", "local_diagnostics",
    "evaluate_surfaces", "bandwidth_sweep", "DEFAULT_SWEEP_FRACTIONS",
    # inference
    "PermutationConfig", "PermutationReport", "MoranReport", "permutation_rng",
    "permute_pairs", "pseudo_p_value", "local_permutation_test", "morans_i",
    "morans_i_test",
    # io
    "SampleFileFormat", "read_samples", "write_samples", "write_surface",
    "read_surface", "write_reports",
    # estimator
    "GwErrorDiagnostics", "check_coordinates", "check_value_array",
    # synth
    "generate_samples", "SCENARIOS",
]
