"""Seeded synthetic sample scenarios for demos and calibration tests.

Sample locations are drawn without replacement from the cells of a fixed
40x40 lattice over a square planar domain, mirroring validation samples
collected on a raster product's own grid. Lattice sampling bounds the minimum
point spacing, which keeps inverse-distance-squared weights well behaved and
structurally rules out coincident points. A seed fully determines the
locations, the values and the emitted CSV bytes.

Scenarios
---------
null
    Spatially random errors: predicted = reference + noise.
cluster
    One coherent high-error blob: inside a planted disc centered on the
    domain (radius 15% of its side) the noise is inflated fivefold and
    rectified to over-prediction, so both the error magnitude and the signed
    deviations cluster there.
bias
    Constant under-prediction: predicted = reference + noise - 15.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidConfigError, UnknownScenarioError
from .model import SamplePoint, SampleSet, validate_sample_set

__all__ = [
    "SCENARIOS",
    "DOMAIN_SIZE",
    "LATTICE_SIDE",
    "CLUSTER_CENTER",
    "CLUSTER_RADIUS",
    "NOISE_SD",
    "CLUSTER_NOISE_FACTOR",
    "BIAS_SHIFT",
    "DEFAULT_SYNTH_N",
    "generate_samples",
    "cluster_mask",
]

SCENARIOS = ("null", "cluster", "bias")

DOMAIN_SIZE = 1000.0
LATTICE_SIDE = 40
CLUSTER_CENTER = (DOMAIN_SIZE / 2.0, DOMAIN_SIZE / 2.0)
CLUSTER_RADIUS = 0.15 * DOMAIN_SIZE
NOISE_SD = 10.0
CLUSTER_NOISE_FACTOR = 5.0
BIAS_SHIFT = -15.0
DEFAULT_SYNTH_N = 550


def cluster_mask(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """True where (x, y) lies inside the planted high-error disc."""
    dx = np.asarray(x, dtype=np.float64) - CLUSTER_CENTER[0]
    dy = np.asarray(y, dtype=np.float64) - CLUSTER_CENTER[1]
    return dx * dx + dy * dy <= CLUSTER_RADIUS * CLUSTER_RADIUS


def generate_samples(scenario: str, n: int = DEFAULT_SYNTH_N, seed: int = 0) -> SampleSet:
    """Generate one validated synthetic sample set."""
    if scenario not in SCENARIOS:
        raise UnknownScenarioError(scenario, SCENARIOS)
    n_cells = LATTICE_SIDE * LATTICE_SIDE
    if not 2 <= n <= n_cells:
        raise InvalidConfigError(f"n must lie in [2, {n_cells}], got {n}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    pitch = DOMAIN_SIZE / LATTICE_SIDE
    cells = rng.choice(n_cells, size=n, replace=False)
    x = (cells % LATTICE_SIDE + 0.5) * pitch
    y = (cells // LATTICE_SIDE + 0.5) * pitch
    reference = rng.uniform(0.0, 100.0, n)
    noise = rng.normal(0.0, NOISE_SD, n)
    if scenario == "null":
        predicted = reference + noise
    elif scenario == "cluster":
        inflated = CLUSTER_NOISE_FACTOR * np.abs(noise)
        predicted = reference + np.where(cluster_mask(x, y), inflated, noise)
    else:
        predicted = reference + noise + BIAS_SHIFT
    width = max(4, len(str(n)))
    points = [
        SamplePoint(f"p{j + 1:0{width}d}", float(x[j]), float(y[j]),
                    float(predicted[j]), float(reference[j]))
        for j in range(n)
    ]
    return validate_sample_set(points)
