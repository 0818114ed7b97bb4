import numpy as np
import pytest

from gwdiag.model import SamplePoint, SampleSet, validate_sample_set


def make_random_samples(seed: int, n: int = 200, noise_sd: float = 15.0,
                        domain: float = 1000.0) -> SampleSet:
    """Generic seeded random sample set (uniform locations, noisy predictions)."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, domain, n)
    y = rng.uniform(0.0, domain, n)
    ref = rng.uniform(0.0, 100.0, n)
    pred = ref + rng.normal(0.0, noise_sd, n)
    return validate_sample_set(
        [SamplePoint(f"s{j}", float(x[j]), float(y[j]), float(pred[j]), float(ref[j]))
         for j in range(n)]
    )


def make_line_samples(deviations, xs=None) -> SampleSet:
    """Points on the x-axis with prescribed deviations (reference fixed at 10)."""
    if xs is None:
        xs = list(range(len(deviations)))
    pts = [SamplePoint(f"p{j}", float(xs[j]), 0.0, 10.0 + float(d), 10.0)
           for j, d in enumerate(deviations)]
    return SampleSet(tuple(pts))


@pytest.fixture
def random_samples() -> SampleSet:
    return make_random_samples(seed=42)


@pytest.fixture
def line_samples() -> SampleSet:
    # four points at x = 0, 1, 2, 3 with deviations 1, 3, -2, 5
    return make_line_samples([1.0, 3.0, -2.0, 5.0])
