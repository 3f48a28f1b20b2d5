import math

import numpy as np
import pytest

from wavetrain.oscillator import OscillatorParams
from wavetrain.packet import TrainSpec

HALF_PI = 0.5 * math.pi

FIG1 = (OscillatorParams(1.0, 1.0, 0.0, -HALF_PI), TrainSpec(10, -5.0, 40.0))
FIG2 = (OscillatorParams(0.01, 1.0, 0.0, -HALF_PI), TrainSpec(10, 0.0, 40.0))
FIG3 = (OscillatorParams(0.4624, 1.0, 0.0, -HALF_PI), TrainSpec(10, -17.437, 40.0))
COHERENT = (OscillatorParams(1.0, 1.0, 0.0, -HALF_PI), TrainSpec(0, -5.0, 40.0))


def random_params(rng) -> OscillatorParams:
    """Moderate breathing: A, B in [0.5, 1.5], alpha - beta in [0.6, pi - 0.6]."""
    alpha = rng.uniform(0.0, 2.0 * math.pi)
    return OscillatorParams(rng.uniform(0.5, 1.5), rng.uniform(0.5, 1.5), alpha,
                            alpha - rng.uniform(0.6, math.pi - 0.6))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
