import numpy as np
import pytest

TWO_PI = 2.0 * np.pi

# strong-coupling reference constants (half linewidths, rad/s)
G_REF = TWO_PI * 256e3
GC_REF = TWO_PI * 131e3
GA_REF = TWO_PI * 25e3


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
