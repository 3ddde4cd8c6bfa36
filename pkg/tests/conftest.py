import numpy as np
import pytest

import turbsynth as ts

# Cn2 calibrated so the 500 m / 550 nm spherical-wave coherence diameter
# comes out exactly 0.02 m; keeps derived goldens round.
CN2_R0_20MM = 6.556026143296718e-14


@pytest.fixture
def base_cfg():
    """500 m path, 0.3 m lens at F/8, 5 m/s wind, 40 ms exposure."""
    return ts.OpticalConfig(focal_length=0.3, f_number=8.0, distance=500.0,
                            cn2=CN2_R0_20MM, wind_speed=5.0,
                            exposure_time=0.04)


@pytest.fixture
def textured_image():
    """Smooth random grayscale test image in [0, 1], 48x48."""
    rng = np.random.default_rng(1234)
    img = rng.random((96, 96))
    img = img.reshape(48, 2, 48, 2).mean(axis=(1, 3))
    lo, hi = img.min(), img.max()
    return (img - lo) / (hi - lo)
