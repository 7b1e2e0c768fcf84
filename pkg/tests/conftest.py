import math

import numpy as np
import pytest

from backend.fastapi.app.config import load_config
from backend.fastapi.app.services.imageio.synthetic import synthetic_image


def naive_dft(size):
    """Unitary DFT matrix exp(-2 pi i m n / N) / sqrt(N), entry by entry."""
    out = np.empty((size, size), dtype=np.complex128)
    for m in range(size):
        for n in range(size):
            out[m, n] = complex(math.cos(2 * math.pi * m * n / size), -math.sin(2 * math.pi * m * n / size))
    return out / math.sqrt(size)


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def image64(cfg):
    return synthetic_image(64, cfg.synthetic.seed)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
