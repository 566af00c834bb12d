import numpy as np
import pytest

from rdhhub.image import GrayImage
from rdhhub.rules import Algorithm

## every codec configuration the toolkit ships
ALGORITHMS = (
    "mpe2-1bin-med+mean",
    "mpe2-2bin-med+mean",
    "mpe2-3bin-med+mean",
    "mpe2-1bin-mean+med",
    "mpe2-2bin-med+median",
    "mpe-2bin-med",
    "mpe-3bin-med",
    "mpe2-1bin-med+mean+median",
    "mpe2-1bin-med+mean+median+min",
)


def make_image(width: int, height: int, seed: int = 0, noise: int = 2, low: int = 40) -> GrayImage:
    """
    Smooth diagonal ramp plus seeded uniform noise, a
    stand-in for a natural image.
    """
    rng = np.random.default_rng(seed)
    rows = np.arange(height)[:, None] * 1.5
    cols = np.arange(width)[None, :] * 1.0
    base = low + rows + cols + rng.integers(-noise, noise + 1, size=(height, width))
    return GrayImage(np.clip(base, 0, 255).astype(np.uint8))


def make_saturated(seed: int = 0) -> GrayImage:
    """
    Ramp with blocks at and next to both ends of the
    intensity range, so every guard value shows up.
    """
    rng = np.random.default_rng(seed)
    arr = make_image(24, 24, seed).array.copy()
    arr[3:8, 3:8] = 0
    arr[3:8, 12:16] = 255
    arr[10:14, 3:7] = 1
    arr[10:14, 12:16] = 254
    arr[16:21, 3:12] = rng.choice([0, 1, 2, 253, 254, 255], size=(5, 9))
    return GrayImage(arr)


@pytest.fixture
def smooth():
    return make_image(32, 24, seed=1)


@pytest.fixture
def textured():
    return make_image(24, 24, seed=2, noise=12, low=60)


@pytest.fixture
def saturated():
    return make_saturated(seed=3)


@pytest.fixture
def constant():
    return GrayImage(np.full((3, 3), 128, dtype=np.uint8))


@pytest.fixture(params=ALGORITHMS)
def algorithm(request):
    return Algorithm.parse(request.param)
