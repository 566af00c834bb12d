import math

import numpy as np
import pytest

from rdhhub.image import GrayImage
from rdhhub.metrics import bpp, distortion, format_psnr, psnr, theoretical_floor
from rdhhub.utils.errors import DimensionMismatch


class TestPSNR:
    def test_identical(self, textured):
        assert math.isinf(psnr(textured, textured))
        assert format_psnr(psnr(textured, textured)) == "inf"

    def test_one_pixel(self):
        a = GrayImage(np.full((4, 4), 100, dtype=np.uint8))
        arr = a.array.copy()
        arr[2, 3] += 1
        assert psnr(a, GrayImage(arr)) == pytest.approx(60.17, abs=0.01)

    def test_every_pixel(self):
        a = GrayImage(np.full((4, 4), 100, dtype=np.uint8))
        b = GrayImage(np.full((4, 4), 101, dtype=np.uint8))
        assert psnr(a, b) == pytest.approx(48.13, abs=0.01)

    def test_symmetric(self, smooth):
        other = GrayImage(np.clip(smooth.array.astype(int) + 3, 0, 255))
        assert psnr(smooth, other) == psnr(other, smooth)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            psnr(GrayImage(np.zeros((2, 3), dtype=np.uint8)), GrayImage(np.zeros((3, 2), dtype=np.uint8)))

    def test_format(self):
        assert format_psnr(49.6391234) == "49.6391"


class TestFloor:
    @pytest.mark.parametrize(
        "variant, expected",
        [("1bin", 49.89), ("2bin", 45.91), ("3bin", 43.87)],
    )
    def test_values(self, variant, expected):
        assert theoretical_floor(variant) == pytest.approx(expected, abs=0.01)

    def test_unknown(self):
        with pytest.raises(ValueError):
            theoretical_floor("4bin")


class TestDistortion:
    def test_summary(self):
        a = GrayImage(np.full((2, 2), 10, dtype=np.uint8))
        b = GrayImage([[10, 12], [9, 10]])
        summary = distortion(a, b)

        assert summary.max_abs == 2
        assert summary.modified == 2
        assert summary.mse == pytest.approx(5 / 4)

    def test_bpp(self):
        img = GrayImage(np.zeros((4, 8), dtype=np.uint8))
        assert bpp(8, img) == 0.25
