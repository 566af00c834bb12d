#! /usr/bin/env python3

import math
import numpy as np
from typing import NamedTuple

from .image import GrayImage
from .utils.checks import check_variant
from .utils.errors import DimensionMismatch
from .utils.config import _MAXVAL, _VARIANT

## mean squared delta of a saturated scan, per variant
_FLOOR_MSE = {
    _VARIANT["ONE"]: (1 ** 2 + 1 ** 2) / 3,
    _VARIANT["TWO"]: (1 ** 2 + 2 ** 2) / 3,
    _VARIANT["THREE"]: (2 ** 2 + 2 ** 2) / 3,
}


class Distortion(NamedTuple):
    max_abs: int
    modified: int
    mse: float


def _check_pair(a: GrayImage, b: GrayImage):
    if not isinstance(a, GrayImage) or not isinstance(b, GrayImage):
        msg = "Both args must be GrayImage instances"
        raise TypeError(msg)

    if a.shape != b.shape:
        msg = f"Cannot compare {a.width}x{a.height} with {b.width}x{b.height}"
        raise DimensionMismatch(msg)


def mse(a: GrayImage, b: GrayImage) -> float:
    _check_pair(a, b)
    diff = a.array.astype(np.int64) - b.array.astype(np.int64)
    return float(np.mean(diff ** 2))


def psnr(a: GrayImage, b: GrayImage) -> float:

    """
    `PSNR Function`

    10 * log10(255^2 / MSE), MSE being the mean squared
    pixel difference. Identical images give math.inf.
    Symmetric in its arguments.
    """

    error = mse(a, b)

    if error == 0:
        return math.inf

    return 10 * math.log10(_MAXVAL ** 2 / error)


def theoretical_floor(variant: str) -> float:

    """
    `Theoretical Floor Function`

    Worst-case PSNR of a saturated embedding, assuming
    each of the three rule outcomes (keep, move by the
    small delta, move by the large delta) is equally
    likely:

        1bin: 10 * log10(255^2 / ((1 + 1) / 3))    ~ 49.89 dB
        2bin: 10 * log10(255^2 / ((1 + 4) / 3))    ~ 45.91 dB
        3bin: 10 * log10(255^2 / ((4 + 4) / 3))    ~ 43.87 dB
    """

    return 10 * math.log10(_MAXVAL ** 2 / _FLOOR_MSE[check_variant(variant)])


def distortion(cover: GrayImage, stego: GrayImage) -> Distortion:
    _check_pair(cover, stego)

    diff = np.abs(cover.array.astype(np.int64) - stego.array.astype(np.int64))

    return Distortion(
        max_abs=int(diff.max()),
        modified=int(np.count_nonzero(diff)),
        mse=float(np.mean(diff ** 2)),
    )


def bpp(bits: int, img: GrayImage) -> float:
    """
    Embedding rate, payload bits per pixel.
    """
    return bits / len(img)


def format_psnr(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.4f}"
