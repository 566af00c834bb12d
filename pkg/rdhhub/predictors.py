#! /usr/bin/env python3

import numpy as np
from typing import NamedTuple, Sequence, Tuple

from .image import GrayImage
from .utils.errors import OutOfBounds
from .utils.checks import check_predictors, parse_list
from .utils.config import _PREDICTOR, _DEFAULT_PREDICTORS


class CausalContext(NamedTuple):

    """
    The three causal neighbours of pixel x = (i, j):

        c | b
        --+--
        a | x

    a = (i, j-1), b = (i-1, j), c = (i-1, j-1).
    """

    a: int
    b: int
    c: int


def _med(a: int, b: int, c: int) -> int:
    if c >= max(a, b):
        return min(a, b)
    if c <= min(a, b):
        return max(a, b)
    return a + b - c


def _mean(a: int, b: int, c: int) -> int:
    return (a + b + c) // 3


def _median(a: int, b: int, c: int) -> int:
    ## three values never need the even-count average
    return a + b + c - max(a, b, c) - min(a, b, c)


def _min(a: int, b: int, c: int) -> int:
    return min(a, b, c)


_FUNCS = {
    _PREDICTOR["MED"]: _med,
    _PREDICTOR["MEAN"]: _mean,
    _PREDICTOR["MEDIAN"]: _median,
    _PREDICTOR["MIN"]: _min,
}


class PredictorSet:

    """
    `PredictorSet Class`

    Ordered set of 2-4 distinct predictor kinds, named
    "med", "mean", "median" and "min". Order matters:
    predictor 1 is the first element and wins ties in the
    rule tables. The default set is (med, mean).

    A set of one kind is only built internally, for the
    single-predictor baseline family (`single=True`).
    """

    def __init__(
        self,
        kinds: Sequence[str] = parse_list(_DEFAULT_PREDICTORS),
        single: bool = False,
    ):
        if isinstance(kinds, str):
            kinds = parse_list(kinds)

        kinds = check_predictors(kinds)
        low = 1 if single else 2

        if not low <= len(kinds) <= 4:
            msg = f"Predictor set needs {low} to 4 kinds, got {len(kinds)}"
            raise ValueError(msg)

        self.__kinds = kinds
        self.__funcs = tuple(_FUNCS[kind] for kind in kinds)

    def __repr__(self):
        return f"{self.__class__.__name__}({', '.join(self.__kinds)})"

    def __len__(self):
        return len(self.__kinds)

    def __iter__(self):
        return iter(self.__kinds)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PredictorSet):
            return NotImplemented
        return self.kinds == other.kinds

    def __hash__(self):
        return hash(self.__kinds)

    def predictions(self, ctx: CausalContext) -> Tuple[int, ...]:
        a, b, c = ctx
        return tuple(func(a, b, c) for func in self.__funcs)

    def errors(self, ctx: CausalContext, actual: int) -> Tuple[int, ...]:
        a, b, c = ctx
        return tuple(actual - func(a, b, c) for func in self.__funcs)

    @property
    def kinds(self) -> Tuple[str, ...]:
        return self.__kinds

    @property
    def name(self) -> str:
        return "+".join(self.__kinds)


def context_of(source: GrayImage, i: int, j: int) -> CausalContext:
    if i < 2 or j < 2:
        msg = f"Pixel ({i}, {j}) has no causal context"
        raise OutOfBounds(msg)

    return CausalContext(
        a=source.pixel(i, j - 1),
        b=source.pixel(i - 1, j),
        c=source.pixel(i - 1, j - 1),
    )


def predict(kind: str, ctx: CausalContext) -> int:

    """
    `Predict Function`

    MED:    min(a, b) if c >= max(a, b)
            max(a, b) if c <= min(a, b)
            a + b - c otherwise (not clamped)
    Mean:   floor((a + b + c) / 3)
    Median: middle value of sorted {a, b, c}
    Min:    min(a, b, c)
    """

    func = _FUNCS.get(str(kind).lower())

    if func is None:
        msg = f"Unknown predictor `{kind}`"
        raise ValueError(msg)

    return func(*ctx)


def error_vector(
    pset: PredictorSet,
    source: GrayImage,
    i: int,
    j: int,
    actual: int,
) -> Tuple[int, ...]:
    return pset.errors(context_of(source, i, j), actual)


def prediction_field(kind: str, source: GrayImage) -> np.ndarray:

    """
    `Prediction Field Function`

    Same arithmetic as `predict`, broadcast in a vectorized
    fashion over every pixel with i >= 2 and j >= 2. Returns
    an int32 array of shape (height - 1, width - 1) whose
    entry [r, q] is the prediction of pixel (r + 2, q + 2).

    Only valid when all neighbours come from `source` itself,
    i.e. at embedding time, where the cover is the source.
    """

    arr = source.array.astype(np.int32)
    a = arr[1:, :-1]
    b = arr[:-1, 1:]
    c = arr[:-1, :-1]

    kind = str(kind).lower()
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)

    if kind == _PREDICTOR["MED"]:
        return np.where(c >= hi, lo, np.where(c <= lo, hi, a + b - c))
    if kind == _PREDICTOR["MEAN"]:
        return (a + b + c) // 3
    if kind == _PREDICTOR["MEDIAN"]:
        return a + b + c - np.maximum(hi, c) - np.minimum(lo, c)
    if kind == _PREDICTOR["MIN"]:
        return np.minimum(lo, c)

    msg = f"Unknown predictor `{kind}`"
    raise ValueError(msg)


def error_field(pset: PredictorSet, source: GrayImage) -> np.ndarray:

    """
    Stacked prediction errors of the interior pixels,
    shape (len(pset), height - 1, width - 1).
    """

    actual = source.array[1:, 1:].astype(np.int32)

    return np.stack(
        [actual - prediction_field(kind, source) for kind in pset.kinds]
    )
