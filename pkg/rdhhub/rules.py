#! /usr/bin/env python3

import numpy as np
from functools import lru_cache
from typing import FrozenSet, Optional, Sequence, Tuple, Union
from pydantic import BaseModel, validator, root_validator

from .predictors import PredictorSet
from .utils.errors import MissingBit, InconsistentState
from .utils.checks import (
    check_family,
    check_variant,
    check_predictors,
    parse_list,
)
from .utils.config import (
    _DEFAULT_FAMILY,
    _DEFAULT_VARIANT,
    _DEFAULT_PREDICTORS,
    _ERROR_CLAMP,
    _PREDICTOR,
    _VARIANT,
    _FAMILY,
    _ACTION,
    _SIDES,
    _MAXVAL,
)

Sides = Tuple[Tuple[int, int], Tuple[int, int]]


class Algorithm(BaseModel):

    """
    `Algorithm Model`

    Identity of a codec configuration:

    - `family`: "mpe2" (dual/multi predictor) or "mpe"
      (single MED predictor baseline).
    - `variant`: "1bin", "2bin" or "3bin"; the baseline
      exists in 2bin and 3bin only.
    - `predictors`: ordered predictor kinds. MPE2 takes 2-4
      of them (more than 2 only with 1bin); the baseline is
      always ("med",).

    Its textual descriptor, e.g. "mpe2-1bin-med+mean", is
    what CSV rows, logs and the command line use, see
    `descriptor` and `Algorithm.parse`.
    """

    family: str = _DEFAULT_FAMILY
    variant: str = _DEFAULT_VARIANT
    predictors: Tuple[str, ...] = parse_list(_DEFAULT_PREDICTORS)

    class Config:
        frozen = True

    @validator("family")
    def _family(cls, value):
        return check_family(value)

    @validator("variant")
    def _variant(cls, value):
        return check_variant(value)

    @validator("predictors", pre=True)
    def _predictors(cls, value):
        if isinstance(value, str):
            value = parse_list(value)
        return check_predictors(value)

    @root_validator(skip_on_failure=True)
    def _combination(cls, values):
        family = values["family"]
        variant = values["variant"]
        kinds = values["predictors"]

        if family == _FAMILY["MPE"]:
            if variant == _VARIANT["ONE"]:
                msg = "Baseline MPE supports 2bin and 3bin only"
                raise ValueError(msg)
            if kinds != (_PREDICTOR["MED"],):
                values["predictors"] = (_PREDICTOR["MED"],)
            return values

        if not 2 <= len(kinds) <= 4:
            msg = f"MPE2 needs 2 to 4 predictors, got {len(kinds)}"
            raise ValueError(msg)

        if len(kinds) > 2 and variant != _VARIANT["ONE"]:
            msg = "More than two predictors requires the 1bin variant"
            raise ValueError(msg)

        return values

    @classmethod
    def parse(cls, descriptor: str) -> "Algorithm":
        """
        "mpe2-1bin-med+mean" | "mpe-2bin-med" -> Algorithm
        """
        parts = str(descriptor).strip().lower().split("-")

        if len(parts) != 3:
            msg = f"Bad algorithm descriptor `{descriptor}`"
            raise ValueError(msg)

        family, variant, kinds = parts

        return cls(
            family=family,
            variant=variant,
            predictors=tuple(kinds.split("+")),
        )

    @property
    def descriptor(self) -> str:
        return f"{self.family}-{self.variant}-{'+'.join(self.predictors)}"

    @property
    def pset(self) -> PredictorSet:
        return PredictorSet(self.predictors, single=self.family == _FAMILY["MPE"])

    @property
    def sides(self) -> Sides:
        return _SIDES[(self.family, self.variant)]

    @property
    def delta_range(self) -> Tuple[int, int]:
        (_, pos), (_, neg) = self.sides
        return -neg, pos

    @property
    def guard_set(self) -> FrozenSet[int]:
        return _guards(self.sides)


class PixelAction:

    """
    `PixelAction Class`

    Outcome of classifying one pixel:

    - EMBED(bit, delta): the pixel carries `bit`.
    - SHIFT(delta): the pixel is moved out of the way of the
      embedding bins.
    - SKIP: bipolar errors, the pixel is left as is.
    - GUARD: the cover value could leave [0, 255] under some
      delta; the pixel is left as is and its position goes
      into the overhead list.

    Every prediction error of the pixel moves by the same
    `delta`, since PEk = x - Pk for every k.
    """

    def __init__(
        self,
        kind: str,
        delta: int = 0,
        bit: Optional[int] = None,
    ):
        if kind not in _ACTION.values():
            msg = f"Unknown action `{kind}`"
            raise ValueError(msg)

        if kind in (_ACTION["SKIP"], _ACTION["GUARD"]) and delta:
            msg = f"{kind} never moves the pixel"
            raise ValueError(msg)

        self.__kind = kind
        self.__delta = delta
        self.__bit = bit

    def __repr__(self):
        if self.__kind == _ACTION["EMBED"]:
            return f"{self.__class__.__name__}<{self.__kind}({self.__bit}, {self.__delta:+d})>"
        if self.__kind == _ACTION["SHIFT"]:
            return f"{self.__class__.__name__}<{self.__kind}({self.__delta:+d})>"
        return f"{self.__class__.__name__}<{self.__kind}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PixelAction):
            return NotImplemented
        return (self.kind, self.delta, self.bit) == (other.kind, other.delta, other.bit)

    def __hash__(self):
        return hash((self.__kind, self.__delta, self.__bit))

    @classmethod
    def embed(cls, bit: int, delta: int) -> "PixelAction":
        return cls(_ACTION["EMBED"], delta, bit)

    @classmethod
    def shift(cls, delta: int) -> "PixelAction":
        return cls(_ACTION["SHIFT"], delta)

    @classmethod
    def skip(cls) -> "PixelAction":
        return cls(_ACTION["SKIP"])

    @classmethod
    def guard(cls) -> "PixelAction":
        return cls(_ACTION["GUARD"])

    @property
    def kind(self) -> str:
        return self.__kind

    @property
    def delta(self) -> int:
        return self.__delta

    @property
    def bit(self) -> Optional[int]:
        return self.__bit


def _guards(sides: Sides) -> FrozenSet[int]:
    (_, pos), (_, neg) = sides
    return frozenset(
        v for v in range(_MAXVAL + 1) if v - neg < 0 or v + pos > _MAXVAL
    )


def _sides_of(
    variant: Union[str, Algorithm],
    family: str = _FAMILY["MPE2"],
) -> Sides:
    if isinstance(variant, Algorithm):
        return variant.sides
    return _SIDES[(check_family(family), check_variant(variant))]


def guard_set(variant: str) -> FrozenSet[int]:

    """
    Cover intensities left out of the scan by the MPE2
    variants: 1bin {0, 255}, 2bin {0, 1, 255} and 3bin
    {0, 1, 254, 255}. A value is guarded when the largest
    negative or positive delta of the variant would push
    it out of [0, 255].
    """

    return _guards(_sides_of(variant))


def _check_length(variant: str, family: str, errors: Sequence[int]):
    size = len(errors)

    if family == _FAMILY["MPE"]:
        ok = size == 1
    elif variant == _VARIANT["ONE"]:
        ok = 2 <= size <= 4
    else:
        ok = size == 2

    if not ok:
        msg = f"{size} errors do not fit {family} {variant}"
        raise ValueError(msg)


def _locate(sides: Sides, errors: Sequence[int]):

    """
    Places an error vector on one side of the rule table.

    Returns None for a bipolar vector (strictly positive and
    strictly negative errors at once). Otherwise returns
    (sign, t, offset, bins) where sign is +1 when no error is
    negative (an all-zero vector counts as positive), t is
    the smallest |error|, and (offset, bins) describe the
    embedding bins of that side: t in [offset, offset + bins)
    carries one bit, larger t gets shifted by `bins`.
    """

    pos = any(e > 0 for e in errors)
    neg = any(e < 0 for e in errors)

    if pos and neg:
        return None

    sign = -1 if neg else 1
    offset, bins = sides[0] if sign > 0 else sides[1]

    return sign, min(abs(e) for e in errors), offset, bins


def _embed(sides: Sides, errors: Sequence[int], next_bit: Optional[int]) -> PixelAction:
    located = _locate(sides, errors)

    if located is None:
        return PixelAction.skip()

    sign, t, offset, bins = located

    if t < offset:
        return PixelAction.skip()

    if t < offset + bins:
        if next_bit is None:
            msg = f"Embeddable errors {tuple(errors)} but no bit left"
            raise MissingBit(msg)
        bit = int(next_bit)
        if bit not in (0, 1):
            msg = f"Bit must be 0 or 1, got {next_bit}"
            raise ValueError(msg)
        return PixelAction.embed(bit, sign * (t - offset + bit))

    return PixelAction.shift(sign * bins)


def _extract(sides: Sides, errors: Sequence[int]) -> Tuple[Optional[int], int]:
    located = _locate(sides, errors)

    if located is None:
        return None, 0

    sign, t, offset, bins = located

    if t < offset:
        bit, delta = None, 0
    elif t < offset + 2 * bins:
        bit = (t - offset) % 2
        delta = sign * ((t - offset) // 2 + bit)
    else:
        bit, delta = None, sign * bins

    ## the origin must classify back to the same action
    origin = tuple(e - delta for e in errors)
    action = _embed(sides, origin, 0 if bit is None else bit)

    if bit is None:
        expected = PixelAction.skip() if not delta else PixelAction.shift(delta)
    else:
        expected = PixelAction.embed(bit, delta)

    if action != expected:
        msg = f"Stego errors {tuple(errors)} unreachable by any embedding"
        raise InconsistentState(msg)

    return bit, -delta


def classify_embed(
    variant: Union[str, Algorithm],
    errors: Sequence[int],
    next_bit: Optional[int] = None,
    family: str = _FAMILY["MPE2"],
) -> PixelAction:

    """
    `Embedding Rule Function`

    Maps the cover prediction errors of a (non-guard) pixel
    to a `PixelAction`. For two predictors (e1, e2) and the
    1bin variant the first matching row wins:

        e1 = 0 and e2 >= 0   bit 0 -> 0, bit 1 -> +1
        e2 = 0 and e1 >  0   bit 0 -> 0, bit 1 -> +1
        e1 = 0 and e2 <  0   bit 0 -> 0, bit 1 -> -1
        e2 = 0 and e1 <  0   bit 0 -> 0, bit 1 -> -1
        e1 > 0 and e2 >  0   shift +1
        e1 < 0 and e2 <  0   shift -1
        opposite signs       skip

    2bin adds the -1 bin (-1/-2 deltas, shift -2) and 3bin
    the +1 bin as well. All variants, the single predictor
    baseline and the 3-4 predictor sets follow one rule, see
    `_locate`: the bin index is the smallest |error| of a
    unipolar vector.

    `variant` may be an `Algorithm`, in which case `family`
    is ignored. MissingBit is raised when the position can
    carry a bit and `next_bit` is None.
    """

    if isinstance(variant, Algorithm):
        family, name = variant.family, variant.variant
    else:
        family, name = check_family(family), check_variant(variant)

    sides = _sides_of(variant, family)
    _check_length(name, family, errors)

    return _embed(sides, tuple(int(e) for e in errors), next_bit)


def classify_extract(
    variant: Union[str, Algorithm],
    errors: Sequence[int],
    family: str = _FAMILY["MPE2"],
) -> Tuple[Optional[int], int]:

    """
    `Extraction Rule Function`

    Left inverse of `classify_embed` composed with the pixel
    update: from the errors of a stego pixel (predicted from
    already restored neighbours) returns (bit or None,
    restore_delta). Stego errors no embedding can produce,
    e.g. (-1, -1) under 1bin, raise InconsistentState.
    """

    if isinstance(variant, Algorithm):
        family, name = variant.family, variant.variant
    else:
        family, name = check_family(family), check_variant(variant)

    sides = _sides_of(variant, family)
    _check_length(name, family, errors)

    return _lookup(sides, tuple(int(e) for e in errors))


@lru_cache(maxsize=None)
def _cached(sides: Sides, errors: Tuple[int, ...]) -> Tuple[Optional[int], int]:
    return _extract(sides, errors)


def _lookup(sides: Sides, errors: Tuple[int, ...]) -> Tuple[Optional[int], int]:

    """
    Memoized `_extract`. Errors are clamped to +/- _ERROR_CLAMP
    first: rule outcomes only depend on signs, zeros and the
    smallest magnitude up to 2 * bins + offset, so clamping
    keeps the answer and bounds the cache.
    """

    clamp = _ERROR_CLAMP
    key = tuple(clamp if e > clamp else -clamp if e < -clamp else e for e in errors)

    return _cached(sides, key)


def classify_field(sides: Sides, field: np.ndarray) -> Tuple[np.ndarray, ...]:

    """
    `Vectorized Rule Function`

    Applies `_locate` to a stacked error field of shape
    (n, rows, cols) at once. Returns

    - `embeddable`: bool mask of positions carrying a bit,
    - `shifted`: bool mask of shifted positions,
    - `base`: signed delta of embeddable positions for bit
      0 (add `sign` for bit 1), or the shift delta,
    - `sign`: +1 / -1 side of each position.
    """

    pos = (field > 0).any(axis=0)
    neg = (field < 0).any(axis=0)
    unipolar = ~(pos & neg)

    sign = np.where(neg, -1, 1)
    t = np.abs(field).min(axis=0)

    (opos, bpos), (oneg, bneg) = sides
    offset = np.where(sign > 0, opos, oneg)
    bins = np.where(sign > 0, bpos, bneg)

    embeddable = unipolar & (t >= offset) & (t < offset + bins)
    shifted = unipolar & (t >= offset + bins)

    base = np.where(embeddable, sign * (t - offset), 0)
    base = np.where(shifted, sign * bins, base)

    return embeddable, shifted, base, sign


class EmbedMeta(BaseModel):

    """
    `EmbedMeta Model`

    Side information an extractor needs besides the stego
    image, kept out of band in a sidecar file:

    - `algorithm` and the raster size,
    - `payload_bits`, the number of embedded bits,
    - `last_index`, 0-based linear index of the pixel that
      took the final bit; width x height (one past the end)
      when nothing was embedded,
    - `overhead`, ascending linear indices of the guarded
      pixels met before `last_index`.
    """

    algorithm: Algorithm
    width: int
    height: int
    payload_bits: int
    last_index: int
    overhead: Tuple[int, ...] = ()

    class Config:
        frozen = True

    @validator("width", "height")
    def _dimension(cls, value):
        if value < 1:
            msg = "Dimensions must be >= 1"
            raise ValueError(msg)
        return value

    @validator("payload_bits")
    def _payload(cls, value):
        if value < 0:
            msg = "payload_bits must be >= 0"
            raise ValueError(msg)
        return value

    @root_validator(skip_on_failure=True)
    def _indices(cls, values):
        width, height = values["width"], values["height"]
        size = width * height
        last = values["last_index"]

        def interior(index: int) -> bool:
            return 0 <= index < size and index // width >= 1 and index % width >= 1

        if last == size:
            if values["payload_bits"]:
                msg = "Empty-payload sentinel with a non-empty payload"
                raise ValueError(msg)
        elif not interior(last):
            msg = f"last_index {last} does not address an interior pixel"
            raise ValueError(msg)
        elif not values["payload_bits"]:
            msg = "An empty payload must use the sentinel last_index"
            raise ValueError(msg)

        overhead = tuple(values["overhead"])
        for index in overhead:
            if not interior(index):
                msg = f"Overhead index {index} does not address an interior pixel"
                raise ValueError(msg)

        if any(b <= a for a, b in zip(overhead, overhead[1:])):
            msg = "Overhead indices must be strictly increasing"
            raise ValueError(msg)

        values["overhead"] = overhead
        return values

    @property
    def sentinel(self) -> int:
        return self.width * self.height

    @property
    def empty(self) -> bool:
        return self.last_index == self.sentinel
