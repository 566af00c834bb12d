#! /usr/bin/env python3

import logging
import numpy as np
from collections import OrderedDict
from typing import Dict, NamedTuple, Optional, Sequence, Tuple, Union

from .image import GrayImage
from .codec import BitStream, pack_bits, unpack_bits
from .predictors import PredictorSet, error_field
from .rules import (
    Algorithm,
    EmbedMeta,
    classify_field,
    guard_set,
    _lookup,
)
from .utils.errors import (
    ImageTooSmall,
    InconsistentState,
    MetaMismatch,
    PayloadExceedsCapacity,
    PayloadShortfall,
)
from .utils.config import _MAXVAL, _POLARITY, _VARIANT

logger = logging.getLogger(__name__)


class Plan(NamedTuple):

    """
    Per-position classification of a cover's interior,
    flattened in raster order over the (height - 1) x
    (width - 1) scan grid.
    """

    embeddable: np.ndarray
    shifted: np.ndarray
    guarded: np.ndarray
    base: np.ndarray
    sign: np.ndarray


class EmbedOutcome:

    """
    `EmbedOutcome Class`

    What `embed` hands back: the stego image, the sidecar
    metadata needed to undo it, the number of embedded bits
    and, for reporting, the cover's full capacity.
    """

    def __init__(
        self,
        stego: GrayImage,
        meta: EmbedMeta,
        capacity: int,
    ):
        self.__stego = stego
        self.__meta = meta
        self.__capacity = capacity

    def __repr__(self):
        return (
            f"{self.__class__.__name__}<{self.__meta.algorithm.descriptor}, "
            f"Bits: {self.bits_embedded}/{self.__capacity}, "
            f"L: {self.__meta.last_index}>"
        )

    @property
    def stego(self) -> GrayImage:
        return self.__stego

    @property
    def meta(self) -> EmbedMeta:
        return self.__meta

    @property
    def bits_embedded(self) -> int:
        return self.__meta.payload_bits

    @property
    def capacity(self) -> int:
        return self.__capacity


def _check_size(img: GrayImage):
    if not isinstance(img, GrayImage):
        msg = "Image must be a GrayImage"
        raise TypeError(msg)

    if img.width < 2 or img.height < 2:
        msg = f"Image {img.width}x{img.height} is smaller than 2x2"
        raise ImageTooSmall(msg)


def _check_algorithm(alg: Algorithm):
    if not isinstance(alg, Algorithm):
        msg = "Arg `alg` must be an Algorithm"
        raise TypeError(msg)


def plan(alg: Algorithm, cover: GrayImage) -> Plan:

    """
    `Embedding Plan Function`

    Classifies every scan position of `cover` in a vectorized
    fashion. Classification at embedding time only reads the
    cover's own causal neighbours, so the plan, and hence the
    capacity, does not depend on the payload.
    """

    _check_algorithm(alg)
    _check_size(cover)

    field = error_field(alg.pset, cover)
    embeddable, shifted, base, sign = classify_field(alg.sides, field)

    values = cover.array[1:, 1:]
    guarded = np.isin(values, sorted(alg.guard_set))

    embeddable = embeddable & ~guarded
    shifted = shifted & ~guarded
    base = np.where(guarded, 0, base)

    return Plan(
        embeddable=embeddable.ravel(),
        shifted=shifted.ravel(),
        guarded=guarded.ravel(),
        base=base.ravel(),
        sign=sign.ravel(),
    )


def _to_linear(flat: np.ndarray, width: int) -> np.ndarray:
    """
    Scan grid index -> 0-based linear index in the image.
    """
    return (flat // (width - 1) + 1) * width + flat % (width - 1) + 1


def _payload_bits(payload: Union[BitStream, Sequence[int], np.ndarray]) -> np.ndarray:
    if isinstance(payload, BitStream):
        return unpack_bits(payload).astype(np.int64)
    return np.asarray(unpack_bits(pack_bits(payload)), dtype=np.int64)


def capacity(alg: Algorithm, cover: GrayImage) -> int:
    return int(plan(alg, cover).embeddable.sum())


def embed(
    alg: Algorithm,
    cover: GrayImage,
    payload: Union[BitStream, Sequence[int], np.ndarray],
) -> EmbedOutcome:

    """
    `Embed Function`

    Hides `payload` in `cover`, scanning rows 2..height and,
    within a row, columns 2..width:

    1) guarded pixels stay as they are and their positions
       go into the overhead list;
    2) every other pixel moves by the delta of its rule
       (embed, shift or skip), errors computed against the
       cover's causal context;
    3) once the last bit is in, that pixel becomes L and
       everything after it is copied from the cover.

    The first row and column are never touched. An empty
    payload leaves the cover as is, with the sentinel L.
    """

    layout = plan(alg, cover)
    bits = _payload_bits(payload)
    size = len(bits)
    width, height = cover.width, cover.height

    positions = np.flatnonzero(layout.embeddable)
    room = len(positions)

    if size > room:
        msg = f"Payload of {size} bits exceeds capacity of {room} bits"
        raise PayloadExceedsCapacity(msg)

    if not size:
        meta = EmbedMeta(
            algorithm=alg,
            width=width,
            height=height,
            payload_bits=0,
            last_index=width * height,
        )
        return EmbedOutcome(GrayImage(cover.array), meta, room)

    last = positions[size - 1]
    used = positions[:size]

    delta = np.where(layout.embeddable | layout.shifted, layout.base, 0)
    delta[used] += layout.sign[used] * bits
    delta[last + 1:] = 0

    arr = cover.array.astype(np.int32)
    arr[1:, 1:] += delta.reshape(height - 1, width - 1)

    if arr.min() < 0 or arr.max() > _MAXVAL:
        msg = "Stego pixel out of [0, 255], guard set too small"
        raise InconsistentState(msg)

    guards = np.flatnonzero(layout.guarded[: last + 1])

    meta = EmbedMeta(
        algorithm=alg,
        width=width,
        height=height,
        payload_bits=size,
        last_index=int(_to_linear(last, width)),
        overhead=tuple(int(i) for i in _to_linear(guards, width)),
    )

    logger.debug(
        "%s embedded %d/%d bits, shifted %d, guarded %d, L=%d",
        alg.descriptor,
        size,
        room,
        int(layout.shifted[: last + 1].sum()),
        len(guards),
        meta.last_index,
    )

    return EmbedOutcome(GrayImage(arr), meta, room)


def extract(
    alg: Algorithm,
    stego: GrayImage,
    meta: EmbedMeta,
) -> Tuple[BitStream, GrayImage]:

    """
    `Extract Function`

    Restores the hidden bits and the cover from a stego image
    and its sidecar. The scan runs in the embedding order up
    to and including L; predictions come from the already
    restored neighbours, which equal the cover's, so the
    rule sees the very errors it saw at embedding time.
    Overhead positions and everything after L are copied.

    This pass is inherently sequential (each pixel needs its
    restored left and upper neighbours) and runs over plain
    Python lists.
    """

    _check_algorithm(alg)
    _check_size(stego)

    if meta.algorithm != alg:
        msg = f"Sidecar algorithm {meta.algorithm.descriptor} is not {alg.descriptor}"
        raise MetaMismatch(msg)

    if (meta.width, meta.height) != (stego.width, stego.height):
        msg = (
            f"Sidecar size {meta.width}x{meta.height} disagrees with "
            f"image {stego.width}x{stego.height}"
        )
        raise MetaMismatch(msg)

    if meta.empty:
        return pack_bits([]), GrayImage(stego.array)

    width = stego.width
    sides = alg.sides
    errors = alg.pset.errors
    overhead = set(meta.overhead)
    wanted = meta.payload_bits
    last_row, last_col = divmod(meta.last_index, width)

    rows = stego.array.tolist()
    bits = []

    for i in range(1, last_row + 1):
        row, up = rows[i], rows[i - 1]
        stop = width if i < last_row else last_col + 1

        for j in range(1, stop):
            if i * width + j in overhead:
                continue

            value = row[j]
            bit, restore = _lookup(sides, errors((row[j - 1], up[j], up[j - 1]), value))
            value += restore

            if not 0 <= value <= _MAXVAL:
                msg = f"Restored pixel ({i + 1}, {j + 1}) out of range"
                raise InconsistentState(msg)

            row[j] = value

            if bit is not None:
                bits.append(bit)
                if len(bits) > wanted:
                    msg = f"More than {wanted} bits before L, wrong sidecar or stego"
                    raise InconsistentState(msg)

    if len(bits) < wanted:
        msg = f"Reached L with {len(bits)} of {wanted} bits"
        raise PayloadShortfall(msg)

    logger.debug("%s extracted %d bits", alg.descriptor, wanted)

    return pack_bits(bits), GrayImage(rows)


def polarity_stats(
    pset: PredictorSet,
    cover: GrayImage,
    variant: Optional[str] = None,
) -> Dict[str, int]:

    """
    `Polarity Statistics Function`

    Counts each scan position once: guard (cover value in the
    guard set of `variant`, 1bin by default), then unipolar
    with a zero error, all positive, all negative, or mixed.
    The counts add up to (height - 1) x (width - 1).
    """

    if not isinstance(pset, PredictorSet):
        pset = PredictorSet(pset)

    _check_size(cover)

    field = error_field(pset, cover)
    guards = guard_set(variant or _VARIANT["ONE"])
    guarded = np.isin(cover.array[1:, 1:], sorted(guards))

    pos = (field > 0).all(axis=0)
    neg = (field < 0).all(axis=0)
    mixed = (field > 0).any(axis=0) & (field < 0).any(axis=0)
    zero = ~mixed & (field == 0).any(axis=0)

    return OrderedDict(
        [
            (_POLARITY["ZERO"], int((zero & ~guarded).sum())),
            (_POLARITY["POS"], int((pos & ~guarded).sum())),
            (_POLARITY["NEG"], int((neg & ~guarded).sum())),
            (_POLARITY["MIXED"], int((mixed & ~guarded).sum())),
            (_POLARITY["GUARD"], int(guarded.sum())),
        ]
    )
