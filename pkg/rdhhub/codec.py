#! /usr/bin/env python3

import numpy as np
from pydantic import ValidationError
from typing import List, Sequence, Union

from .rules import Algorithm, EmbedMeta
from .utils.errors import FormatError, PaddingNonZero
from .utils.config import _SIDECAR_MAGIC, _SIDECAR_VERSION


class BitStream:

    """
    `BitStream Class`

    Payload bits packed MSB-first, eight to a byte, with the
    exact bit length kept apart: `bytes` holds
    ceil(bit_length / 8) bytes, the unused low bits of the
    last byte being padding.

    Padding is only checked when the bits are read back
    (`unpack_bits`), so a stream built from a dirty file can
    be rejected there with PaddingNonZero.
    """

    def __init__(self, data: bytes, bit_length: int):
        data = bytes(data)

        if bit_length < 0:
            msg = "Bit length must be >= 0"
            raise ValueError(msg)

        if len(data) != (bit_length + 7) // 8:
            msg = f"{len(data)} bytes cannot hold exactly {bit_length} bits"
            raise FormatError(msg)

        self.__data = data
        self.__bit_length = bit_length

    def __repr__(self):
        return f"<{self.__class__.__name__} {self.__bit_length} bits>"

    def __len__(self):
        return self.__bit_length

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return (self.bytes, len(self)) == (other.bytes, len(other))

    @classmethod
    def from_bytes(cls, data: bytes, bit_length: int = None) -> "BitStream":

        """
        Reads the first `bit_length` bits of `data` (all of
        it when None). A payload file shorter than the bits it
        is asked for is rejected rather than zero-extended.
        """

        data = bytes(data)

        if bit_length is None:
            return cls(data, 8 * len(data))

        if bit_length > 8 * len(data):
            msg = f"Payload has {8 * len(data)} bits, {bit_length} requested"
            raise FormatError(msg)

        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:bit_length]

        return pack_bits(bits)

    @property
    def bytes(self) -> bytes:
        return self.__data

    @property
    def bit_length(self) -> int:
        return self.__bit_length


def pack_bits(bits: Union[Sequence[int], np.ndarray, str]) -> BitStream:

    """
    `Pack Bits Function`

    0/1 sequence (or a "0110" string) -> MSB-first BitStream,
    e.g. 011101 -> one byte 0x74 with bit_length 6.
    """

    if isinstance(bits, str):
        bits = [int(ch) for ch in bits]

    arr = np.asarray(bits, dtype=np.uint8).ravel()

    if arr.size and arr.max() > 1:
        msg = "Bits must be 0 or 1"
        raise ValueError(msg)

    return BitStream(np.packbits(arr).tobytes(), int(arr.size))


def unpack_bits(stream: BitStream) -> np.ndarray:
    size = stream.bit_length
    bits = np.unpackbits(np.frombuffer(stream.bytes, dtype=np.uint8))

    if bits[size:].any():
        msg = "Non-zero padding bits after the payload"
        raise PaddingNonZero(msg)

    return bits[:size]


def write_sidecar(meta: EmbedMeta) -> str:

    """
    `Write Sidecar Function`

    Canonical line-oriented text carrying the out of band
    side information (LF newlines, one trailing LF):

        MPE2META 1
        algorithm <mpe2|mpe>
        variant <1bin|2bin|3bin>
        predictors <kind,kind,...>
        size <width> <height>
        payload_bits <n>
        last_index <L>
        overhead_count <m>
        <index>            (m lines, ascending)
    """

    alg = meta.algorithm

    lines = [
        f"{_SIDECAR_MAGIC} {_SIDECAR_VERSION}",
        f"algorithm {alg.family}",
        f"variant {alg.variant}",
        f"predictors {','.join(alg.predictors)}",
        f"size {meta.width} {meta.height}",
        f"payload_bits {meta.payload_bits}",
        f"last_index {meta.last_index}",
        f"overhead_count {len(meta.overhead)}",
    ]
    lines.extend(str(index) for index in meta.overhead)

    return "\n".join(lines) + "\n"


def _field(line: str, key: str, count: int = 1) -> List[str]:
    parts = line.split(" ")

    if parts[0] != key or len(parts) != count + 1:
        msg = f"Expected `{key}` line, got {line!r}"
        raise FormatError(msg)

    return parts[1:]


def _number(token: str) -> int:
    if not (token.isascii() and token.isdigit()):
        msg = f"Expected a non-negative integer, got {token!r}"
        raise FormatError(msg)
    return int(token)


def read_sidecar(text: str) -> EmbedMeta:

    """
    Inverse of `write_sidecar`. Anything off the grammar,
    a bad magic/version, an unknown predictor, out of range
    or unsorted indices, raises FormatError.
    """

    if "\r" in text or not text.endswith("\n") or text.endswith("\n\n"):
        msg = "Sidecar must use LF newlines with a single trailing LF"
        raise FormatError(msg)

    lines = text[:-1].split("\n")

    if len(lines) < 8:
        msg = f"Sidecar too short: {len(lines)} lines"
        raise FormatError(msg)

    if lines[0] != f"{_SIDECAR_MAGIC} {_SIDECAR_VERSION}":
        msg = f"Bad sidecar magic/version {lines[0]!r}"
        raise FormatError(msg)

    (family,) = _field(lines[1], "algorithm")
    (variant,) = _field(lines[2], "variant")
    (kinds,) = _field(lines[3], "predictors")
    width, height = (_number(t) for t in _field(lines[4], "size", 2))
    payload_bits = _number(_field(lines[5], "payload_bits")[0])
    last_index = _number(_field(lines[6], "last_index")[0])
    count = _number(_field(lines[7], "overhead_count")[0])

    if len(lines) != 8 + count:
        msg = f"overhead_count {count} but {len(lines) - 8} index lines"
        raise FormatError(msg)

    overhead = tuple(_number(line) for line in lines[8:])

    try:
        algorithm = Algorithm(
            family=family,
            variant=variant,
            predictors=tuple(kinds.split(",")),
        )
        meta = EmbedMeta(
            algorithm=algorithm,
            width=width,
            height=height,
            payload_bits=payload_bits,
            last_index=last_index,
            overhead=overhead,
        )
    except (ValidationError, ValueError) as e:
        msg = f"Invalid sidecar: {e}"
        raise FormatError(msg) from e

    ## non-canonical spellings, e.g. "mpe med,mean", do not survive
    if write_sidecar(meta) != text:
        msg = "Sidecar is not in canonical form"
        raise FormatError(msg)

    return meta
