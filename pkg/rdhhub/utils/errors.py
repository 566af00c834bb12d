#! /usr/bin/env python3

from .config import _EXIT


class RDHError(Exception):

    """
    `RDH Error`

    Root of every failure raised by rdhhub. Each subclass
    carries the process exit code the command line maps it
    to, see ~/rdhhub/cli.py.
    """

    exit_code: int = _EXIT["USAGE"]


class UsageError(RDHError):
    exit_code = _EXIT["USAGE"]


class OutOfBounds(RDHError, IndexError):
    exit_code = _EXIT["USAGE"]


class MissingBit(RDHError):
    exit_code = _EXIT["USAGE"]


class PayloadExceedsCapacity(RDHError):
    exit_code = _EXIT["CAPACITY"]


class FormatError(RDHError):
    exit_code = _EXIT["FORMAT"]


class PaddingNonZero(FormatError):
    pass


class MetaMismatch(RDHError):
    exit_code = _EXIT["FORMAT"]


class DimensionMismatch(RDHError):
    exit_code = _EXIT["FORMAT"]


class ImageTooSmall(RDHError):
    exit_code = _EXIT["FORMAT"]


class InconsistentState(RDHError):

    """
    Raised when a stego error vector cannot come out of any
    embedding action: the stego image was altered, or it is
    being read with the wrong algorithm/sidecar.
    """

    exit_code = _EXIT["INCONSISTENT"]


class PayloadShortfall(RDHError):
    exit_code = _EXIT["INCONSISTENT"]
