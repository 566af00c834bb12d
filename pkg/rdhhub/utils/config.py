#! /usr/bin/env python3

import os
from dotenv import load_dotenv

load_dotenv()

_DEFAULT_FAMILY: str = str(os.getenv("DEF_FAMILY", "mpe2"))
_DEFAULT_VARIANT: str = str(os.getenv("DEF_VARIANT", "1bin"))
_DEFAULT_PREDICTORS: str = str(os.getenv("DEF_PREDICTORS", "med,mean"))
_DEFAULT_SEED: int = int(os.getenv("DEF_SEED", "0"))
_DEFAULT_FRACTIONS: str = str(os.getenv("DEF_FRACTIONS", "0.25,0.5,1.0"))
_DEFAULT_WORKERS: int = int(os.getenv("DEF_WORKERS", "1"))
_DEFAULT_ECHO: bool = os.getenv("DEF_ECHO", "False").lower() in ("1", "true", "yes")
_DEFAULT_TIMING: bool = os.getenv("DEF_TIMING", "True").lower() in ("1", "true", "yes")
_DEFAULT_LOGLEVEL: str = str(os.getenv("DEF_LOGLEVEL", "WARNING")).upper()
_DEFAULT_CORPUS: str = str(os.getenv("DEF_CORPUS", ""))
_DEFAULT_SWEEP: int = int(os.getenv("DEF_SWEEP", "10"))

_MAXVAL = 255
_PGM_MAGIC = b"P5"

_SIDECAR_MAGIC = "MPE2META"
_SIDECAR_VERSION = 1

## bound on |error| worth telling apart; see rules._lookup
_ERROR_CLAMP = 8

_FAMILY = dict(
    MPE2="mpe2",
    MPE="mpe",
)

_VARIANT = dict(
    ONE="1bin",
    TWO="2bin",
    THREE="3bin",
)

_PREDICTOR = dict(
    MED="med",
    MEAN="mean",
    MEDIAN="median",
    MIN="min",
)

_ACTION = dict(
    EMBED="EMBED",
    SHIFT="SHIFT",
    SKIP="SKIP",
    GUARD="GUARD",
)

## (offset, bins) of the positive side, then of the negative side
_SIDES = {
    ("mpe2", "1bin"): ((0, 1), (0, 1)),
    ("mpe2", "2bin"): ((0, 1), (0, 2)),
    ("mpe2", "3bin"): ((0, 2), (0, 2)),
    ("mpe", "2bin"): ((0, 1), (1, 1)),
    ("mpe", "3bin"): ((0, 2), (0, 2)),
}

_POLARITY = dict(
    ZERO="has_zero_unipolar",
    POS="all_positive",
    NEG="all_negative",
    MIXED="mixed",
    GUARD="guard",
)

_CSV_COLUMNS = (
    "image",
    "algorithm",
    "payload_bits",
    "max_capacity",
    "psnr_db",
    "elapsed_ms",
    "rng_seed",
    "roundtrip_ok",
)

_EXIT = dict(
    OK=0,
    USAGE=1,
    CAPACITY=2,
    FORMAT=3,
    INCONSISTENT=4,
)

## algorithms of the evaluation tables, as descriptors
_BENCH_ALGORITHMS = (
    "mpe-2bin-med",
    "mpe-3bin-med",
    "mpe2-1bin-med+mean",
    "mpe2-2bin-med+mean",
    "mpe2-3bin-med+mean",
)

_MULTI_ALGORITHMS = (
    "mpe2-1bin-med+mean",
    "mpe2-1bin-med+mean+median",
    "mpe2-1bin-med+mean+median+min",
)

_BENCH_IMAGES = (
    "lena",
    "baboon",
    "airplane",
    "peppers",
    "boat",
    "barbara",
)
