#! /usr/bin/env python3

import math
import time
import logging
import numpy as np
import pandas as pd
from pathlib import Path
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from pydantic import BaseModel, validator, root_validator
from typing import Dict, Iterable, List, Sequence, Tuple, Union

from .image import GrayImage, read_pgm
from .codec import pack_bits, unpack_bits
from .rules import Algorithm
from .engine import capacity, embed, extract, polarity_stats
from .metrics import format_psnr, psnr
from .utils.errors import FormatError
from .utils.checks import parse_fractions
from .utils.config import (
    _DEFAULT_FRACTIONS,
    _DEFAULT_SEED,
    _DEFAULT_SWEEP,
    _DEFAULT_TIMING,
    _DEFAULT_WORKERS,
    _BENCH_ALGORITHMS,
    _MULTI_ALGORITHMS,
    _CSV_COLUMNS,
)

logger = logging.getLogger(__name__)

Corpus = Union[str, Path, Sequence[Union[str, Path]], Dict[str, GrayImage]]


class BenchRecord(BaseModel):

    """
    `BenchRecord Model`

    One (image, algorithm, fraction) row of a benchmark.
    `psnr_db` is inf for an untouched image and NaN when the
    record failed before a stego image existed; `error`
    carries the failure, if any.
    """

    image: str
    algorithm: str
    fraction: float
    payload_bits: int
    max_capacity: int
    psnr_db: float
    elapsed_ms: float
    rng_seed: int
    roundtrip_ok: bool
    error: str = ""

    class Config:
        frozen = True

    @validator("psnr_db")
    def _psnr(cls, value):
        if math.isfinite(value) and value <= 0:
            msg = "Finite PSNR must be positive"
            raise ValueError(msg)
        return value

    @root_validator(skip_on_failure=True)
    def _bits(cls, values):
        if values["payload_bits"] > values["max_capacity"]:
            msg = "payload_bits cannot exceed max_capacity"
            raise ValueError(msg)
        return values


def make_payload(seed: int, size: int) -> np.ndarray:
    """
    Seeded pseudo-random payload, `size` bits cut from the
    byte stream of numpy's default generator (PCG64). The
    stream is prefix-stable: a shorter payload of the same
    seed is a prefix of a longer one.
    """
    data = np.random.default_rng(seed).bytes((size + 7) // 8)
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))[:size]


def sweep(steps: int = _DEFAULT_SWEEP) -> Tuple[float, ...]:
    """
    Evenly spaced payload fractions k / steps, k = 1..steps.
    """
    if steps < 1:
        msg = "Sweep needs at least one step"
        raise ValueError(msg)
    return tuple(k / steps for k in range(1, steps + 1))


def load_corpus(corpus: Corpus) -> Dict[str, GrayImage]:

    """
    `Load Corpus Function`

    Accepts a directory (every *.pgm inside it), a list of
    .pgm files, or an already loaded {name: GrayImage}
    mapping. Images are keyed by file stem and sorted by
    name.
    """

    if isinstance(corpus, dict):
        return OrderedDict(sorted(corpus.items()))

    if isinstance(corpus, (str, Path)):
        path = Path(corpus)
        if not path.is_dir():
            msg = f"Corpus directory {path} not found"
            raise FormatError(msg)
        files = sorted(path.glob("*.pgm"))
    else:
        files = [Path(f) for f in corpus]

    if not files:
        msg = "Corpus holds no .pgm files"
        raise FormatError(msg)

    images = OrderedDict()
    for file in sorted(files, key=lambda f: f.stem):
        images[file.stem] = read_pgm(file)

    return images


def _record(
    name: str,
    pixels: np.ndarray,
    descriptor: str,
    fraction: float,
    seed: int,
    timing: bool,
) -> BenchRecord:

    """
    Runs one configuration: payload of floor(fraction x
    capacity) bits, embed, PSNR against the cover, then a
    full extraction checked bit for bit. Never raises,
    failures end up in the record.
    """

    alg = Algorithm.parse(descriptor)
    cover = GrayImage(pixels)

    row = dict(
        image=name,
        algorithm=descriptor,
        fraction=fraction,
        payload_bits=0,
        max_capacity=0,
        psnr_db=math.nan,
        elapsed_ms=0.0,
        rng_seed=seed,
        roundtrip_ok=False,
    )

    try:
        room = capacity(alg, cover)
        bits = make_payload(seed, int(math.floor(fraction * room)))
        row.update(max_capacity=room, payload_bits=len(bits))

        start = time.perf_counter()
        outcome = embed(alg, cover, pack_bits(bits))
        if timing:
            row["elapsed_ms"] = (time.perf_counter() - start) * 1000

        row["psnr_db"] = psnr(cover, outcome.stego)

        payload, recovered = extract(alg, outcome.stego, outcome.meta)
        row["roundtrip_ok"] = bool(
            recovered == cover and np.array_equal(unpack_bits(payload), bits)
        )
        if not row["roundtrip_ok"]:
            row["error"] = "round-trip mismatch"

    except Exception as e:
        row["error"] = f"{e.__class__.__name__}: {e}"

    record = BenchRecord(**row)

    logger.info(
        "%s %s f=%.3f bits=%d/%d psnr=%s ok=%s",
        name,
        descriptor,
        fraction,
        record.payload_bits,
        record.max_capacity,
        format_psnr(record.psnr_db),
        record.roundtrip_ok,
    )

    return record


def _job(args: tuple) -> BenchRecord:
    return _record(*args)


class Bench:

    """
    `Bench Class`

    Runs every (image, algorithm, fraction) combination of
    a corpus and collects one `BenchRecord` each. Rows come
    out sorted by image name, then algorithm descriptor,
    then fraction, whatever the completion order.

    With `workers` > 1 configurations are spread over a
    process pool; each embed/extract stays sequential.

    Some settings may be changed through environment
    variables, see ~/rdhhub/utils/config.py.
    """

    def __init__(
        self,
        corpus: Corpus,
        algorithms: Iterable[Union[str, Algorithm]] = _BENCH_ALGORITHMS,
        fractions: Union[str, Sequence[float]] = _DEFAULT_FRACTIONS,
        seed: int = _DEFAULT_SEED,
        timing: bool = _DEFAULT_TIMING,
        workers: int = _DEFAULT_WORKERS,
    ):
        if isinstance(fractions, str):
            fractions = parse_fractions(fractions)
        else:
            fractions = parse_fractions(",".join(str(f) for f in fractions))

        if workers < 1:
            msg = "Arg `workers` must be >= 1"
            raise ValueError(msg)

        self.__corpus: Dict[str, GrayImage] = load_corpus(corpus)
        parsed = {
            alg.descriptor: alg
            for alg in (a if isinstance(a, Algorithm) else Algorithm.parse(a) for a in algorithms)
        }
        self.__algorithms: Tuple[Algorithm, ...] = tuple(parsed[d] for d in sorted(parsed))
        self.__fractions: Tuple[float, ...] = tuple(sorted(set(fractions)))
        self.__seed: int = int(seed)
        self.__timing: bool = bool(timing)
        self.__workers: int = int(workers)
        self.__records: List[BenchRecord] = []

    def __repr__(self):
        return (
            f"{self.__class__.__name__}<Images: {len(self.__corpus)}, "
            f"Algorithms: {len(self.__algorithms)}, "
            f"Fractions: {len(self.__fractions)}, Seed: {self.__seed}>"
        )

    def __jobs(self) -> List[tuple]:
        return [
            (name, img.array, alg.descriptor, fraction, self.__seed, self.__timing)
            for name, img in self.__corpus.items()
            for alg in self.__algorithms
            for fraction in self.__fractions
        ]

    def run(self) -> List[BenchRecord]:
        jobs = self.__jobs()

        if self.__workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=self.__workers) as pool:
                records = list(pool.map(_job, jobs))
        else:
            records = [_job(job) for job in jobs]

        failed = sum(not r.roundtrip_ok for r in records)
        if failed:
            logger.warning("%d of %d bench records failed", failed, len(records))

        self.__records = records
        return records

    def polarity_table(
        self,
        predictor_sets: Iterable[Sequence[str]] = None,
    ) -> pd.DataFrame:

        """
        `Polarity Table Method`

        Polarity counts of every corpus image under each
        predictor set, by default the 2, 3 and 4 predictor
        sets of the multi-predictor runs. One row per
        (image, set), one column per polarity class.
        """

        if predictor_sets is None:
            predictor_sets = [Algorithm.parse(d).predictors for d in _MULTI_ALGORITHMS]

        rows = []
        for name, img in self.__corpus.items():
            for kinds in predictor_sets:
                counts = polarity_stats(kinds, img)
                rows.append(dict(image=name, predictors="+".join(kinds), **counts))

        return pd.DataFrame(rows)

    @property
    def records(self) -> List[BenchRecord]:
        return self.__records

    @property
    def df(self) -> pd.DataFrame:
        return pd.DataFrame(
            [r.dict() for r in self.__records],
            columns=list(BenchRecord.__fields__),
        )

    @property
    def corpus(self) -> Dict[str, GrayImage]:
        return self.__corpus

    @property
    def algorithms(self) -> Tuple[Algorithm, ...]:
        return self.__algorithms

    @property
    def fractions(self) -> Tuple[float, ...]:
        return self.__fractions

    def to_csv(self) -> str:
        return write_csv(self.__records)


def bench_run(
    corpus: Corpus,
    algorithms: Iterable[Union[str, Algorithm]] = _BENCH_ALGORITHMS,
    fractions: Union[str, Sequence[float]] = _DEFAULT_FRACTIONS,
    seed: int = _DEFAULT_SEED,
    timing: bool = _DEFAULT_TIMING,
    workers: int = _DEFAULT_WORKERS,
) -> List[BenchRecord]:
    bench = Bench(
        corpus=corpus,
        algorithms=algorithms,
        fractions=fractions,
        seed=seed,
        timing=timing,
        workers=workers,
    )
    return bench.run()


def write_csv(records: Iterable[BenchRecord]) -> str:

    """
    `Write CSV Function`

    Header "image,algorithm,payload_bits,max_capacity,
    psnr_db,elapsed_ms,rng_seed,roundtrip_ok" plus one row
    per record. PSNR is written with 4 decimals or "inf",
    elapsed_ms with 3 decimals, no locale formatting.
    """

    df = pd.DataFrame(
        [r.dict() for r in records],
        columns=list(BenchRecord.__fields__),
    )

    df["psnr_db"] = df["psnr_db"].map(format_psnr)
    df["elapsed_ms"] = df["elapsed_ms"].map(lambda ms: f"{ms:.3f}")
    df["roundtrip_ok"] = df["roundtrip_ok"].map(lambda ok: "true" if ok else "false")

    return df[list(_CSV_COLUMNS)].to_csv(index=False)
