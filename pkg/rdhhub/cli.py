#! /usr/bin/env python3

import os
import sys
import logging
import argparse
import tempfile
from pathlib import Path
from pydantic import BaseModel, ValidationError, root_validator
from typing import Dict, List, Optional, Sequence, Tuple

from .image import read_pgm, save_pgm
from .codec import BitStream, read_sidecar, write_sidecar
from .rules import Algorithm
from .engine import capacity, embed, extract
from .predictors import PredictorSet
from .metrics import bpp, distortion, format_psnr, psnr
from .bench import Bench, sweep
from .utils.errors import FormatError, RDHError, UsageError
from .utils.checks import parse_fractions, parse_list
from .utils.config import (
    _DEFAULT_FAMILY,
    _DEFAULT_VARIANT,
    _DEFAULT_PREDICTORS,
    _DEFAULT_SEED,
    _DEFAULT_FRACTIONS,
    _DEFAULT_WORKERS,
    _DEFAULT_TIMING,
    _DEFAULT_ECHO,
    _DEFAULT_LOGLEVEL,
    _BENCH_ALGORITHMS,
    _MULTI_ALGORITHMS,
    _FAMILY,
    _VARIANT,
    _EXIT,
)

logger = logging.getLogger(__name__)


class CommandConfig(BaseModel):

    """
    `CommandConfig Model`

    Resolved arguments of one command. Outputs may neither
    coincide with each other nor overwrite an input, unless
    `overwrite` is set.
    """

    command: str
    inputs: Tuple[Path, ...] = ()
    outputs: Tuple[Path, ...] = ()
    algorithm: Optional[Algorithm] = None
    seed: int = _DEFAULT_SEED
    fractions: Tuple[float, ...] = ()
    overwrite: bool = False

    class Config:
        frozen = True

    @root_validator(skip_on_failure=True)
    def _paths(cls, values):
        outputs = [p.resolve() for p in values["outputs"]]

        if len(set(outputs)) != len(outputs):
            msg = "Output paths must be distinct"
            raise ValueError(msg)

        if not values["overwrite"]:
            inputs = {p.resolve() for p in values["inputs"]}
            for path in outputs:
                if path in inputs:
                    msg = f"Output {path} would overwrite an input, pass --overwrite"
                    raise ValueError(msg)

        return values


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _write_atomic(files: Dict[Path, bytes]):

    """
    Writes every file to a temporary sibling first and
    renames them in place only once all were written, so
    outputs are either complete or absent.
    """

    staged: List[Tuple[str, Path]] = []

    try:
        for path, data in files.items():
            fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.")
            staged.append((tmp, path))
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
        for tmp, path in staged:
            os.replace(tmp, path)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.remove(tmp)


def _algorithm(args: argparse.Namespace) -> Algorithm:
    try:
        return Algorithm(
            family=args.family,
            variant=args.variant,
            predictors=parse_list(args.predictors),
        )
    except (ValidationError, ValueError) as e:
        raise UsageError(_one_line(e)) from e


def _config(**kwargs) -> CommandConfig:
    try:
        return CommandConfig(**kwargs)
    except (ValidationError, ValueError) as e:
        raise UsageError(_one_line(e)) from e


def _one_line(e: Exception) -> str:
    return "; ".join(line.strip() for line in str(e).splitlines() if line.strip())


def cmd_embed(args: argparse.Namespace) -> int:
    cfg = _config(
        command="embed",
        inputs=(args.cover, args.payload),
        outputs=(args.stego, args.meta),
        algorithm=_algorithm(args),
        overwrite=args.overwrite,
    )

    if args.bits is not None and args.bits < 0:
        msg = "--bits must be >= 0"
        raise UsageError(msg)

    cover = read_pgm(args.cover)
    payload = BitStream.from_bytes(Path(args.payload).read_bytes(), args.bits)

    outcome = embed(cfg.algorithm, cover, payload)
    summary = distortion(cover, outcome.stego)

    _write_atomic(
        {
            Path(args.stego): save_pgm(outcome.stego),
            Path(args.meta): write_sidecar(outcome.meta).encode("utf-8"),
        }
    )

    print(f"algorithm: {cfg.algorithm.descriptor}")
    print(f"bits_embedded: {outcome.bits_embedded}")
    print(f"capacity: {outcome.capacity}")
    print(f"bpp: {bpp(outcome.bits_embedded, cover):.4f}")
    print(f"psnr_db: {format_psnr(psnr(cover, outcome.stego))}")
    print(f"max_abs_diff: {summary.max_abs}")
    print(f"overhead: {len(outcome.meta.overhead)}")

    return _EXIT["OK"]


def cmd_extract(args: argparse.Namespace) -> int:
    _config(
        command="extract",
        inputs=(args.stego, args.meta),
        outputs=(args.payload, args.recovered),
        overwrite=args.overwrite,
    )

    stego = read_pgm(args.stego)
    meta = read_sidecar(_read_text(args.meta))

    payload, recovered = extract(meta.algorithm, stego, meta)

    _write_atomic(
        {
            Path(args.payload): payload.bytes,
            Path(args.recovered): save_pgm(recovered),
        }
    )

    print(f"payload_bits: {payload.bit_length}")

    return _EXIT["OK"]


def cmd_capacity(args: argparse.Namespace) -> int:
    alg = _algorithm(args)
    print(capacity(alg, read_pgm(args.cover)))
    return _EXIT["OK"]


def cmd_psnr(args: argparse.Namespace) -> int:
    print(format_psnr(psnr(read_pgm(args.a), read_pgm(args.b))))
    return _EXIT["OK"]


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        fractions = sweep(args.sweep) if args.sweep else parse_fractions(args.fractions)
        algorithms = [Algorithm.parse(d) for d in parse_list(args.algorithms)]
    except (ValidationError, ValueError) as e:
        raise UsageError(_one_line(e)) from e

    cfg = _config(
        command="bench",
        inputs=(args.corpus,),
        outputs=(args.out,),
        seed=args.seed,
        fractions=fractions,
    )

    try:
        bench = Bench(
            corpus=args.corpus,
            algorithms=algorithms,
            fractions=cfg.fractions,
            seed=cfg.seed,
            timing=args.timing,
            workers=args.workers,
        )
    except ValueError as e:
        raise UsageError(_one_line(e)) from e

    records = bench.run()

    _write_atomic({Path(args.out): bench.to_csv().encode("utf-8")})

    print(f"records: {len(records)}")

    if not all(r.roundtrip_ok for r in records):
        return _EXIT["INCONSISTENT"]
    return _EXIT["OK"]


def cmd_polarity(args: argparse.Namespace) -> int:
    try:
        sets = [PredictorSet(Algorithm.parse(d).predictors) for d in parse_list(args.algorithms)]
    except (ValidationError, ValueError) as e:
        raise UsageError(_one_line(e)) from e

    bench = Bench(corpus=args.corpus, algorithms=())
    sys.stdout.write(bench.polarity_table(sets).to_csv(index=False))

    return _EXIT["OK"]


def _read_text(path: str) -> str:
    try:
        return Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        msg = f"Sidecar {path} is not UTF-8 text"
        raise FormatError(msg) from e


def _algorithm_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--family", default=_DEFAULT_FAMILY, choices=sorted(_FAMILY.values()))
    parser.add_argument("--variant", default=_DEFAULT_VARIANT, choices=sorted(_VARIANT.values()))
    parser.add_argument("--predictors", default=_DEFAULT_PREDICTORS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rdhhub",
        description="Reversible data hiding with multiple predictors",
    )
    parser.add_argument("-v", "--verbose", action="store_true", default=_DEFAULT_ECHO)

    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("embed", help="hide a payload file in a cover image")
    p.add_argument("cover")
    p.add_argument("payload")
    p.add_argument("stego")
    p.add_argument("meta")
    p.add_argument("--bits", type=int, default=None, help="embed only the first N bits")
    p.add_argument("--overwrite", action="store_true")
    _algorithm_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover payload and cover")
    p.add_argument("stego")
    p.add_argument("meta")
    p.add_argument("payload")
    p.add_argument("recovered")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("capacity", help="print the embedding capacity in bits")
    p.add_argument("cover")
    _algorithm_flags(p)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("psnr", help="print the PSNR of two images")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_psnr)

    p = sub.add_parser("bench", help="benchmark a directory of .pgm images to CSV")
    p.add_argument("corpus")
    p.add_argument("out")
    p.add_argument("--algorithms", default=",".join(_BENCH_ALGORITHMS))
    p.add_argument("--fractions", default=_DEFAULT_FRACTIONS)
    p.add_argument("--sweep", type=int, default=0, help="use fractions k/N, k = 1..N")
    p.add_argument("--seed", type=int, default=_DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=_DEFAULT_WORKERS)
    p.add_argument("--no-timing", dest="timing", action="store_false", default=_DEFAULT_TIMING)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("polarity", help="prediction error polarity counts as CSV")
    p.add_argument("corpus")
    p.add_argument("--algorithms", default=",".join(_MULTI_ALGORITHMS))
    p.set_defaults(func=cmd_polarity)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:

    """
    `Main Function`

    Runs one command and returns its exit code: 0 success,
    1 usage, 2 capacity exceeded, 3 format or mismatch,
    4 inconsistent stego. Failures print a single line on
    stderr.
    """

    try:
        args = build_parser().parse_args(argv)

        logging.basicConfig(
            level=logging.INFO if args.verbose else _DEFAULT_LOGLEVEL,
            format="%(asctime)s %(name)s %(levelname)s %(message)s",
        )

        return args.func(args)

    except RDHError as e:
        print(f"rdhhub: {e.__class__.__name__}: {_one_line(e)}", file=sys.stderr)
        return e.exit_code

    except OSError as e:
        print(f"rdhhub: {e.__class__.__name__}: {_one_line(e)}", file=sys.stderr)
        return _EXIT["FORMAT"]


if __name__ == "__main__":
    sys.exit(main())
