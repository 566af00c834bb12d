import math

import numpy as np
import pytest
from pydantic import ValidationError

from rdhhub.image import GrayImage, write_pgm
from rdhhub.bench import (
    Bench,
    BenchRecord,
    bench_run,
    load_corpus,
    make_payload,
    sweep,
    write_csv,
)
from rdhhub.utils.errors import FormatError

from conftest import make_image, make_saturated

HEADER = "image,algorithm,payload_bits,max_capacity,psnr_db,elapsed_ms,rng_seed,roundtrip_ok"


@pytest.fixture
def corpus(tmp_path):
    write_pgm(tmp_path / "ramp.pgm", make_image(20, 16, seed=4))
    write_pgm(tmp_path / "edges.pgm", make_saturated(seed=5))
    return tmp_path


def _record(**kwargs) -> BenchRecord:
    values = dict(
        image="lena",
        algorithm="mpe2-1bin-med+mean",
        fraction=1.0,
        payload_bits=10,
        max_capacity=10,
        psnr_db=49.64,
        elapsed_ms=1.5,
        rng_seed=0,
        roundtrip_ok=True,
    )
    values.update(kwargs)
    return BenchRecord(**values)


class TestRecord:
    def test_payload_within_capacity(self):
        with pytest.raises(ValidationError):
            _record(payload_bits=11)

    def test_psnr_positive(self):
        with pytest.raises(ValidationError):
            _record(psnr_db=-1.0)
        assert math.isinf(_record(psnr_db=math.inf).psnr_db)


class TestCSV:
    def test_empty(self):
        assert write_csv([]) == HEADER + "\n"

    def test_one_record(self):
        lines = write_csv([_record(psnr_db=math.inf, payload_bits=0)]).splitlines()

        assert lines == [HEADER, "lena,mpe2-1bin-med+mean,0,10,inf,1.500,0,true"]

    def test_finite(self):
        line = write_csv([_record()]).splitlines()[1]
        assert line.split(",")[4] == "49.6400"


class TestHelpers:
    def test_sweep(self):
        assert sweep(4) == (0.25, 0.5, 0.75, 1.0)
        with pytest.raises(ValueError):
            sweep(0)

    def test_payload_is_prefix_stable(self):
        long = make_payload(42, 1000)
        assert len(long) == 1000
        assert np.array_equal(make_payload(42, 333), long[:333])
        assert not np.array_equal(make_payload(43, 1000), long)

    def test_load_corpus(self, corpus):
        images = load_corpus(corpus)
        assert list(images) == ["edges", "ramp"]
        assert images["ramp"].shape == (16, 20)

    def test_empty_corpus(self, tmp_path):
        with pytest.raises(FormatError):
            load_corpus(tmp_path)
        with pytest.raises(FormatError):
            load_corpus(tmp_path / "missing")


class TestBench:
    ALGORITHMS = ("mpe2-1bin-med+mean", "mpe-2bin-med", "mpe2-1bin-med+mean+median")

    def test_run(self, corpus):
        records = bench_run(corpus, self.ALGORITHMS, (1.0, 0.5), seed=3, timing=False)

        assert len(records) == 2 * 3 * 2
        assert all(r.roundtrip_ok for r in records)
        assert all(r.error == "" for r in records)
        assert [(r.image, r.algorithm, r.fraction) for r in records[:4]] == [
            ("edges", "mpe-2bin-med", 0.5),
            ("edges", "mpe-2bin-med", 1.0),
            ("edges", "mpe2-1bin-med+mean", 0.5),
            ("edges", "mpe2-1bin-med+mean", 1.0),
        ]
        for r in records:
            assert r.rng_seed == 3
            assert r.elapsed_ms == 0
            assert r.payload_bits == math.floor(r.fraction * r.max_capacity)

    def test_deterministic(self, corpus):
        first = Bench(corpus, self.ALGORITHMS, "0.25,1.0", seed=8, timing=False)
        second = Bench(corpus, self.ALGORITHMS, "0.25,1.0", seed=8, timing=False)
        first.run()
        second.run()

        assert first.to_csv() == second.to_csv()
        assert first.to_csv().splitlines()[0] == HEADER

    def test_rows_ignore_caller_order(self, corpus):
        forward = bench_run(corpus, self.ALGORITHMS, (1.0,), seed=5, timing=False)
        backward = bench_run(corpus, self.ALGORITHMS[::-1], (1.0,), seed=5, timing=False)

        assert forward == backward
        assert [r.algorithm for r in forward[:3]] == sorted(self.ALGORITHMS)

    def test_workers_keep_order(self, corpus):
        serial = bench_run(corpus, self.ALGORITHMS, "0.5,1.0", seed=1, timing=False)
        pooled = bench_run(corpus, self.ALGORITHMS, "0.5,1.0", seed=1, timing=False, workers=2)
        assert pooled == serial

    def test_psnr_falls_with_payload(self, corpus):
        bench = Bench(corpus, self.ALGORITHMS, sweep(5), seed=2, timing=False)
        bench.run()

        for _, group in bench.df.groupby(["image", "algorithm"]):
            values = group.sort_values("fraction")["psnr_db"].tolist()
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_failures_are_kept(self):
        corpus = {"dot": GrayImage([[5]]), "ramp": make_image(8, 8)}
        records = bench_run(corpus, ("mpe2-1bin-med+mean",), (1.0,), timing=False)

        assert [r.image for r in records] == ["dot", "ramp"]
        assert not records[0].roundtrip_ok
        assert "ImageTooSmall" in records[0].error
        assert math.isnan(records[0].psnr_db)
        assert records[1].roundtrip_ok

    def test_polarity_table(self, corpus):
        bench = Bench(corpus, ())
        table = bench.polarity_table()

        assert len(table) == 2 * 3
        assert list(table["predictors"][:3]) == [
            "med+mean",
            "med+mean+median",
            "med+mean+median+min",
        ]
        counts = table[["has_zero_unipolar", "all_positive", "all_negative", "mixed", "guard"]]
        sizes = {"edges": 23 * 23, "ramp": 15 * 19}
        for (_, row), total in zip(table.iterrows(), counts.sum(axis=1)):
            assert total == sizes[row["image"]]

    def test_bad_fractions(self, corpus):
        with pytest.raises(ValueError):
            Bench(corpus, fractions=(0.0, 1.0))
        with pytest.raises(ValueError):
            Bench(corpus, fractions="1.5")
