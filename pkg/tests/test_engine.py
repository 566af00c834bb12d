import numpy as np
import pytest

from rdhhub.image import GrayImage
from rdhhub.codec import pack_bits, unpack_bits
from rdhhub.rules import Algorithm, EmbedMeta
from rdhhub.predictors import PredictorSet
from rdhhub.engine import capacity, embed, extract, plan, polarity_stats
from rdhhub.utils.errors import (
    ImageTooSmall,
    InconsistentState,
    MetaMismatch,
    PayloadExceedsCapacity,
    PayloadShortfall,
)

from conftest import make_image


def _payload(size: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2, size=size).astype(np.uint8)


def _round_trip(alg, cover, bits):
    outcome = embed(alg, cover, pack_bits(bits))
    payload, recovered = extract(alg, outcome.stego, outcome.meta)
    return outcome, unpack_bits(payload), recovered


class TestRoundTrip:
    @pytest.mark.parametrize("fraction", [0.25, 0.5, 1.0])
    def test_exact(self, algorithm, smooth, textured, saturated, fraction):
        for cover in (smooth, textured, saturated):
            room = capacity(algorithm, cover)
            bits = _payload(int(fraction * room))

            outcome, payload, recovered = _round_trip(algorithm, cover, bits)

            assert outcome.bits_embedded == len(bits)
            assert np.array_equal(payload, bits)
            assert recovered == cover

    def test_constant_image(self, constant):
        alg = Algorithm()
        outcome = embed(alg, constant, pack_bits("1"))

        expected = constant.array.copy()
        expected[1, 1] = 129
        assert np.array_equal(outcome.stego.array, expected)
        assert outcome.meta.last_index == 4
        assert outcome.meta.overhead == ()

        payload, recovered = extract(alg, outcome.stego, outcome.meta)
        assert unpack_bits(payload).tolist() == [1]
        assert recovered == constant

    def test_empty_payload(self, algorithm, smooth):
        outcome = embed(algorithm, smooth, pack_bits([]))

        assert outcome.stego == smooth
        assert outcome.meta.last_index == smooth.width * smooth.height
        assert outcome.meta.overhead == ()
        assert outcome.bits_embedded == 0

        payload, recovered = extract(algorithm, outcome.stego, outcome.meta)
        assert len(payload) == 0
        assert recovered == smooth

    def test_accepts_plain_bits(self, smooth):
        alg = Algorithm()
        assert embed(alg, smooth, [0, 1, 1]).meta == embed(alg, smooth, pack_bits("011")).meta


class TestDistortion:
    def test_bounds(self, algorithm, textured, saturated):
        bound = 1 if algorithm.variant == "1bin" else 2

        for cover in (textured, saturated):
            bits = _payload(capacity(algorithm, cover), seed=9)
            outcome = embed(algorithm, cover, pack_bits(bits))

            diff = np.abs(outcome.stego.array.astype(int) - cover.array.astype(int))
            assert diff.max() <= bound
            assert np.array_equal(outcome.stego.array[0], cover.array[0])
            assert np.array_equal(outcome.stego.array[:, 0], cover.array[:, 0])

    def test_untouched_after_last_index(self, algorithm, textured):
        bits = _payload(capacity(algorithm, textured) // 3, seed=4)
        outcome = embed(algorithm, textured, pack_bits(bits))

        last = outcome.meta.last_index
        assert np.array_equal(outcome.stego.pixels[last + 1:], textured.pixels[last + 1:])

    def test_guards(self, algorithm, saturated):
        bits = _payload(capacity(algorithm, saturated), seed=2)
        outcome = embed(algorithm, saturated, pack_bits(bits))

        assert outcome.meta.overhead
        for index in outcome.meta.overhead:
            assert saturated.pixels[index] in algorithm.guard_set
            assert outcome.stego.pixels[index] == saturated.pixels[index]
            assert index <= outcome.meta.last_index


class TestCapacity:
    def test_two_by_two(self):
        cover = GrayImage(np.full((2, 2), 50, dtype=np.uint8))
        assert capacity(Algorithm(), cover) == 1

    def test_saturating_payload(self, algorithm, textured):
        room = capacity(algorithm, textured)
        first = embed(algorithm, textured, pack_bits(_payload(room, seed=1)))
        second = embed(algorithm, textured, pack_bits(_payload(room, seed=2)))

        assert first.bits_embedded == second.bits_embedded == room
        assert first.capacity == second.capacity == room
        assert first.meta.last_index == second.meta.last_index
        assert first.meta.overhead == second.meta.overhead

    def test_bins_only_add_capacity(self, smooth, textured):
        for cover in (smooth, textured):
            one, two, three = (
                capacity(Algorithm(variant=v), cover) for v in ("1bin", "2bin", "3bin")
            )
            assert three >= two >= one > 0

    def test_plan_matches_capacity(self, algorithm, saturated):
        layout = plan(algorithm, saturated)
        assert not (layout.embeddable & layout.guarded).any()
        assert not (layout.embeddable & layout.shifted).any()
        assert layout.embeddable.sum() == capacity(algorithm, saturated)

    def test_exceeded(self, smooth):
        alg = Algorithm()
        room = capacity(alg, smooth)

        with pytest.raises(PayloadExceedsCapacity) as info:
            embed(alg, smooth, pack_bits(_payload(room + 1)))

        assert str(room) in str(info.value)
        assert str(room + 1) in str(info.value)

    @pytest.mark.parametrize("shape", [(1, 5), (5, 1), (1, 1)])
    def test_too_small(self, shape):
        with pytest.raises(ImageTooSmall):
            capacity(Algorithm(), GrayImage(np.zeros(shape, dtype=np.uint8)))


class TestExtractErrors:
    def test_wrong_algorithm(self, smooth):
        outcome = embed(Algorithm(), smooth, pack_bits("0110"))
        with pytest.raises(MetaMismatch):
            extract(Algorithm(variant="2bin"), outcome.stego, outcome.meta)

    def test_wrong_size(self, smooth):
        outcome = embed(Algorithm(), smooth, pack_bits("0110"))
        other = make_image(smooth.width - 1, smooth.height)
        with pytest.raises(MetaMismatch):
            extract(Algorithm(), other, outcome.meta)

    def test_tampered_pixel(self, textured):
        alg = Algorithm()
        bits = _payload(capacity(alg, textured), seed=6)
        outcome = embed(alg, textured, pack_bits(bits))

        first = int(np.flatnonzero(plan(alg, textured).embeddable)[0])
        row, col = divmod(first, textured.width - 1)
        arr = outcome.stego.array.copy()
        arr[row + 1, col + 1] = (int(arr[row + 1, col + 1]) + 3) % 256
        tampered = GrayImage(arr)

        try:
            payload, recovered = extract(alg, tampered, outcome.meta)
        except (InconsistentState, PayloadShortfall):
            return

        assert recovered != textured or not np.array_equal(unpack_bits(payload), bits)

    def test_shortfall(self, constant):
        alg = Algorithm()
        meta = EmbedMeta(
            algorithm=alg,
            width=3,
            height=3,
            payload_bits=2,
            last_index=4,
        )
        with pytest.raises(PayloadShortfall):
            extract(alg, constant, meta)

    def test_excess_bits(self, constant):
        alg = Algorithm()
        meta = EmbedMeta(
            algorithm=alg,
            width=3,
            height=3,
            payload_bits=1,
            last_index=8,
        )
        with pytest.raises(InconsistentState):
            extract(alg, constant, meta)


class TestPolarity:
    def test_constant(self):
        cover = GrayImage(np.full((6, 5), 100, dtype=np.uint8))
        stats = polarity_stats(PredictorSet(), cover)

        assert stats["has_zero_unipolar"] == 20
        assert sum(stats.values()) == 20

    def test_guard_class(self):
        cover = GrayImage(np.zeros((4, 4), dtype=np.uint8))
        assert polarity_stats(PredictorSet(), cover)["guard"] == 9

    def test_variant_guard_set(self):
        cover = GrayImage(np.ones((4, 4), dtype=np.uint8))
        assert polarity_stats(PredictorSet(), cover)["guard"] == 0
        assert polarity_stats(PredictorSet(), cover, variant="2bin")["guard"] == 9

    @pytest.mark.parametrize(
        "kinds", [("med", "mean"), ("med", "mean", "median"), ("med", "mean", "median", "min")]
    )
    def test_partition(self, kinds, textured, saturated):
        for cover in (textured, saturated):
            stats = polarity_stats(kinds, cover)
            assert list(stats) == [
                "has_zero_unipolar",
                "all_positive",
                "all_negative",
                "mixed",
                "guard",
            ]
            assert sum(stats.values()) == (cover.height - 1) * (cover.width - 1)

    def test_zero_count_is_capacity(self, textured):
        ## textured holds no guard values, so both count the same positions
        stats = polarity_stats(PredictorSet(), textured)
        assert stats["guard"] == 0
        assert stats["has_zero_unipolar"] == capacity(Algorithm(), textured)
