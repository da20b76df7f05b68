from __future__ import annotations

import random
from collections import Counter

import pytest

from genderation.bins import GenderednessBin, TrainingExample
from genderation.ngram_lm import (
    BOS,
    EOS,
    UNK,
    GenerationConfig,
    load_model,
    save_model,
    train,
)

MALE = GenderednessBin.MALE_ONLY
FEMALE = GenderednessBin.FEMALE_ONLY
NEUTRAL = GenderednessBin.NEUTRAL


def example(response, bin_=NEUTRAL):
    return TrainingExample("ctx\n" + bin_.control_token, response, bin_, bin_.control_token)


@pytest.fixture(scope="module")
def tiny_model():
    # 2x "the king" in the male bin, 1x "the queen" in the female bin;
    # bigram model, lambda 0.5, k 0.1, vocab {the,king,queen,bos,eos,unk}.
    examples = [
        example("the king", MALE),
        example("the king", MALE),
        example("the queen", FEMALE),
    ]
    return train(examples, order=2, interpolation_lambda=0.5, smoothing_k=0.1, min_count=1)


class TestTrain:
    def test_bigram_counts_single_example(self):
        model = train([example("hello")], order=2, min_count=1)
        counts = model.per_bin_counts[NEUTRAL]
        assert counts[(BOS,)] == Counter({"hello": 1})
        assert counts[("hello",)] == Counter({EOS: 1})

    def test_default_min_count_maps_hapaxes_to_unk(self):
        model = train([example("hello")], order=2)
        assert "hello" not in model.vocab
        assert model.per_bin_counts[NEUTRAL][(BOS,)] == Counter({UNK: 1})

    def test_disjoint_bins_shared_is_union(self, tiny_model):
        male = tiny_model.per_bin_counts[MALE]
        female = tiny_model.per_bin_counts[FEMALE]
        assert set(male[("the",)]) == {"king"}
        assert set(female[("the",)]) == {"queen"}
        assert tiny_model.shared_counts[("the",)] == Counter({"king": 2, "queen": 1})

    def test_per_bin_sums_to_shared(self, tiny_model):
        merged: dict = {}
        for table in tiny_model.per_bin_counts.values():
            for context, counter in table.items():
                merged.setdefault(context, Counter()).update(counter)
        assert merged == tiny_model.shared_counts

    def test_vocab_includes_specials(self, tiny_model):
        assert {BOS, EOS, UNK} <= tiny_model.vocab
        assert tiny_model.vocab == frozenset({"the", "king", "queen", BOS, EOS, UNK})

    def test_empty_examples_rejected(self):
        with pytest.raises(ValueError):
            train([])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"order": 0},
            {"interpolation_lambda": -0.1},
            {"interpolation_lambda": 1.1},
            {"smoothing_k": 0.0},
            {"min_count": 0},
        ],
    )
    def test_bad_hyperparameters_rejected(self, kwargs):
        with pytest.raises(ValueError):
            train([example("hi")], **kwargs)


class TestProb:
    def test_hand_computed_interpolation(self, tiny_model):
        # bin side (2+.1)/(2+.6), shared side (2+.1)/(3+.6), mixed 50/50
        expected = 0.5 * (2.1 / 2.6) + 0.5 * (2.1 / 3.6)
        assert tiny_model.prob(MALE, ["the"], "king") == pytest.approx(expected, rel=1e-12)

    def test_hand_computed_cross_bin(self, tiny_model):
        # female bin never saw "king" after "the": (0+.1)/(1+.6)
        expected = 0.5 * (0.1 / 1.6) + 0.5 * (2.1 / 3.6)
        assert tiny_model.prob(FEMALE, ["the"], "king") == pytest.approx(expected, rel=1e-12)

    def test_hand_computed_backoff(self, tiny_model):
        # male bin never saw context ("queen",): backs off to unigrams
        expected = 0.5 * (2.1 / 6.6) + 0.5 * (0.1 / 1.6)
        assert tiny_model.prob(MALE, ["queen"], "the") == pytest.approx(expected, rel=1e-12)

    def test_lambda_zero_ignores_bin(self):
        examples = [example("the king", MALE), example("the queen", FEMALE)]
        model = train(examples, order=2, interpolation_lambda=0.0, min_count=1)
        for token in sorted(model.vocab):
            probs = {b: model.prob(b, ["the"], token) for b in GenderednessBin}
            assert len(set(probs.values())) == 1

    def test_lambda_one_empty_bin_is_uniform(self, tiny_model):
        uniform_model = train(
            [example("the king", MALE)],
            order=2,
            interpolation_lambda=1.0,
            smoothing_k=0.1,
            min_count=1,
        )
        # NEUTRAL bin has no counts at any order: smoothed-uniform chain
        size = len(uniform_model.vocab)
        for token in sorted(uniform_model.vocab):
            assert uniform_model.prob(NEUTRAL, ["the"], token) == pytest.approx(1 / size)

    def test_normalization_over_vocab(self, tiny_model):
        rng = random.Random(11)
        words = sorted(tiny_model.vocab)
        contexts = [["the"], ["king"], [BOS], ["never-seen"], []] + [
            [rng.choice(words)] for _ in range(10)
        ]
        for bin_ in GenderednessBin:
            for context in contexts:
                total = sum(
                    tiny_model.prob(bin_, context, token) for token in tiny_model.vocab
                )
                assert total == pytest.approx(1.0, abs=1e-9)

    def test_short_context_padded_with_bos(self, tiny_model):
        assert tiny_model.prob(MALE, [], "the") == tiny_model.prob(MALE, [BOS], "the")

    def test_oov_token_scored_as_unk(self, tiny_model):
        assert tiny_model.prob(MALE, ["the"], "dragon") == tiny_model.prob(
            MALE, ["the"], UNK
        )


class TestGenerate:
    def test_single_mode_model(self):
        model = train([example("the king", MALE)] * 3, order=2, min_count=1)
        for bin_ in GenderednessBin:
            assert model.generate(bin_, GenerationConfig()) == ["the", "king"]

    def test_beam_one_equals_greedy(self, tiny_model):
        config = GenerationConfig(beam_width=1)
        tokens = []
        context = [BOS]
        for step in range(config.max_length):
            blocked = {BOS} if step else {BOS, EOS}
            best = min(
                tiny_model.vocab - blocked,
                key=lambda t: (-tiny_model.prob(MALE, context, t), t),
            )
            if best == EOS:
                break
            tokens.append(best)
            context = (context + [best])[-1:]
        assert tiny_model.generate(MALE, config) == tokens

    def test_mode_seeking_majority(self):
        examples = [example("the king", MALE)] * 8 + [example("the queen", FEMALE)] * 2
        model = train(examples, order=2, interpolation_lambda=0.0, min_count=1)
        assert model.generate(NEUTRAL, GenerationConfig()) == ["the", "king"]

    def test_deterministic(self, tiny_model):
        config = GenerationConfig()
        first = tiny_model.generate(FEMALE, config)
        assert all(tiny_model.generate(FEMALE, config) == first for _ in range(3))

    def test_max_length_truncates(self):
        # "a a" responses make "a" self-sustaining; max_length must stop it
        examples = [example("a a a a a a", NEUTRAL)] * 3
        model = train(examples, order=2, min_count=1)
        out = model.generate(NEUTRAL, GenerationConfig(max_length=4))
        assert len(out) <= 4

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GenerationConfig(beam_width=0)
        with pytest.raises(ValueError):
            GenerationConfig(max_length=0)


class TestSerialization:
    def test_round_trip_exact(self, tiny_model, tmp_path):
        path = tmp_path / "model.json"
        save_model(tiny_model, path)
        assert load_model(path) == tiny_model

    def test_round_trip_preserves_generation(self, tiny_model, tmp_path):
        path = tmp_path / "model.json"
        save_model(tiny_model, path)
        loaded = load_model(path)
        config = GenerationConfig()
        for bin_ in GenderednessBin:
            assert loaded.generate(bin_, config) == tiny_model.generate(bin_, config)

    def test_format_tag_checked(self, tmp_path):
        path = tmp_path / "bogus.json"
        path.write_text('{"format": "other"}', encoding="utf-8")
        with pytest.raises(ValueError, match="format"):
            load_model(path)
