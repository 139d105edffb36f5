import pytest

from dynview.controltext import (SEP_TOKEN, TagVocab, build_control_sentence,
                                 demo_vocab, drop_tags, format_queries,
                                 parse_tags, split_control_sentence,
                                 threshold_tags)


class TestTagVocab:
    def test_demo_vocab_loads(self):
        vocab = demo_vocab()
        assert len(vocab) == 50
        assert "white dog" in vocab and "sofa" in vocab

    def test_rejects_duplicates_and_case(self):
        with pytest.raises(ValueError):
            TagVocab(("dog", "dog"))
        with pytest.raises(ValueError):
            TagVocab(("Dog",))

    def test_from_file(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("dog\n\nsofa\n", encoding="utf-8")
        vocab = TagVocab.from_file(path)
        assert vocab.tags == ("dog", "sofa")


class TestParseTags:
    def test_white_dog_sofa(self):
        tags = parse_tags("A white dog lying on a sofa", demo_vocab())
        assert tags == ["white dog", "sofa"]

    def test_empty_caption(self):
        assert parse_tags("", demo_vocab()) == []

    def test_no_vocab_words(self):
        assert parse_tags("quantum flux capacitors", demo_vocab()) == []

    def test_longest_match_wins(self):
        vocab = TagVocab(("dog", "white dog"))
        assert parse_tags("the white dog barks", vocab) == ["white dog"]

    def test_non_overlapping_and_first_occurrence_order(self):
        vocab = TagVocab(("dog", "cat"))
        assert parse_tags("dog, cat and dog again", vocab) == ["dog", "cat"]

    def test_punctuation_stripped(self):
        assert parse_tags("A sofa; a white dog!", demo_vocab()) == ["sofa", "white dog"]

    def test_output_subset_of_vocab(self):
        vocab = demo_vocab()
        tags = parse_tags("red car near a wooden table under blue sky", vocab)
        assert all(t in vocab for t in tags)


class TestDropTags:
    TAGS = [f"tag{i}" for i in range(10)]

    def test_keep_all(self):
        for seed in range(20):
            assert drop_tags(self.TAGS, 1.0, seed) == self.TAGS

    def test_keep_none(self):
        assert drop_tags(self.TAGS, 0.0, 7) == []

    def test_deterministic_and_order_preserving(self):
        a = drop_tags(self.TAGS, 0.5, seed=11)
        assert a == drop_tags(self.TAGS, 0.5, seed=11)
        assert a == [t for t in self.TAGS if t in a]

    def test_monte_carlo_keep_rate(self):
        trials = 10_000
        total = sum(len(drop_tags(self.TAGS, 0.5, seed)) for seed in range(trials))
        assert abs(total / trials - 5.0) <= 0.1

    def test_bad_prob(self):
        with pytest.raises(ValueError):
            drop_tags(self.TAGS, 1.5, 0)


class TestBuildControlSentence:
    def test_example(self):
        assert build_control_sentence(["white dog", "sofa"]) == "white dog, sofa[SEP]"

    def test_empty(self):
        assert build_control_sentence([]) == SEP_TOKEN

    def test_shuffle_deterministic(self):
        tags = [f"t{i}" for i in range(8)]
        a = build_control_sentence(tags, shuffle_seed=5)
        assert a == build_control_sentence(tags, shuffle_seed=5)

    def test_round_trip_multiset(self):
        tags = ["dog", "sofa", "red car"]
        sent = build_control_sentence(tags, shuffle_seed=3)
        assert sent.endswith(SEP_TOKEN)
        assert sorted(split_control_sentence(sent)) == sorted(tags)

    def test_round_trip_empty(self):
        assert split_control_sentence(SEP_TOKEN) == []


class TestFormatQueries:
    def test_category(self):
        assert format_queries("category", ["cat"]) == ["a photo of a cat"]

    def test_attribute(self):
        assert format_queries("attribute", ["red color"]) == ["the object has red color"]

    def test_empty_names(self):
        with pytest.raises(ValueError):
            format_queries("category", [])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            format_queries("verb", ["runs"])


class TestThresholdTags:
    def test_tau_zero_keeps_positive(self):
        scores = [("a", 0.9), ("b", 0.3), ("c", 0.0)]
        assert threshold_tags(scores, 0.0) == ["a", "b"]

    def test_tau_one_empty(self):
        assert threshold_tags([("a", 0.9)], 1.0) == []

    def test_strict_threshold_and_sorting(self):
        scores = [("a", 0.9), ("b", 0.3), ("c", 0.95)]
        assert threshold_tags(scores, 0.5) == ["c", "a"]
        assert threshold_tags([("a", 0.5)], 0.5) == []
