import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from damteval import AlignmentError, EmptyCorpus, corpus_bleu, segment_stats

tokens = st.lists(st.sampled_from("the a cat dog sat mat on".split()), max_size=10)
corpora = st.lists(st.tuples(tokens, tokens), min_size=1, max_size=6)


class TestSegmentStats:
    def test_clipping_rule(self):
        stats = segment_stats("the cat".split(), "the the the".split())
        assert stats.matches[0] == 1  # "the" clipped to its reference count
        assert stats.totals[0] == 3

    def test_lengths(self):
        stats = segment_stats(["a", "b", "c"], ["a", "b"])
        assert stats.ref_len == 3 and stats.hyp_len == 2

    @given(tokens, tokens)
    def test_matches_never_exceed_totals_or_reference_counts(self, ref, hyp):
        stats = segment_stats(ref, hyp)
        ref_stats = segment_stats(ref, ref)
        for n in range(4):
            assert 0 <= stats.matches[n] <= stats.totals[n]
            assert stats.matches[n] <= ref_stats.totals[n]


class TestCorpusBleu:
    def test_identical_corpus_scores_one(self):
        refs = [["a", "b", "c", "d"], ["the", "cat", "sat", "on", "mat"]]
        assert corpus_bleu(refs, refs) == 1.0

    def test_zero_fourgram_overlap_scores_zero(self):
        assert corpus_bleu([["a", "b", "c", "e"]], [["a", "b", "c", "d"]]) == 0.0

    def test_unigram_precision_with_clipping(self):
        stats = segment_stats("the cat".split(), "the the the".split())
        assert stats.matches[0] / stats.totals[0] == pytest.approx(1 / 3)

    def test_brevity_penalty(self):
        ref = [["a", "b", "c", "d", "e"]]
        hyp = [["a", "b", "c", "d"]]
        # all modified precisions are 1; only the penalty remains
        assert corpus_bleu(ref, hyp) == pytest.approx(math.exp(1 - 5 / 4), abs=1e-12)

    def test_no_penalty_for_longer_hypothesis(self):
        ref = [["a", "b", "c", "d"]]
        hyp = [["a", "b", "c", "d", "e"]]
        expected = math.exp(
            (math.log(4 / 5) + math.log(3 / 4) + math.log(2 / 3) + math.log(1 / 2)) / 4
        )
        assert corpus_bleu(ref, hyp) == pytest.approx(expected, abs=1e-12)

    def test_short_segments_zero_totals_score_zero(self):
        assert corpus_bleu([["a", "b"]], [["a", "b"]]) == 0.0

    def test_empty_hypothesis_scores_zero(self):
        assert corpus_bleu([["a", "b", "c", "d"]], [[]]) == 0.0

    def test_alignment_error(self):
        with pytest.raises(AlignmentError):
            corpus_bleu([["a"]], [["a"], ["b"]])

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpus):
            corpus_bleu([], [])

    @given(corpora)
    @settings(max_examples=100)
    def test_range(self, pairs):
        refs = [r for r, _ in pairs]
        hyps = [h for _, h in pairs]
        assert 0.0 <= corpus_bleu(refs, hyps) <= 1.0

    @given(corpora, st.randoms())
    @settings(max_examples=100)
    def test_segment_order_invariance(self, pairs, rng):
        refs = [r for r, _ in pairs]
        hyps = [h for _, h in pairs]
        base = corpus_bleu(refs, hyps)
        order = list(range(len(pairs)))
        rng.shuffle(order)
        shuffled = corpus_bleu([refs[i] for i in order], [hyps[i] for i in order])
        assert shuffled == pytest.approx(base, abs=1e-12)

    def test_identity_needs_four_tokens_per_segment(self):
        refs = [["a", "b", "c", "d"], ["x", "y", "z", "w", "v"]]
        assert corpus_bleu(refs, refs) == 1.0
