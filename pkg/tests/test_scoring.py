import numpy as np
import pytest

import oracle
import toy_data
from damteval import (
    ConfigError,
    EmptySystemSet,
    compute_corpus_difficulty,
    difficulty_histogram,
    score_corpus,
    system_bleu_scores,
)
from damteval.corpus import bind_embeddings, load_text_corpus
from damteval.scoring import resolve_thread_count



class TestScoreCorpus:
    def test_matches_frozen_oracle_values(self, toy_corpus, toy_expected):
        rows = {r.system: r for r in score_corpus(toy_corpus)}
        for name, expected in toy_expected["systems"].items():
            row = rows[name]
            assert row.precision == pytest.approx(expected["precision"], abs=1e-9)
            assert row.recall == pytest.approx(expected["recall"], abs=1e-9)
            assert row.f == pytest.approx(expected["f"], abs=1e-9)
            assert row.da_precision == pytest.approx(
                expected["da_precision"], abs=1e-9
            )
            assert row.da_recall == pytest.approx(expected["da_recall"], abs=1e-9)
            assert row.da_f == pytest.approx(expected["da_f"], abs=1e-9)

    def test_matches_live_oracle(self, toy_corpus):
        live = oracle.pipeline(toy_data.REFERENCE, toy_data.SYSTEMS)
        rows = {r.system: r for r in score_corpus(toy_corpus)}
        for name, expected in live["systems"].items():
            assert rows[name].da_f == pytest.approx(expected["da_f"], abs=1e-9)

    def test_rows_sorted_by_system(self, toy_corpus):
        assert [r.system for r in score_corpus(toy_corpus)] == [
            "sysA",
            "sysB",
            "sysC",
        ]

    def test_no_difficulty_mode(self, toy_corpus, toy_expected):
        rows = {r.system: r for r in score_corpus(toy_corpus, with_difficulty=False)}
        for name, expected in toy_expected["systems"].items():
            row = rows[name]
            assert row.f == pytest.approx(expected["f"], abs=1e-9)
            assert row.da_f is None and row.da_precision is None

    def test_exclude_self_uses_leave_one_out_weights(self, toy_corpus):
        rows = {r.system: r for r in score_corpus(toy_corpus, exclude_self=True)}
        names = sorted(toy_data.SYSTEMS)
        for name in names:
            others = [n for n in names if n != name]
            total = 0.0
            for i, (ref_tokens, ref_rows) in enumerate(toy_data.REFERENCE):
                weights = oracle.difficulty_weights(
                    ref_rows, [toy_data.SYSTEMS[n][i][1] for n in others]
                )
                hyp_tokens, hyp_rows = toy_data.SYSTEMS[name][i]
                total += oracle.da_scores(
                    ref_tokens, ref_rows, hyp_tokens, hyp_rows, weights
                )["da_f"]
            assert rows[name].da_f == pytest.approx(total / 2, abs=1e-9)

    def test_exclude_self_needs_two_systems(self, toy_tree):
        from damteval.corpus import read_emb1

        corpus = load_text_corpus(
            toy_tree["refs"], [toy_tree["hyps"] / "sysA.txt"]
        )
        corpus = bind_embeddings(
            corpus,
            read_emb1(toy_tree["embs"] / "ref.emb1"),
            {"sysA": read_emb1(toy_tree["embs"] / "sysA.emb1")},
        )
        with pytest.raises(EmptySystemSet):
            score_corpus(corpus, exclude_self=True)

    def test_thread_count_does_not_change_results(self, toy_corpus):
        one = score_corpus(toy_corpus, threads=1)
        eight = score_corpus(toy_corpus, threads=8)
        for a, b in zip(one, eight):
            assert a == b  # dataclass equality: bit-identical floats

    def test_requires_embeddings(self, toy_tree):
        corpus = load_text_corpus(
            toy_tree["refs"], sorted(toy_tree["hyps"].iterdir())
        )
        with pytest.raises(ConfigError, match="embeddings"):
            score_corpus(corpus)

    def test_binding_order_is_bit_identical(self, toy_tree):
        from damteval.corpus import read_emb1

        paths = sorted(toy_tree["hyps"].iterdir())
        ref_emb = read_emb1(toy_tree["embs"] / "ref.emb1")
        sys_embs = {
            p.stem: read_emb1(toy_tree["embs"] / f"{p.stem}.emb1") for p in paths
        }

        def run(order):
            corpus = load_text_corpus(toy_tree["refs"], [paths[i] for i in order])
            return score_corpus(bind_embeddings(corpus, ref_emb, sys_embs))

        assert run([0, 1, 2]) == run([2, 1, 0])


class TestResolveThreadCount:
    def test_explicit(self):
        assert resolve_thread_count(3) == 3

    def test_env_var(self, monkeypatch):
        monkeypatch.setenv("DAMTEVAL_THREADS", "5")
        assert resolve_thread_count() == 5

    def test_zero_is_auto(self, monkeypatch):
        monkeypatch.setenv("DAMTEVAL_THREADS", "0")
        assert resolve_thread_count() >= 1

    def test_invalid_env(self, monkeypatch):
        monkeypatch.setenv("DAMTEVAL_THREADS", "many")
        with pytest.raises(ConfigError):
            resolve_thread_count()

    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            resolve_thread_count(-1)


class TestCorpusDifficulty:
    def test_matches_frozen_weights(self, toy_corpus, toy_expected):
        maps = compute_corpus_difficulty(toy_corpus)
        for i, dmap in enumerate(maps):
            assert dmap.segment_index == i
            assert dmap.weights == pytest.approx(
                np.array(toy_expected["weights"][i]), abs=1e-9
            )

    def test_subset_matches_oracle(self, toy_corpus):
        maps = compute_corpus_difficulty(toy_corpus, systems=["sysA"])
        for i, (tokens, rows) in enumerate(toy_data.REFERENCE):
            expected = oracle.difficulty_weights(
                rows, [toy_data.SYSTEMS["sysA"][i][1]]
            )
            assert maps[i].weights == pytest.approx(np.array(expected), abs=1e-9)
            assert maps[i].k_systems == 1

    def test_unknown_subset_system(self, toy_corpus):
        with pytest.raises(ConfigError, match="unknown"):
            compute_corpus_difficulty(toy_corpus, systems=["nope"])


class TestDifficultyHistogram:
    def test_identical_systems_mass_in_first_bin(self):
        counts = difficulty_histogram(np.zeros(100), bins=50)
        assert counts[0] == (0.0, 100)
        assert all(c == 0 for _, c in counts[1:])

    def test_bin_edges_cover_zero_to_two(self):
        hist = difficulty_histogram(np.array([0.0, 1.0, 1.999, 2.0]), bins=4)
        assert [lower for lower, _ in hist] == [0.0, 0.5, 1.0, 1.5]
        assert [count for _, count in hist] == [1, 0, 1, 2]

    def test_total_mass_preserved_with_clipping(self):
        weights = np.array([-0.5, 0.2, 1.0, 2.5])
        hist = difficulty_histogram(weights, bins=10)
        assert sum(c for _, c in hist) == 4

    def test_bad_bins(self):
        with pytest.raises(ConfigError):
            difficulty_histogram(np.zeros(1), bins=0)


class TestSystemBleu:
    def test_per_system_scores(self, tmp_path):
        refs = tmp_path / "refs.txt"
        refs.write_text("the cat sat on the mat\nthe dog barked loudly today\n")
        hyps = tmp_path / "hyps"
        hyps.mkdir()
        (hyps / "perfect.txt").write_text(
            "the cat sat on the mat\nthe dog barked loudly today\n"
        )
        (hyps / "noisy.txt").write_text(
            "the cat sat on a mat\na dog barked loudly today\n"
        )
        corpus = load_text_corpus(refs, sorted(hyps.iterdir()))
        scores = system_bleu_scores(corpus)
        assert scores["perfect"] == 1.0
        assert 0.0 < scores["noisy"] < 1.0
