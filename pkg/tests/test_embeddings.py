import numpy as np
import pytest

from dtrkit.corpus import AuthorDoc, Corpus, build_vocabulary
from dtrkit.embeddings import (
    EmbeddingConfig,
    load_embeddings,
    nearest_neighbors,
    read_word2vec,
    save_embeddings,
    train_skipgram,
)
from dtrkit.representations import TermMatrix

from conftest import corpus_from_tokens


def identical_context_corpus(repeats=40):
    """'x' and 'y' always appear between open/close; 'z' lives elsewhere."""
    lines = []
    for _ in range(repeats):
        lines.append("open x close")
        lines.append("open y close")
        lines.append("front z back")
    docs = [AuthorDoc.from_text("a0", " . ".join(lines), {"t": "1"})]
    return Corpus(docs, frozenset({"t"}))


def cosine(u, v):
    return float(u @ v / (np.linalg.norm(u) * np.linalg.norm(v)))


class TestTrainSkipgram:
    def test_output_shape(self):
        corpus = corpus_from_tokens([["a", "b", "c", "a", "b"]])
        vocab = build_vocabulary(corpus)
        tm = train_skipgram(corpus, vocab, EmbeddingConfig(dim=7, epochs=1, seed=0))
        assert tm.rep_kind == "EMBEDDING"
        assert tm.matrix.shape == (len(vocab), 7)

    def test_identical_contexts_beat_disjoint_ones(self):
        corpus = identical_context_corpus()
        vocab = build_vocabulary(corpus)
        wins = 0
        for seed in range(5):
            cfg = EmbeddingConfig(dim=16, window=2, epochs=10, seed=seed)
            tm = train_skipgram(corpus, vocab, cfg)
            x, y, z = (tm.row(t) for t in ("x", "y", "z"))
            if cosine(x, y) > cosine(x, z):
                wins += 1
        assert wins >= 4

    def test_objective_improves(self):
        corpus = identical_context_corpus(repeats=20)
        vocab = build_vocabulary(corpus)
        tm = train_skipgram(corpus, vocab, EmbeddingConfig(dim=12, epochs=5, seed=1))
        objective = tm.meta["objective"]
        assert len(objective) == 5
        assert objective[-1] <= objective[0]

    def test_reproducible_bit_for_bit(self):
        corpus = identical_context_corpus(repeats=5)
        vocab = build_vocabulary(corpus)
        cfg = EmbeddingConfig(dim=9, epochs=2, seed=77)
        first = train_skipgram(corpus, vocab, cfg)
        second = train_skipgram(corpus, vocab, cfg)
        np.testing.assert_array_equal(first.matrix, second.matrix)

    def test_no_nan_or_inf(self):
        corpus = identical_context_corpus(repeats=10)
        vocab = build_vocabulary(corpus)
        cfg = EmbeddingConfig(dim=8, epochs=3, initial_lr=0.5, seed=2)
        tm = train_skipgram(corpus, vocab, cfg)
        assert np.isfinite(tm.dense()).all()

    def test_min_count_zeroes_rare_terms(self):
        corpus = corpus_from_tokens([["a", "a", "a", "b", "a", "rare"]])
        vocab = build_vocabulary(corpus)
        cfg = EmbeddingConfig(dim=4, epochs=1, min_count=2, seed=0)
        tm = train_skipgram(corpus, vocab, cfg)
        np.testing.assert_array_equal(tm.row("rare"), 0.0)

    def test_empty_vocabulary_rejected(self):
        corpus = corpus_from_tokens([["a"]])
        vocab = build_vocabulary(corpus)
        vocab.terms.clear()
        vocab.index.clear()
        with pytest.raises(ValueError, match="vocabulary"):
            train_skipgram(corpus, vocab, EmbeddingConfig(dim=2))

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            EmbeddingConfig(dim=0)
        with pytest.raises(ValueError):
            EmbeddingConfig(window=0)
        with pytest.raises(ValueError):
            EmbeddingConfig(initial_lr=-1.0)


class TestWord2vecFormat:
    def test_save_load_roundtrip(self, tmp_path, rng):
        corpus = corpus_from_tokens([["a", "b", "c"]])
        vocab = build_vocabulary(corpus)
        tm = TermMatrix("EMBEDDING", list(vocab.terms), rng.normal(size=(3, 4)))
        path = tmp_path / "vec.txt"
        save_embeddings(tm, path)
        back = load_embeddings(path, vocab)
        np.testing.assert_array_equal(back.dense(), tm.dense())
        assert back.meta["coverage"] == 1.0

    def test_partial_coverage(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("3 2\nfoo 1 2\nbar 3 4\nbaz 5 6\n", encoding="utf-8")
        corpus = corpus_from_tokens([["foo", "baz", "novel"]])
        vocab = build_vocabulary(corpus)
        tm = load_embeddings(path, vocab)
        assert tm.meta["coverage"] == pytest.approx(2 / 3)
        np.testing.assert_array_equal(tm.row("foo"), [1.0, 2.0])
        np.testing.assert_array_equal(tm.row("novel"), [0.0, 0.0])

    def test_wrong_column_count_reports_line(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 50\nfoo " + " ".join(["0"] * 50) + "\nbar " + " ".join(["0"] * 49) + "\n")
        corpus = corpus_from_tokens([["foo"]])
        with pytest.raises(ValueError, match=":3:"):
            load_embeddings(path, build_vocabulary(corpus))

    def test_malformed_header(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("not-a-header\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":1:"):
            read_word2vec(path)

    def test_header_count_mismatch(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("5 2\nfoo 1 2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="announces"):
            read_word2vec(path)

    def test_duplicate_words_keep_first(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 1\nfoo 1\nfoo 2\n", encoding="utf-8")
        corpus = corpus_from_tokens([["foo"]])
        tm = load_embeddings(path, build_vocabulary(corpus))
        np.testing.assert_array_equal(tm.row("foo"), [1.0])


class TestNearestNeighbors:
    def matrix(self):
        return TermMatrix(
            "EMBEDDING",
            ["a", "b", "c", "d"],
            np.array(
                [
                    [1.0, 0.0],
                    [1.0, 0.0],  # identical to a
                    [0.0, 1.0],
                    [1.0, 1.0],
                ]
            ),
        )

    def test_identical_vector_ranks_first(self):
        got = nearest_neighbors(self.matrix(), "a", 3)
        assert got[0] == ("b", pytest.approx(1.0))

    def test_k_capped(self):
        assert len(nearest_neighbors(self.matrix(), "a", 99)) == 3

    def test_matches_brute_force_cosines(self):
        tm = self.matrix()
        dense = tm.dense()
        query = dense[0]
        sims = {
            term: cosine(query, dense[i]) for i, term in enumerate(tm.terms) if i != 0
        }
        want = sorted(sims.items(), key=lambda kv: (-kv[1], kv[0]))
        got = nearest_neighbors(tm, "a", 3)
        assert [t for t, _ in got] == [t for t, _ in want]
        for (_, gs), (_, ws) in zip(got, want):
            assert gs == pytest.approx(ws)

    def test_unknown_term(self):
        with pytest.raises(KeyError):
            nearest_neighbors(self.matrix(), "zzz", 1)

    def test_tie_breaks_lexicographic(self):
        tm = TermMatrix(
            "EMBEDDING",
            ["q", "m", "z", "b"],
            np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]),
        )
        assert [t for t, _ in nearest_neighbors(tm, "q", 3)] == ["b", "m", "z"]
