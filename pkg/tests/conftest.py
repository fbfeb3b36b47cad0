import numpy as np
import pytest

from dtrkit.corpus import AuthorDoc, Corpus


def corpus_from_tokens(token_lists, labels=None, task="cat"):
    """Build a corpus whose documents tokenize exactly to the given lists.

    Token lists must contain plain lowercase alphanumeric words so that
    joining with spaces round-trips through the tokenizer.
    """
    docs = []
    for i, tokens in enumerate(token_lists):
        label = labels[i] if labels is not None else "x"
        docs.append(
            AuthorDoc.from_text(f"doc{i:03d}", " ".join(tokens), {task: label})
        )
    return Corpus(docs, frozenset({task}))


def random_token_lists(rng, max_docs=5, max_terms=10, max_len=30):
    """Random micro-corpus token lists over a tiny alphabet."""
    alphabet = [f"t{i}" for i in range(int(rng.integers(2, max_terms + 1)))]
    n_docs = int(rng.integers(1, max_docs + 1))
    lists = []
    for _ in range(n_docs):
        length = int(rng.integers(1, max_len + 1))
        lists.append([alphabet[int(k)] for k in rng.integers(0, len(alphabet), length)])
    return lists


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
