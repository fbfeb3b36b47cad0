"""Seeded synthetic author corpora with exclusive per-category vocabularies."""

from __future__ import annotations

import numpy as np

from .corpus import AuthorDoc, Corpus

__all__ = ["make_synthetic_corpus"]


def make_synthetic_corpus(
    n_categories: int = 2,
    authors_per_category: int = 100,
    exclusive_terms: int = 30,
    shared_terms: int = 120,
    tokens_per_doc: int = 150,
    topical_fraction: float = 0.5,
    task: str = "topic",
    seed: int = 0,
) -> Corpus:
    """Generate a near-separable labeled corpus.

    Each category owns ``exclusive_terms`` topical words that only its
    authors use; the rest of every document is drawn from a shared
    background vocabulary.  Deterministic for a fixed seed.
    """
    if n_categories < 2:
        raise ValueError("need at least two categories")
    rng = np.random.default_rng(seed % (2**63))
    shared = [f"w{i:03d}" for i in range(shared_terms)]
    docs = []
    for c in range(n_categories):
        cat = f"cat{c}"
        topical = [f"{cat}x{j:02d}" for j in range(exclusive_terms)]
        for a in range(authors_per_category):
            words = []
            for _ in range(tokens_per_doc):
                if rng.random() < topical_fraction:
                    words.append(topical[int(rng.integers(len(topical)))])
                else:
                    words.append(shared[int(rng.integers(len(shared)))])
            docs.append(
                AuthorDoc.from_text(f"{cat}a{a:03d}", " ".join(words), {task: cat})
            )
    docs.sort(key=lambda d: d.author_id)
    return Corpus(docs, frozenset({task}))
