"""Independent brute-force oracles used to pin expected values.

Everything here is written against the definitions directly (double loops,
full enumeration) and never calls into the library's own computation paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.stats import rankdata


def naive_dor(doc_tokens: list[list[str]], vocab_terms: list[str]) -> np.ndarray:
    """Double-loop document-occurrence weights over explicit token lists."""
    n_terms = len(vocab_terms)
    n_docs = len(doc_tokens)
    vocab_set = set(vocab_terms)
    out = np.zeros((n_terms, n_docs))
    for j, tokens in enumerate(doc_tokens):
        distinct_in_doc = {t for t in tokens if t in vocab_set}
        n_j = len(distinct_in_doc)
        for i, term in enumerate(vocab_terms):
            count = tokens.count(term)
            if count > 0 and n_j > 0:
                out[i, j] = (1.0 + math.log(count)) * math.log(n_terms / n_j)
    return out


def naive_tcor(
    doc_tokens: list[list[str]], vocab_terms: list[str], idf_mode: str = "feature-term"
) -> np.ndarray:
    """Double-loop term-co-occurrence weights over explicit token lists."""
    n_terms = len(vocab_terms)
    doc_sets = [set(tokens) & set(vocab_terms) for tokens in doc_tokens]

    def co_docs(a: str, b: str) -> int:
        return sum(1 for s in doc_sets if a in s and b in s)

    def partners(term: str) -> int:
        return sum(
            1
            for other in vocab_terms
            if other != term and co_docs(term, other) > 0
        )

    out = np.zeros((n_terms, n_terms))
    for i, t_i in enumerate(vocab_terms):
        for j, t_j in enumerate(vocab_terms):
            if i == j:
                continue
            n_ij = co_docs(t_i, t_j)
            if n_ij == 0:
                continue
            anchor = t_j if idf_mode == "feature-term" else t_i
            n_partners = partners(anchor)
            if n_partners == 0:
                continue
            out[i, j] = (1.0 + math.log(n_ij)) * math.log(n_terms / n_partners)
    return out


def brute_force_wilcoxon(a, b) -> tuple[float, float, int]:
    """Exact two-sided signed-rank p by enumerating every sign assignment.

    Returns (W, p, n) with W = min(W+, W-) of the observed differences and
    p = P(min(T+, T-) <= W) over all 2^n equally likely sign vectors.
    """
    diffs = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    diffs = diffs[diffs != 0]
    n = diffs.size
    ranks = rankdata(np.abs(diffs))
    w_obs = min(ranks[diffs > 0].sum(), ranks[diffs < 0].sum())
    favorable = 0
    for signs in itertools.product((1.0, -1.0), repeat=n):
        t_plus = sum(r for r, s in zip(ranks, signs) if s > 0)
        t_minus = ranks.sum() - t_plus
        if min(t_plus, t_minus) <= w_obs + 1e-9:
            favorable += 1
    return float(w_obs), favorable / (2.0**n), int(n)


def best_two_partition_sse(points: np.ndarray) -> frozenset[frozenset[int]]:
    """All optimal 2-partitions of row indices by within-cluster squared error."""
    n = len(points)
    best = None
    best_sse = np.inf
    for bits in itertools.product((0, 1), repeat=n):
        if len(set(bits)) < 2:
            continue
        sse = 0.0
        for side in (0, 1):
            members = points[[i for i in range(n) if bits[i] == side]]
            center = members.mean(axis=0)
            sse += ((members - center) ** 2).sum()
        key = frozenset(
            frozenset(i for i in range(n) if bits[i] == side) for side in (0, 1)
        )
        if sse < best_sse - 1e-12:
            best_sse = sse
            best = {key}
        elif abs(sse - best_sse) <= 1e-12 and best is not None:
            best.add(key)
    return best
