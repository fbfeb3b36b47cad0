"""Cross-validated evaluation with leakage-safe per-fold features, paired
significance testing, collection characteristics, and interpretability
reports."""

from __future__ import annotations

import dataclasses
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import classifier, embeddings, representations
from .corpus import Corpus, Vocabulary, build_vocabulary
from .stopwords import default_stopwords

__all__ = [
    "REP_KINDS",
    "CHARACTERISTICS",
    "RepConfig",
    "ClfConfig",
    "FoldResult",
    "EvalReport",
    "WilcoxonResult",
    "CollectionStats",
    "stratified_kfold",
    "cross_validate",
    "attach_significance",
    "accuracy",
    "wilcoxon_signed_rank",
    "collection_stats",
    "pearson",
    "correlation_map",
    "correlation_map_to_csv",
    "top_terms_tfidf",
    "information_gain",
    "report_to_json",
    "reports_to_accuracy_csv",
]

REP_KINDS = ("bow", "dor", "tcor", "ssr", "w2v-train", "w2v-pretrained")

CHARACTERISTICS = ("ttr", "ld", "sx", "shortness", "imbalance", "hardness")


# ---------------------------------------------------------------------------
# Experiment configuration
# ---------------------------------------------------------------------------


@dataclass
class RepConfig:
    """Representation to build per fold, with its knobs."""

    kind: str = "bow"
    max_terms: int = 10_000
    weighting: str = "mean"  # term-vector aggregation for the DTR kinds
    k_per_class: int = 3  # ssr subprofiles per category
    tcor_idf: str = "feature-term"
    embedding: embeddings.EmbeddingConfig | None = None
    pretrained_path: str | None = None
    rep_id: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in REP_KINDS:
            raise ValueError(f"representation kind must be one of {REP_KINDS}, got {self.kind!r}")
        if self.kind == "w2v-pretrained" and not self.pretrained_path:
            raise ValueError("w2v-pretrained requires pretrained_path")

    @property
    def id(self) -> str:
        return self.rep_id or self.kind


@dataclass
class ClfConfig:
    C: float = 1.0
    bow_weighting: str = "tf"
    standardize: bool = False  # per-dimension training-fold standardization


# ---------------------------------------------------------------------------
# Folds, accuracy, reports
# ---------------------------------------------------------------------------


def stratified_kfold(labels, k: int = 10, seed: int = 0) -> list[list[int]]:
    """Disjoint test-index folds with per-category counts differing by <= 1.

    Categories smaller than ``k`` are spread round-robin (some folds simply
    get none of them).  Deterministic for a fixed seed.
    """
    labels = [str(lab) for lab in labels]
    n = len(labels)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed % (2**63))
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for cat in sorted(set(labels)):
        idx = np.array([i for i, lab in enumerate(labels) if lab == cat], dtype=np.int64)
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            folds[(offset + j) % k].append(int(i))
        offset = (offset + len(idx)) % k
    return [sorted(fold) for fold in folds]


def accuracy(pred, truth) -> float:
    """Fraction of exact matches between two equal-length label sequences."""
    pred = list(pred)
    truth = list(truth)
    if len(pred) != len(truth):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(truth)} truths")
    if not pred:
        raise ValueError("cannot score empty label lists")
    return sum(p == t for p, t in zip(pred, truth)) / len(pred)


@dataclass
class FoldResult:
    fold: int
    predictions: dict[str, str]
    accuracy: float
    rep_dims: int


@dataclass
class EvalReport:
    rep_id: str
    task: str
    k: int
    seed: int
    folds: list[FoldResult]
    mean_accuracy: float
    significance: dict[str, "WilcoxonResult"] = field(default_factory=dict)
    corpus_name: str | None = None
    fold_matrices: list | None = field(default=None, repr=False, compare=False)

    def fold_accuracies(self) -> list[float]:
        return [f.accuracy for f in self.folds]

    def to_dict(self) -> dict:
        return {
            "representation": self.rep_id,
            "task": self.task,
            "k": self.k,
            "seed": self.seed,
            "corpus": self.corpus_name,
            "mean_accuracy": self.mean_accuracy,
            "folds": [
                {
                    "fold": f.fold,
                    "accuracy": f.accuracy,
                    "rep_dims": f.rep_dims,
                    "predictions": dict(sorted(f.predictions.items())),
                }
                for f in self.folds
            ],
            "significance": {
                name: {
                    "statistic": res.statistic,
                    "p_value": res.p_value,
                    "significant": res.significant,
                    "n": res.n,
                    "method": res.method,
                }
                for name, res in sorted(self.significance.items())
            },
        }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def reports_to_accuracy_csv(reports: dict[str, EvalReport]) -> str:
    """Per-fold accuracy matrix: one row per representation, one column per fold."""
    if not reports:
        raise ValueError("no reports given")
    k = next(iter(reports.values())).k
    lines = ["representation," + ",".join(f"fold{j}" for j in range(k)) + ",mean"]
    for rep_id in sorted(reports):
        rep = reports[rep_id]
        accs = ",".join(repr(a) for a in rep.fold_accuracies())
        lines.append(f"{rep_id},{accs},{rep.mean_accuracy!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Cross-validation pipeline
# ---------------------------------------------------------------------------


def _fold_seed(seed: int, fold_idx: int) -> int:
    state = np.random.SeedSequence([seed % (2**63), fold_idx]).generate_state(1, np.uint64)[0]
    return int(state % (2**63))


def _build_term_matrix(train: Corpus, task: str, vocab: Vocabulary, rep: RepConfig, fold_seed: int):
    if rep.kind == "dor":
        return representations.build_dor(train, vocab)
    if rep.kind == "tcor":
        return representations.build_tcor(train, vocab, idf_mode=rep.tcor_idf)
    if rep.kind == "ssr":
        assignment = representations.cluster_subprofiles(
            train, task, vocab, k_per_class=rep.k_per_class, seed=fold_seed
        )
        return representations.build_ssr(train, vocab, assignment)
    if rep.kind == "w2v-train":
        cfg = rep.embedding or embeddings.EmbeddingConfig()
        cfg = dataclasses.replace(cfg, seed=fold_seed)
        return embeddings.train_skipgram(train, vocab, cfg)
    if rep.kind == "w2v-pretrained":
        return embeddings.load_embeddings(rep.pretrained_path, vocab)
    raise ValueError(f"unknown representation kind {rep.kind!r}")


def _fold_features(train, test_docs, task, vocab, rep, clf, fold_seed):
    if rep.kind == "bow":
        idf = classifier.compute_idf(train, vocab) if clf.bow_weighting == "tfidf" else None
        x_train = classifier.build_bow_matrix(train.docs, vocab, clf.bow_weighting, idf)
        x_test = classifier.build_bow_matrix(test_docs, vocab, clf.bow_weighting, idf)
        return x_train, x_test, None
    tm = _build_term_matrix(train, task, vocab, rep, fold_seed)
    x_train = representations.aggregate_corpus(train.docs, tm, vocab, rep.weighting)
    x_test = representations.aggregate_corpus(test_docs, tm, vocab, rep.weighting)
    return x_train, x_test, tm


def cross_validate(
    corpus: Corpus,
    task: str,
    rep: RepConfig | None = None,
    clf: ClfConfig | None = None,
    k: int = 10,
    seed: int = 0,
    corpus_name: str | None = None,
    keep_fold_matrices: bool = False,
) -> EvalReport:
    """Stratified k-fold evaluation of one representation on one task.

    Every fold rebuilds the vocabulary and all representation state from the
    training documents only, so no test text, count, or label can leak into
    the features.  All randomness flows from ``seed``.
    """
    rep = rep or RepConfig()
    clf = clf or ClfConfig()
    all_labels = corpus.labels(task)
    folds = stratified_kfold(all_labels, k=k, seed=seed)
    results: list[FoldResult] = []
    matrices: list = []
    for fold_idx, test_idx in enumerate(folds):
        test_set = set(test_idx)
        train_idx = [i for i in range(len(corpus.docs)) if i not in test_set]
        train = corpus.subset(train_idx)
        test_docs = [corpus.docs[i] for i in test_idx]
        fold_seed = _fold_seed(seed, fold_idx)
        vocab = build_vocabulary(train, rep.max_terms)
        x_train, x_test, tm = _fold_features(train, test_docs, task, vocab, rep, clf, fold_seed)
        model = classifier.train_linear_svm(
            x_train,
            [d.labels[task] for d in train.docs],
            C=clf.C,
            seed=fold_seed,
            standardize=clf.standardize,
        )
        preds = classifier.predict(model, x_test)
        acc = accuracy(preds, [d.labels[task] for d in test_docs])
        results.append(
            FoldResult(
                fold=fold_idx,
                predictions={d.author_id: p for d, p in zip(test_docs, preds)},
                accuracy=acc,
                rep_dims=int(x_train.shape[1]),
            )
        )
        if keep_fold_matrices:
            matrices.append(tm)
    mean_acc = float(np.mean([r.accuracy for r in results]))
    return EvalReport(
        rep_id=rep.id,
        task=task,
        k=k,
        seed=seed,
        folds=results,
        mean_accuracy=mean_acc,
        corpus_name=corpus_name,
        fold_matrices=matrices if keep_fold_matrices else None,
    )


def attach_significance(
    report: EvalReport, baselines: dict[str, EvalReport], alpha: float = 0.05
) -> EvalReport:
    """Paired fold-accuracy signed-rank tests against named baseline reports."""
    for name, base in baselines.items():
        if base.k != report.k or base.seed != report.seed:
            raise ValueError(
                f"baseline {name!r} must share the fold partition (same k and seed)"
            )
        report.significance[name] = wilcoxon_signed_rank(
            report.fold_accuracies(), base.fold_accuracies(), alpha=alpha
        )
    return report


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank test
# ---------------------------------------------------------------------------


@dataclass
class WilcoxonResult:
    statistic: float | None
    p_value: float | None
    significant: bool
    n: int
    method: str  # "exact", "normal-approx", or "insufficient-n"

    @property
    def insufficient(self) -> bool:
        return self.method == "insufficient-n"


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _exact_two_sided_p(ranks: np.ndarray, w: float) -> float:
    # Count, over all 2^n sign assignments, how often min(T+, T-) <= w.
    # Doubling makes the (possibly half-integer) average ranks integral, so
    # the sum distribution is an exact integer convolution.
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        r = int(r)
        counts[r:] = counts[r:] + counts[: counts.size - r]
    w2 = int(math.floor(2.0 * w + 1e-9))
    sums = np.arange(total + 1)
    favorable = int(counts[np.minimum(sums, total - sums) <= w2].sum())
    return favorable / (2.0 ** len(ranks))


def _normal_two_sided_p(ranks: np.ndarray, w: float, n: int) -> float:
    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    t = tie_sizes.astype(np.float64)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float((t**3 - t).sum()) / 48.0
    if var <= 0:
        return 1.0
    z = (w - mean + 0.5) / math.sqrt(var)  # continuity correction toward the mean
    return min(1.0, math.erfc(-z / math.sqrt(2.0)))


def wilcoxon_signed_rank(a, b, alpha: float = 0.05, exact_threshold: int = 20) -> WilcoxonResult:
    """Two-sided paired signed-rank test on the differences a[i] - b[i].

    Zero differences are dropped and |differences| are ranked with average
    ranks for ties; the statistic is min(W+, W-).  Up to ``exact_threshold``
    nonzero differences the p-value counts all 2^n sign assignments exactly;
    beyond that a normal approximation with tie and continuity corrections
    is used.  Fewer than five nonzero differences flags the result as
    insufficient (never significant).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("paired samples must be equal-length 1-d sequences")
    diffs = a - b
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n < 5:
        return WilcoxonResult(None, None, False, n, "insufficient-n")
    ranks = _average_ranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    w = min(w_plus, w_minus)
    if n <= exact_threshold:
        p = _exact_two_sided_p(ranks, w)
        method = "exact"
    else:
        p = _normal_two_sided_p(ranks, w, n)
        method = "normal-approx"
    return WilcoxonResult(w, float(p), bool(p <= alpha), n, method)


# ---------------------------------------------------------------------------
# Collection characteristics
# ---------------------------------------------------------------------------


@dataclass
class CollectionStats:
    ttr: float
    ld: float
    sx: float
    shortness: float
    imbalance: float
    hardness: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in CHARACTERISTICS}


def _is_punct_token(token: str) -> bool:
    return not any(ch.isalnum() for ch in token)


def collection_stats(corpus: Corpus, task: str, stopwords=None) -> CollectionStats:
    """Type-token ratio, lexical density, sophistication, mean document
    length, class imbalance, and mean inter-category vocabulary overlap.

    Lexical density approximates content terms as tokens that are neither
    stopwords nor pure punctuation.  Sophistication is the fraction of
    distinct terms longer than the mean term length plus one population
    standard deviation.  Imbalance is the population standard deviation of
    the per-category deviations from a perfectly even split.  Hardness is
    the mean Jaccard overlap between category-level vocabularies.
    """
    if not corpus.docs:
        raise ValueError("corpus is empty")
    stop = default_stopwords() if stopwords is None else {str(s).lower() for s in stopwords}

    total = 0
    content = 0
    distinct: set[str] = set()
    for doc in corpus.docs:
        total += len(doc.tokens)
        distinct.update(doc.counts.keys())
        for term, count in doc.counts.items():
            if term not in stop and not _is_punct_token(term):
                content += count

    ttr = len(distinct) / total if total else 0.0
    ld = content / total if total else 0.0
    if distinct:
        lengths = np.array([len(t) for t in sorted(distinct)], dtype=np.float64)
        sx = float((lengths > lengths.mean() + lengths.std()).mean())
    else:
        sx = 0.0
    shortness = total / len(corpus.docs)

    cats = corpus.categories(task)
    labels = corpus.labels(task)
    cat_counts = np.array([labels.count(cat) for cat in cats], dtype=np.float64)
    ideal = len(corpus.docs) / len(cats)
    imbalance = float(np.sqrt(np.mean((cat_counts - ideal) ** 2)))

    vocabs = {cat: set() for cat in cats}
    for doc in corpus.docs:
        vocabs[doc.labels[task]].update(doc.counts.keys())
    overlaps = []
    for cat_a, cat_b in combinations(cats, 2):
        union = vocabs[cat_a] | vocabs[cat_b]
        overlaps.append(len(vocabs[cat_a] & vocabs[cat_b]) / len(union) if union else 0.0)
    hardness = float(np.mean(overlaps)) if overlaps else 0.0

    return CollectionStats(ttr, ld, sx, shortness, imbalance, hardness)


def pearson(xs, ys) -> float:
    """Sample Pearson correlation; NaN flags zero variance in either input."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.size < 2:
        raise ValueError("pearson needs two equal-length sequences of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return float("nan")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation_map(
    reports: dict[str, dict[str, EvalReport]],
    baseline_reports: dict[str, EvalReport],
    stats: dict[str, CollectionStats],
) -> dict[str, dict[str, float]]:
    """Pearson r between each characteristic and each representation's
    accuracy improvement over the baseline, computed across genres."""
    genres = sorted(reports)
    if sorted(baseline_reports) != genres or sorted(stats) != genres:
        raise ValueError("genre keys must match across reports, baselines, and stats")
    if len(genres) < 2:
        raise ValueError("need at least two genres to correlate")
    rep_ids = sorted(reports[genres[0]])
    for genre in genres:
        if sorted(reports[genre]) != rep_ids:
            raise ValueError(f"representations for genre {genre!r} differ from the others")
    table: dict[str, dict[str, float]] = {}
    for rep_id in rep_ids:
        improvements = [
            reports[g][rep_id].mean_accuracy - baseline_reports[g].mean_accuracy
            for g in genres
        ]
        table[rep_id] = {
            char: pearson([getattr(stats[g], char) for g in genres], improvements)
            for char in CHARACTERISTICS
        }
    return table


def correlation_map_to_csv(table: dict[str, dict[str, float]]) -> str:
    lines = ["representation," + ",".join(CHARACTERISTICS)]
    for rep_id in sorted(table):
        row = table[rep_id]
        lines.append(rep_id + "," + ",".join(repr(row[c]) for c in CHARACTERISTICS))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Interpretability helpers
# ---------------------------------------------------------------------------


def top_terms_tfidf(corpus: Corpus, author_id: str, n: int = 10, stopwords=None) -> list[tuple[str, float]]:
    """The author's top-n terms by tf-idf over the corpus.

    tf is the author's raw count and idf is ln(N / df) over all documents;
    stopwords and pure-punctuation tokens are excluded from the report and
    ties break lexicographically.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    doc = corpus.get(author_id)
    stop = default_stopwords() if stopwords is None else {str(s).lower() for s in stopwords}
    df: Counter = Counter()
    for other in corpus.docs:
        df.update(other.counts.keys())
    n_docs = len(corpus.docs)
    scored = []
    for term, count in doc.counts.items():
        if term in stop or _is_punct_token(term):
            continue
        scored.append((term, count * math.log(n_docs / df[term])))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:n]


def information_gain(values, labels) -> float:
    """Entropy reduction of the labels after a binary split of ``values`` at
    their median (strictly above vs the rest)."""
    values = np.asarray(values, dtype=np.float64)
    labels = [str(lab) for lab in labels]
    if values.size != len(labels) or values.size == 0:
        raise ValueError("values and labels must be non-empty and equal-length")

    def entropy(subset: list[str]) -> float:
        counts = np.array(sorted(Counter(subset).values()), dtype=np.float64)
        probs = counts / counts.sum()
        return float(-(probs * np.log2(probs)).sum())

    gain = entropy(labels)
    above = values > float(np.median(values))
    for side in (above, ~above):
        if side.any():
            members = [labels[i] for i in np.flatnonzero(side)]
            gain -= (side.sum() / values.size) * entropy(members)
    return max(gain, 0.0)
