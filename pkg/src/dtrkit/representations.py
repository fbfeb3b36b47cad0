"""Distributional term representations and document aggregation.

Builds one vector per vocabulary term from occurrence statistics (document
occurrence, term co-occurrence, subprofile association) and turns documents
into vectors by convex combination of their term vectors.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .corpus import AuthorDoc, Corpus, Vocabulary

__all__ = [
    "REP_KINDS",
    "TermMatrix",
    "DocVector",
    "SubprofileAssignment",
    "count_matrix",
    "build_dor",
    "build_tcor",
    "cluster_subprofiles",
    "build_ssr",
    "aggregate_documents",
    "aggregate_corpus",
    "save_term_matrix",
    "load_term_matrix",
]

REP_KINDS = ("DOR", "TCOR", "SSR", "EMBEDDING")

AGG_WEIGHTINGS = ("mean", "tf-weighted")

TCOR_IDF_MODES = ("feature-term", "row-term")


@dataclass
class TermMatrix:
    """One row vector per vocabulary term.

    ``matrix`` has shape ``(len(terms), dims)`` and may be dense or CSR
    sparse.  ``feature_names`` labels the columns: author ids for document
    occurrence, terms for co-occurrence, ``"category/cluster"`` for
    subprofiles, absent for embeddings.
    """

    rep_kind: str
    terms: list[str]
    matrix: np.ndarray | sp.spmatrix
    feature_names: list[str] | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.rep_kind not in REP_KINDS:
            raise ValueError(f"rep_kind must be one of {REP_KINDS}, got {self.rep_kind!r}")
        if self.matrix.shape[0] != len(self.terms):
            raise ValueError(
                f"matrix has {self.matrix.shape[0]} rows for {len(self.terms)} terms"
            )
        self._index = {t: i for i, t in enumerate(self.terms)}

    @property
    def dims(self) -> int:
        return self.matrix.shape[1]

    def index_of(self, term: str) -> int:
        if term not in self._index:
            raise KeyError(f"unknown term {term!r}")
        return self._index[term]

    def row(self, term: str) -> np.ndarray:
        r = self.matrix[self.index_of(term)]
        if sp.issparse(r):
            return np.asarray(r.todense(), dtype=np.float64).ravel()
        return np.asarray(r, dtype=np.float64)

    def dense(self) -> np.ndarray:
        if sp.issparse(self.matrix):
            return self.matrix.toarray().astype(np.float64)
        return np.asarray(self.matrix, dtype=np.float64)


@dataclass
class DocVector:
    """Aggregated per-author representation in the term matrix's feature space."""

    values: np.ndarray
    source_author: str


@dataclass
class SubprofileAssignment:
    """Mapping from training authors to within-category subclasses."""

    task: str
    mapping: dict[str, int]
    subclass_labels: list[str]

    @property
    def n_subclasses(self) -> int:
        return len(self.subclass_labels)


def count_matrix(docs: list[AuthorDoc], vocab: Vocabulary) -> sp.csr_matrix:
    """Sparse ``(len(docs), len(vocab))`` matrix of raw in-vocabulary token counts."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        for term, count in doc.counts.items():
            j = vocab.index.get(term)
            if j is not None:
                indices.append(j)
                data.append(float(count))
        indptr.append(len(indices))
    mat = sp.csr_matrix(
        (
            np.asarray(data, dtype=np.float64),
            np.asarray(indices, dtype=np.int64),
            np.asarray(indptr, dtype=np.int64),
        ),
        shape=(len(docs), len(vocab)),
    )
    mat.sort_indices()
    return mat


def _require_nonempty(train: Corpus, vocab: Vocabulary) -> None:
    if not train.docs:
        raise ValueError("training corpus is empty")
    if len(vocab) == 0:
        raise ValueError("vocabulary is empty")


def _log_fn(base: float):
    if base <= 1.0:
        raise ValueError("log base must be greater than 1")
    if base == math.e:
        return np.log
    scale = 1.0 / math.log(base)
    return lambda x: np.log(x) * scale


def build_dor(train: Corpus, vocab: Vocabulary, base: float = math.e) -> TermMatrix:
    """Represent each term by its weighted occurrence profile over documents.

    Entry (i, j) is ``(1 + log c_ij) * log(|V| / N_j)`` when term i occurs
    ``c_ij > 0`` times in document j, and 0 otherwise; ``N_j`` counts the
    distinct vocabulary terms in document j.  A document containing no
    vocabulary terms yields an all-zero column and a warning.
    """
    _require_nonempty(train, vocab)
    counts = count_matrix(train.docs, vocab)
    n_terms = len(vocab)
    distinct = counts.getnnz(axis=1).astype(np.float64)
    empty = np.flatnonzero(distinct == 0)
    if empty.size:
        names = [train.docs[i].author_id for i in empty]
        warnings.warn(f"documents without vocabulary terms get all-zero columns: {names}")
    log = _log_fn(base)
    idf = np.where(distinct > 0, log(n_terms / np.maximum(distinct, 1.0)), 0.0)
    weighted = counts.T.tocsr()
    weighted.data = 1.0 + log(weighted.data)
    weighted = weighted.multiply(idf[np.newaxis, :]).tocsr()
    weighted.eliminate_zeros()
    return TermMatrix(
        "DOR",
        list(vocab.terms),
        weighted,
        feature_names=[doc.author_id for doc in train.docs],
    )


def build_tcor(
    train: Corpus,
    vocab: Vocabulary,
    idf_mode: str = "feature-term",
    base: float = math.e,
) -> TermMatrix:
    """Represent each term by its co-occurrence profile over the vocabulary.

    Entry (i, j) is ``(1 + log n_ij) * log(|V| / V_*)`` where ``n_ij`` counts
    documents containing both terms.  ``V_*`` counts the distinct vocabulary
    terms sharing at least one document with the feature term t_j
    (``feature-term`` mode, default) or with the represented term t_i
    (``row-term`` mode).  The diagonal is zero: a term is not its own context.
    """
    if idf_mode not in TCOR_IDF_MODES:
        raise ValueError(f"idf_mode must be one of {TCOR_IDF_MODES}, got {idf_mode!r}")
    _require_nonempty(train, vocab)
    counts = count_matrix(train.docs, vocab)
    binary = counts.copy()
    binary.data = np.ones_like(binary.data)
    co = (binary.T @ binary).tocoo()
    off_diag = co.row != co.col
    co = sp.csr_matrix(
        (co.data[off_diag], (co.row[off_diag], co.col[off_diag])), shape=co.shape
    )
    partners = co.getnnz(axis=1).astype(np.float64)  # symmetric, so rows == columns
    n_terms = len(vocab)
    log = _log_fn(base)
    idf = np.where(partners > 0, log(n_terms / np.maximum(partners, 1.0)), 0.0)
    weighted = co.copy()
    weighted.data = 1.0 + log(weighted.data)
    if idf_mode == "feature-term":
        weighted = weighted.multiply(idf[np.newaxis, :]).tocsr()
    else:
        weighted = weighted.multiply(idf[:, np.newaxis]).tocsr()
    weighted.eliminate_zeros()
    return TermMatrix("TCOR", list(vocab.terms), weighted, feature_names=list(vocab.terms))


# ---------------------------------------------------------------------------
# Subprofile clustering and the subprofile-association representation
# ---------------------------------------------------------------------------


def _row_sq_norms(X: sp.csr_matrix) -> np.ndarray:
    sq = X.copy()
    sq.data = sq.data**2
    return np.asarray(sq.sum(axis=1)).ravel()


def _sq_distances(X: sp.csr_matrix, centers: np.ndarray, x_sq: np.ndarray) -> np.ndarray:
    cross = np.asarray(X @ centers.T)
    c_sq = np.einsum("ij,ij->i", centers, centers)
    return np.maximum(x_sq[:, np.newaxis] - 2.0 * cross + c_sq[np.newaxis, :], 0.0)


def _dense_row(X: sp.csr_matrix, i: int) -> np.ndarray:
    return np.asarray(X[i].todense(), dtype=np.float64).ravel()


def _kmeanspp_init(X, k, rng, x_sq) -> np.ndarray:
    n = X.shape[0]
    centers = np.zeros((k, X.shape[1]))
    centers[0] = _dense_row(X, int(rng.integers(n)))
    d2 = _sq_distances(X, centers[:1], x_sq)[:, 0]
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            nxt = int(rng.integers(n))
        centers[j] = _dense_row(X, nxt)
        d2 = np.minimum(d2, _sq_distances(X, centers[j : j + 1], x_sq)[:, 0])
    return centers


def _repair_empty_clusters(labels: np.ndarray, d2: np.ndarray, k: int) -> np.ndarray:
    counts = np.bincount(labels, minlength=k)
    own = d2[np.arange(labels.size), labels]
    for j in range(k):
        if counts[j] == 0:
            movable = counts[labels] > 1
            scores = np.where(movable, own, -np.inf)
            i = int(np.argmax(scores))
            counts[labels[i]] -= 1
            labels[i] = j
            counts[j] = 1
    return labels


def _lloyd(X, centers, x_sq, max_iter) -> tuple[np.ndarray, float]:
    n, k = X.shape[0], centers.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        d2 = _sq_distances(X, centers, x_sq)
        new_labels = _repair_empty_clusters(d2.argmin(axis=1), d2, k)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = X[labels == j]
            centers[j] = np.asarray(members.mean(axis=0)).ravel()
    inertia = float(_sq_distances(X, centers, x_sq)[np.arange(n), labels].sum())
    return labels, inertia


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    remap: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        if int(lab) not in remap:
            remap[int(lab)] = len(remap)
        out[i] = remap[int(lab)]
    return out


def _kmeans(X: sp.csr_matrix, k: int, rng, restarts: int = 20, max_iter: int = 100) -> np.ndarray:
    """Seeded k-means with kmeans++ init; best inertia over restarts wins.

    Cluster ids are canonicalized by first appearance so the labeling is
    stable.  Empty clusters are repaired by stealing the farthest point.
    """
    if k <= 1:
        return np.zeros(X.shape[0], dtype=np.int64)
    x_sq = _row_sq_norms(X)
    best_labels: np.ndarray | None = None
    best_inertia = np.inf
    for _ in range(restarts):
        centers = _kmeanspp_init(X, k, rng, x_sq)
        labels, inertia = _lloyd(X, centers, x_sq, max_iter)
        if best_labels is None or inertia < best_inertia - 1e-12:
            best_labels, best_inertia = labels, inertia
    return _canonical_labels(best_labels)


def cluster_subprofiles(
    train: Corpus,
    task: str,
    vocab: Vocabulary,
    k_per_class: int = 3,
    seed: int = 0,
    restarts: int = 20,
) -> SubprofileAssignment:
    """Split each category of ``task`` into k-means subclasses of its documents.

    Clustering runs within each category on L2-normalized term-frequency
    vectors over ``vocab``; the cluster count is capped by category size.
    Deterministic for a fixed seed.
    """
    if k_per_class < 1:
        raise ValueError("k_per_class must be a positive integer")
    _require_nonempty(train, vocab)
    counts = count_matrix(train.docs, vocab)
    norms = np.sqrt(_row_sq_norms(counts))
    scale = np.where(norms > 0, 1.0 / np.maximum(norms, 1e-300), 0.0)
    X = (sp.diags(scale) @ counts).tocsr()
    rng = np.random.default_rng(seed % (2**63))
    mapping: dict[str, int] = {}
    labels: list[str] = []
    for cat in train.categories(task):
        idx = [i for i, doc in enumerate(train.docs) if doc.labels[task] == cat]
        k = min(k_per_class, len(idx))
        assign = _kmeans(X[idx], k, rng, restarts=restarts)
        base = len(labels)
        labels.extend(f"{cat}/{j}" for j in range(k))
        for pos, i in enumerate(idx):
            mapping[train.docs[i].author_id] = base + int(assign[pos])
    return SubprofileAssignment(task=task, mapping=mapping, subclass_labels=labels)


def _raw_subclass_weights(
    train: Corpus, vocab: Vocabulary, assignment: SubprofileAssignment
) -> np.ndarray:
    """Raw association mass: per subclass, sum of log2(1 + count/doc_length)."""
    rows = []
    cols = []
    for i, doc in enumerate(train.docs):
        sub = assignment.mapping.get(doc.author_id)
        if sub is None:
            raise ValueError(f"assignment does not cover author {doc.author_id!r}")
        rows.append(i)
        cols.append(sub)
    counts = count_matrix(train.docs, vocab)
    lengths = np.array([max(len(doc.tokens), 1) for doc in train.docs], dtype=np.float64)
    scaled = (sp.diags(1.0 / lengths) @ counts).tocsr()
    scaled.data = np.log2(1.0 + scaled.data)
    indicator = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)),
        shape=(len(train.docs), assignment.n_subclasses),
    )
    return np.asarray((scaled.T @ indicator).todense())


def _normalize_ssr(raw: np.ndarray, subclass_labels: list[str]) -> np.ndarray:
    col_mass = raw.sum(axis=0)
    dead = np.flatnonzero(col_mass <= 0)
    if dead.size:
        names = [subclass_labels[j] for j in dead]
        raise ValueError(f"subclasses with zero total weight: {names}")
    per_class = raw / col_mass[np.newaxis, :]
    row_mass = per_class.sum(axis=1)
    out = np.zeros_like(per_class)
    supported = row_mass > 0
    out[supported] = per_class[supported] / row_mass[supported, np.newaxis]
    return out


def build_ssr(
    train: Corpus, vocab: Vocabulary, assignment: SubprofileAssignment
) -> TermMatrix:
    """Associate each term with a probability distribution over subprofiles.

    Raw per-subclass masses are normalized per subclass (each column sums to
    one) and then per term (each supported row sums to one), so a supported
    row is a distribution over the subprofiles; terms without support stay
    all-zero.
    """
    _require_nonempty(train, vocab)
    raw = _raw_subclass_weights(train, vocab, assignment)
    matrix = _normalize_ssr(raw, assignment.subclass_labels)
    return TermMatrix(
        "SSR", list(vocab.terms), matrix, feature_names=list(assignment.subclass_labels)
    )


# ---------------------------------------------------------------------------
# Document aggregation
# ---------------------------------------------------------------------------


def _term_alphas(doc: AuthorDoc, vocab: Vocabulary, weighting: str):
    if weighting not in AGG_WEIGHTINGS:
        raise ValueError(f"weighting must be one of {AGG_WEIGHTINGS}, got {weighting!r}")
    idx: list[int] = []
    cnt: list[float] = []
    for term, count in doc.counts.items():
        j = vocab.index.get(term)
        if j is not None:
            idx.append(j)
            cnt.append(float(count))
    if not idx:
        return np.empty(0, dtype=np.int64), np.empty(0)
    indices = np.asarray(idx, dtype=np.int64)
    counts = np.asarray(cnt)
    order = np.argsort(indices)
    indices, counts = indices[order], counts[order]
    if weighting == "mean":
        alphas = counts / counts.sum()
    else:
        logged = 1.0 + np.log(counts)
        alphas = logged / logged.sum()
    return indices, alphas


def aggregate_documents(
    doc: AuthorDoc, tm: TermMatrix, vocab: Vocabulary, weighting: str = "mean"
) -> DocVector:
    """Convex combination of the document's term vectors.

    ``mean`` weighs each vocabulary term by its share of the document's
    in-vocabulary tokens; ``tf-weighted`` uses normalized ``1 + log(count)``
    weights.  Out-of-vocabulary tokens are skipped; a document with no
    in-vocabulary tokens maps to the zero vector (with a warning).
    """
    if list(tm.terms) != list(vocab.terms):
        raise ValueError("term matrix was built on a different vocabulary")
    indices, alphas = _term_alphas(doc, vocab, weighting)
    if indices.size == 0:
        warnings.warn(f"document {doc.author_id!r} has no in-vocabulary tokens; zero vector")
        return DocVector(np.zeros(tm.dims), doc.author_id)
    rows = tm.matrix[indices]
    if sp.issparse(rows):
        values = np.asarray(rows.T @ alphas).ravel()
    else:
        values = alphas @ np.asarray(rows, dtype=np.float64)
    return DocVector(values, doc.author_id)


def aggregate_corpus(
    docs: list[AuthorDoc], tm: TermMatrix, vocab: Vocabulary, weighting: str = "mean"
) -> np.ndarray:
    """Stack of ``aggregate_documents`` vectors, one row per document."""
    out = np.zeros((len(docs), tm.dims))
    for i, doc in enumerate(docs):
        out[i] = aggregate_documents(doc, tm, vocab, weighting).values
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

_TEXT_MAGIC = "dtr-term-matrix 1"


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def save_term_matrix(tm: TermMatrix, path, mode: str = "text") -> None:
    """Write a term matrix container.

    ``text`` is the exact-round-trip interchange mode (values at 17
    significant digits, dense row-major); ``npz`` is a compact binary mode
    that preserves sparsity.
    """
    if mode == "text":
        _save_text(tm, path)
    elif mode == "npz":
        _save_npz(tm, path)
    else:
        raise ValueError(f"unknown mode {mode!r} (expected 'text' or 'npz')")


def _save_text(tm: TermMatrix, path) -> None:
    dense = tm.dense()
    lines = [
        _TEXT_MAGIC,
        f"kind {tm.rep_kind}",
        f"terms {len(tm.terms)}",
        f"dims {tm.dims}",
        f"features {0 if tm.feature_names is None else len(tm.feature_names)}",
        "meta " + json.dumps(tm.meta, sort_keys=True),
    ]
    lines.extend(tm.terms)
    if tm.feature_names is not None:
        lines.extend(tm.feature_names)
    for row in dense:
        lines.append(" ".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _save_npz(tm: TermMatrix, path) -> None:
    header = json.dumps(
        {
            "kind": tm.rep_kind,
            "terms": tm.terms,
            "feature_names": tm.feature_names,
            "meta": tm.meta,
        },
        sort_keys=True,
    )
    if sp.issparse(tm.matrix):
        m = tm.matrix.tocsr()
        np.savez_compressed(
            path,
            header=np.array(header),
            layout=np.array("csr"),
            data=m.data,
            indices=m.indices,
            indptr=m.indptr,
            shape=np.array(m.shape, dtype=np.int64),
        )
    else:
        np.savez_compressed(
            path,
            header=np.array(header),
            layout=np.array("dense"),
            values=np.asarray(tm.matrix, dtype=np.float64),
        )


def load_term_matrix(path) -> TermMatrix:
    """Load a term matrix written by :func:`save_term_matrix` (mode sniffed)."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"PK":
        return _load_npz(path)
    return _load_text(path)


def _load_text(path) -> TermMatrix:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _TEXT_MAGIC:
        raise ValueError(f"{path}: not a textual term-matrix container")
    kind = lines[1].split(" ", 1)[1]
    n_terms = int(lines[2].split(" ", 1)[1])
    dims = int(lines[3].split(" ", 1)[1])
    n_features = int(lines[4].split(" ", 1)[1])
    meta = json.loads(lines[5].split(" ", 1)[1])
    pos = 6
    terms = lines[pos : pos + n_terms]
    pos += n_terms
    feature_names = lines[pos : pos + n_features] if n_features else None
    pos += n_features
    matrix = np.zeros((n_terms, dims))
    for i in range(n_terms):
        fields = lines[pos + i].split(" ") if dims else []
        if len(fields) != dims:
            raise ValueError(f"{path}: row {i} has {len(fields)} values, expected {dims}")
        matrix[i] = [float(v) for v in fields]
    return TermMatrix(kind, list(terms), matrix, feature_names=feature_names, meta=meta)


def _load_npz(path) -> TermMatrix:
    with np.load(path, allow_pickle=False) as payload:
        header = json.loads(str(payload["header"]))
        if str(payload["layout"]) == "csr":
            matrix: np.ndarray | sp.spmatrix = sp.csr_matrix(
                (payload["data"], payload["indices"], payload["indptr"]),
                shape=tuple(payload["shape"]),
            )
        else:
            matrix = payload["values"]
    return TermMatrix(
        header["kind"],
        list(header["terms"]),
        matrix,
        feature_names=header["feature_names"],
        meta=header["meta"],
    )
