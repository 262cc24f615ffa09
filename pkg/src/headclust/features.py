"""Binary N-gram presence vectors over a feature space."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._threads import resolve_threads
from .exceptions import DataError, FormatError
from .ngrams import DEFAULT_MIN_FREQ, FeatureSpace, build_multi, iter_ngrams, select_features
from .normalize import NormalizerConfig, normalize


@dataclass(frozen=True)
class SparseBinaryVector:
    on_indices: tuple
    dim: int
    source_id: Optional[int] = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.on_indices)
        for a, b in zip(idx, idx[1:]):
            if b <= a:
                raise ValueError("on_indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.dim):
            raise ValueError(f"indices out of range for dim {self.dim}")
        object.__setattr__(self, "on_indices", idx)

    def __len__(self):
        return len(self.on_indices)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        out[list(self.on_indices)] = 1.0
        return out


@dataclass(frozen=True)
class FeatureMatrix:
    rows: tuple
    space: FeatureSpace

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        dim = len(self.space)
        for r in self.rows:
            if r.dim != dim:
                raise ValueError(f"row dim {r.dim} != feature space size {dim}")

    def __len__(self):
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.space))

    def to_csr(self) -> sp.csr_matrix:
        indptr = np.zeros(len(self.rows) + 1, dtype=np.int64)
        np.cumsum([len(r.on_indices) for r in self.rows], out=indptr[1:])
        indices = np.fromiter(
            (i for r in self.rows for i in r.on_indices), dtype=np.int64, count=int(indptr[-1])
        )
        data = np.ones(len(indices), dtype=np.float64)
        return sp.csr_matrix((data, indices, indptr), shape=self.shape)

    def toarray(self) -> np.ndarray:
        return self.to_csr().toarray()


def vectorize(tokens, space: FeatureSpace) -> SparseBinaryVector:
    """Switch on every feature that occurs at least once as a token window."""
    toks = tokens.tokens if hasattr(tokens, "tokens") else tuple(tokens)
    index = space.index
    on = set()
    for n in space.n_values:
        for gram in iter_ngrams(toks, n):
            j = index.get(gram)
            if j is not None:
                on.add(j)
    return SparseBinaryVector(tuple(sorted(on)), len(space), getattr(tokens, "source_id", None))


def vectorize_corpus(corpus_tokens: Sequence, space: FeatureSpace, n_threads=None) -> FeatureMatrix:
    """Vectorize every document; rows come back in corpus order for any thread count."""
    docs = list(corpus_tokens)
    n_threads = resolve_threads(n_threads)
    if n_threads <= 1 or len(docs) < 2:
        rows = [vectorize(d, space) for d in docs]
    else:
        with ThreadPoolExecutor(n_threads) as pool:
            rows = list(pool.map(lambda d: vectorize(d, space), docs, chunksize=256))
    return FeatureMatrix(tuple(rows), space)


# -- matrix file ---------------------------------------------------------------

def write_matrix(matrix: FeatureMatrix, path, doc_ids: Optional[Sequence[int]] = None) -> None:
    """Write ``doc_id<TAB>i1,i2,...`` lines under a header carrying dim and space hash."""
    if doc_ids is None:
        doc_ids = [r.source_id if r.source_id is not None else i for i, r in enumerate(matrix.rows)]
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# dim={len(matrix.space)}\tspace={matrix.space.digest()}\trows={len(matrix)}\n")
        for doc_id, row in zip(doc_ids, matrix.rows):
            fh.write(f"{doc_id}\t{','.join(map(str, row.on_indices))}\n")


@dataclass(frozen=True)
class MatrixFile:
    """Contents of a matrix file: rows plus the header metadata."""

    rows: tuple
    doc_ids: tuple
    dim: int
    space_digest: str

    def to_csr(self) -> sp.csr_matrix:
        indptr = np.zeros(len(self.rows) + 1, dtype=np.int64)
        np.cumsum([len(r.on_indices) for r in self.rows], out=indptr[1:])
        indices = np.fromiter((i for r in self.rows for i in r.on_indices), dtype=np.int64)
        return sp.csr_matrix(
            (np.ones(len(indices)), indices, indptr), shape=(len(self.rows), self.dim)
        )

    def check_space(self, space: FeatureSpace) -> None:
        if space.digest() != self.space_digest or len(space) != self.dim:
            raise DataError(
                f"matrix was built over feature space {self.space_digest} (dim {self.dim}), "
                f"got {space.digest()} (dim {len(space)})"
            )

    def with_space(self, space: FeatureSpace) -> FeatureMatrix:
        self.check_space(space)
        return FeatureMatrix(self.rows, space)


def read_matrix(path) -> MatrixFile:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise FormatError(f"{path}: missing '# dim=...' header")
        meta = dict(part.strip().partition("=")[::2] for part in header[1:].split("\t"))
        try:
            dim = int(meta["dim"])
        except (KeyError, ValueError):
            raise FormatError(f"{path}: header lacks a valid dim") from None
        rows, ids = [], []
        for lineno, line in enumerate(fh, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            doc_id, sep, rest = line.partition("\t")
            if not sep:
                raise FormatError(f"{path}:{lineno}: expected 'doc_id<TAB>indices'")
            try:
                idx = tuple(int(x) for x in rest.split(",")) if rest else ()
                rows.append(SparseBinaryVector(idx, dim, int(doc_id)))
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            ids.append(int(doc_id))
    return MatrixFile(tuple(rows), tuple(ids), dim, meta.get("space", ""))


class NGramBinaryVectorizer(TransformerMixin, BaseEstimator):
    """Raw headlines -> sparse binary N-gram presence matrix.

    Fitting normalizes the texts, counts N-grams of every arity in
    ``ngram_values`` and keeps those seen at least ``min_freq`` times.
    ``transform`` returns a ``scipy.sparse.csr_matrix`` of 0/1 floats, so
    the output plugs straight into the clustering estimators or into any
    scikit-learn pipeline.

    Parameters
    ----------
    ngram_values : tuple of int, default=(1,)
    min_freq : int, default=10
    stemmer : {"porter", "identity"}, "table:PATH" or callable, default="porter"
    stopwords : iterable of str or None
        None selects the bundled English list.
    n_threads : int or None
    """

    def __init__(self, ngram_values=(1,), min_freq=DEFAULT_MIN_FREQ, stemmer="porter",
                 stopwords=None, n_threads=None):
        self.ngram_values = ngram_values
        self.min_freq = min_freq
        self.stemmer = stemmer
        self.stopwords = stopwords
        self.n_threads = n_threads

    def _config(self) -> NormalizerConfig:
        from .normalize import english_stopwords, make_stemmer

        stop = english_stopwords() if self.stopwords is None else frozenset(self.stopwords)
        return NormalizerConfig(stop, make_stemmer(self.stemmer))

    def _tokens(self, X):
        cfg = self.normalizer_config_
        return [normalize(t, cfg, source_id=i) for i, t in enumerate(_texts(X))]

    def fit(self, X, y=None):
        self.normalizer_config_ = self._config()
        tokens = self._tokens(X)
        self.dictionary_ = build_multi(tokens, self.ngram_values)
        self.feature_space_ = select_features(self.dictionary_, self.min_freq)
        if len(self.feature_space_) == 0:
            raise DataError(f"no features selected (min_freq={self.min_freq})")
        return self

    def transform(self, X):
        check_is_fitted(self, "feature_space_")
        return vectorize_corpus(self._tokens(X), self.feature_space_, self.n_threads).to_csr()

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_space_")
        return np.asarray(self.feature_space_.names, dtype=object)


def _texts(X) -> list[str]:
    if isinstance(X, str):
        raise ValueError("expected an iterable of documents, got a single string")
    out = []
    for item in X:
        if hasattr(item, "text"):
            out.append(item.text)
        elif isinstance(item, str):
            out.append(item)
        else:
            # e.g. a 1-column 2-D array row
            out.append(str(item[0]))
    return out


@dataclass(frozen=True)
class Featurized:
    tokens: tuple
    dictionary: object
    space: FeatureSpace
    matrix: FeatureMatrix


def featurize(texts, normalizer: NormalizerConfig, ngram_values=(1,), min_freq=DEFAULT_MIN_FREQ,
              dictionary=None, n_threads=None) -> Featurized:
    """Normalize, count (unless ``dictionary`` is given), select and vectorize in one go.

    Raises DataError when the threshold leaves no features.
    """
    from .normalize import normalize_corpus

    tokens = tuple(normalize_corpus(texts, normalizer))
    if dictionary is None:
        dictionary = build_multi(tokens, ngram_values)
    space = select_features(dictionary, min_freq)
    if len(space) == 0:
        raise DataError(f"no features selected (min_freq={min_freq}, {len(dictionary)} n-grams counted)")
    return Featurized(tokens, dictionary, space, vectorize_corpus(tokens, space, n_threads))
