"""N-gram frequency dictionaries and frequency-thresholded feature spaces.

An N-gram key is a plain tuple of tokens; its arity is ``len(key)``.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .exceptions import FormatError

NGramKey = tuple  # tuple[str, ...]

DEFAULT_MIN_FREQ = 10


def iter_ngrams(tokens: Sequence[str], n: int):
    """Yield every contiguous window of ``n`` tokens."""
    for i in range(len(tokens) - n + 1):
        yield tuple(tokens[i:i + n])


@dataclass(frozen=True)
class NGramDictionary:
    entries: Mapping[tuple, int]
    n_values: frozenset
    corpus_size: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_values", frozenset(self.n_values))
        for key, count in self.entries.items():
            if count < 1:
                raise ValueError(f"count for {key!r} must be >= 1, got {count}")
            if len(key) not in self.n_values:
                raise ValueError(f"key {key!r} has arity outside {sorted(self.n_values)}")

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, key):
        return self.entries[_as_key(key)]

    def __contains__(self, key):
        return _as_key(key) in self.entries

    def get(self, key, default=0):
        return self.entries.get(_as_key(key), default)

    def keys(self):
        return self.entries.keys()

    def items(self):
        return self.entries.items()


def _as_key(key) -> tuple:
    return (key,) if isinstance(key, str) else tuple(key)


def _tokens_of(doc) -> Sequence[str]:
    return doc.tokens if hasattr(doc, "tokens") else doc


def build_dictionary(corpus_tokens: Iterable, n: int) -> NGramDictionary:
    """Count every n-token window of every document (occurrences, not documents).

    Windows never cross document boundaries.
    """
    if n < 1:
        raise ValueError(f"n-gram arity must be >= 1, got {n}")
    counts: Counter = Counter()
    size = 0
    for doc in corpus_tokens:
        counts.update(iter_ngrams(_tokens_of(doc), n))
        size += 1
    return NGramDictionary(dict(counts), frozenset({n}), size)


def merge_dictionaries(d1: NGramDictionary, d2: NGramDictionary) -> NGramDictionary:
    """Union of two dictionaries over the same corpus with disjoint arities."""
    overlap = d1.n_values & d2.n_values
    if overlap:
        raise ValueError(f"cannot merge dictionaries sharing arities {sorted(overlap)}")
    if d1.corpus_size and d2.corpus_size and d1.corpus_size != d2.corpus_size:
        raise ValueError(
            f"dictionaries count different corpora ({d1.corpus_size} vs {d2.corpus_size} documents)"
        )
    entries = dict(d1.entries)
    entries.update(d2.entries)
    return NGramDictionary(entries, d1.n_values | d2.n_values, max(d1.corpus_size, d2.corpus_size))


def build_multi(corpus_tokens: Sequence, ns: Iterable[int]) -> NGramDictionary:
    """Build and merge one dictionary per arity in ``ns``."""
    ns = sorted(set(ns))
    if not ns:
        raise ValueError("at least one n-gram arity is required")
    out = build_dictionary(corpus_tokens, ns[0])
    for n in ns[1:]:
        out = merge_dictionaries(out, build_dictionary(corpus_tokens, n))
    return out


def feature_order(item) -> tuple:
    """Sort key: lower arity first, then descending count, then key."""
    key, count = item
    return (len(key), -count, key)


@dataclass(frozen=True)
class FeatureSpace:
    features: tuple
    min_freq: int = 1
    counts: tuple = field(default=(), compare=False)
    index: Mapping[tuple, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        feats = tuple(_as_key(f) for f in self.features)
        object.__setattr__(self, "features", feats)
        index = {f: i for i, f in enumerate(feats)}
        if len(index) != len(feats):
            raise ValueError("duplicate features in feature space")
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.features)

    @property
    def n_values(self) -> frozenset:
        return frozenset(len(f) for f in self.features)

    @property
    def names(self) -> list[str]:
        return [" ".join(f) for f in self.features]

    def digest(self) -> str:
        """Short content hash identifying this exact ordered vocabulary."""
        h = hashlib.sha256()
        for f in self.features:
            h.update(" ".join(f).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()[:16]


def select_features(dictionary: NGramDictionary, min_freq: int = DEFAULT_MIN_FREQ) -> FeatureSpace:
    """Keep keys with count >= ``min_freq`` in deterministic feature order."""
    if min_freq < 1:
        raise ValueError(f"min_freq must be >= 1, got {min_freq}")
    kept = sorted(((k, c) for k, c in dictionary.entries.items() if c >= min_freq), key=feature_order)
    return FeatureSpace(tuple(k for k, _ in kept), min_freq, tuple(c for _, c in kept))


# -- TSV import / export ------------------------------------------------------

def write_dictionary(dictionary: NGramDictionary, path) -> None:
    """Write ``word1[ word2 ...]<TAB>count`` lines in feature order."""
    rows = sorted(dictionary.entries.items(), key=feature_order)
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# n_values={','.join(map(str, sorted(dictionary.n_values)))}"
                 f"\tcorpus_size={dictionary.corpus_size}\n")
        for key, count in rows:
            fh.write(f"{' '.join(key)}\t{count}\n")


def read_dictionary(path) -> NGramDictionary:
    entries = {}
    n_values = set()
    corpus_size = 0
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split("\t"):
                    name, _, value = part.strip().partition("=")
                    if name == "corpus_size" and value:
                        corpus_size = int(value)
                continue
            words, sep, count = line.rpartition("\t")
            if not sep or not words:
                raise FormatError(f"{path}:{lineno}: expected 'ngram<TAB>count'")
            try:
                c = int(count)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad count {count!r}") from None
            key = tuple(words.split(" "))
            if key in entries:
                raise FormatError(f"{path}:{lineno}: duplicate key {words!r}")
            entries[key] = c
            n_values.add(len(key))
    return NGramDictionary(entries, frozenset(n_values), corpus_size)
