"""Text simplification: lowercase, keep letters only, drop stopwords, stem."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional

_LETTER_RUN = re.compile(r"[^\W\d_]+")


@dataclass(frozen=True)
class TokenSeq:
    tokens: tuple[str, ...]
    source_id: Optional[int] = None

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def load_word_list(path) -> frozenset[str]:
    """Read one word per line; blank lines and ``#`` comments are ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def english_stopwords() -> frozenset[str]:
    text = resources.files("headclust").joinpath("data/english_stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


# -- stemmers ---------------------------------------------------------------

def identity_stemmer(word: str) -> str:
    return word


class TableStemmer:
    """Explicit lookup-table stemmer; words missing from the table pass through."""

    def __init__(self, table: Mapping[str, str]):
        self.table = dict(table)

    def __call__(self, word: str) -> str:
        return self.table.get(word, word)

    def __eq__(self, other):
        return isinstance(other, TableStemmer) and self.table == other.table

    def __hash__(self):
        return hash(tuple(sorted(self.table.items())))

    def __repr__(self):
        return f"TableStemmer({len(self.table)} entries)"

    @classmethod
    def from_file(cls, path) -> "TableStemmer":
        """Load ``word<TAB>stem`` lines (whitespace-separated also accepted)."""
        table = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'word<TAB>stem', got {line!r}")
            table[parts[0].lower()] = parts[1].lower()
        return cls(table)


class PorterStemmer:
    """English Porter stemmer (NLTK implementation) with a memo cache."""

    def __init__(self):
        from nltk.stem.porter import PorterStemmer as _Porter

        self._stem = lru_cache(maxsize=200_000)(_Porter().stem)

    def __call__(self, word: str) -> str:
        return self._stem(word)

    def __eq__(self, other):
        return isinstance(other, PorterStemmer)

    def __hash__(self):
        return hash("porter")

    def __repr__(self):
        return "PorterStemmer()"


# Stems used to reproduce the Portuguese worked example.
PORTUGUESE_EXAMPLE_TABLE = {
    "gosta": "gost",
    "assistir": "assist",
    "filmes": "film",
    "jogos": "jog",
}


def make_stemmer(name: str | Callable[[str], str] | None) -> Callable[[str], str]:
    """Resolve ``porter``, ``identity``, ``table:PATH`` (or a callable) to a stemmer."""
    if name is None or name == "porter":
        return PorterStemmer()
    if callable(name):
        return name
    if name == "identity":
        return identity_stemmer
    if name.startswith("table:"):
        return TableStemmer.from_file(name[len("table:"):])
    raise ValueError(f"unknown stemmer {name!r}; expected porter, identity or table:PATH")


@dataclass(frozen=True)
class NormalizerConfig:
    stopwords: frozenset[str] = frozenset()
    stemmer: Callable[[str], str] = identity_stemmer

    def __post_init__(self):
        stop = frozenset(self.stopwords)
        bad = [w for w in stop if not w.isalpha() or w != w.lower()]
        if bad:
            raise ValueError(f"stopwords must be lowercase alphabetic: {sorted(bad)[:5]}")
        object.__setattr__(self, "stopwords", stop)

    @classmethod
    def default(cls) -> "NormalizerConfig":
        """English stopwords + Porter stemming, for real headline runs."""
        return cls(english_stopwords(), PorterStemmer())

    @classmethod
    def from_options(cls, stemmer="porter", stopwords_path=None) -> "NormalizerConfig":
        stop = load_word_list(stopwords_path) if stopwords_path else english_stopwords()
        return cls(stop, make_stemmer(stemmer))


def split_letters(text: str) -> list[str]:
    """Lowercase ``text`` and split it on every non-letter character."""
    # upper-then-lower makes the result independent of the input's casing
    lowered = text.upper().lower()
    out = []
    for run in _LETTER_RUN.findall(lowered):
        if run.isalpha():
            out.append(run)
        else:
            # \w also admits a few numeric non-decimal characters (e.g. superscripts)
            out.extend("".join(c if c.isalpha() else " " for c in run).split())
    return out


def normalize(text: str, config: NormalizerConfig = NormalizerConfig(), source_id=None) -> TokenSeq:
    """Simplify one text into a :class:`TokenSeq`.

    >>> normalize("Police Probe!! 2003").tokens
    ('police', 'probe')
    """
    tokens = []
    stop = config.stopwords
    stem = config.stemmer
    for word in split_letters(text):
        if word in stop:
            continue
        # a stemmer may hand back anything; re-split to keep tokens letters-only
        for piece in split_letters(stem(word)):
            tokens.append(piece)
    return TokenSeq(tuple(tokens), source_id)


def normalize_corpus(texts: Iterable, config: NormalizerConfig = NormalizerConfig()) -> list[TokenSeq]:
    """Normalize every document of a corpus (or plain strings), keeping order."""
    out = []
    for i, item in enumerate(texts):
        if hasattr(item, "text"):
            out.append(normalize(item.text, config, source_id=item.id))
        else:
            out.append(normalize(item, config, source_id=i))
    return out
