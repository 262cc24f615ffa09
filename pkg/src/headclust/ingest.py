"""CSV ingestion and per-year splitting of headline corpora."""

from __future__ import annotations

import csv
import datetime as dt
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .exceptions import DataError, SchemaError

logger = logging.getLogger(__name__)

DEFAULT_TEXT_COLUMN = "headline_text"
DEFAULT_DATE_COLUMN = "publish_date"


@dataclass(frozen=True)
class Document:
    id: int
    date: Optional[dt.date]
    text: str


@dataclass(frozen=True)
class Corpus:
    """Immutable, ordered collection of documents with ids ``0..len-1``.

    ``original_ids`` maps each position back to the id the document had in
    the corpus it was carved out of (identity for freshly loaded corpora).
    """

    documents: tuple[Document, ...]
    source: str = "inline"
    skipped_rows: int = 0
    original_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        for pos, doc in enumerate(self.documents):
            if doc.id != pos:
                raise ValueError(f"document at position {pos} has id {doc.id}")
        if not self.original_ids:
            object.__setattr__(self, "original_ids", tuple(range(len(self.documents))))
        elif len(self.original_ids) != len(self.documents):
            raise ValueError("original_ids must be parallel to documents")

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def __getitem__(self, i):
        return self.documents[i]

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]

    @classmethod
    def from_texts(
        cls,
        texts: Iterable[str],
        dates: Optional[Sequence[Optional[dt.date]]] = None,
        source: str = "inline",
    ) -> "Corpus":
        """Build a corpus from raw strings, skipping blank ones like :func:`load_csv`."""
        texts = list(texts)
        if dates is None:
            dates = [None] * len(texts)
        if len(dates) != len(texts):
            raise ValueError("dates and texts differ in length")
        docs = []
        skipped = 0
        for text, date in zip(texts, dates):
            if not text or not text.strip():
                skipped += 1
                continue
            docs.append(Document(len(docs), date, text))
        return cls(tuple(docs), source=source, skipped_rows=skipped)


def parse_date(value: str) -> Optional[dt.date]:
    """Parse an 8-digit ``YYYYMMDD`` stamp; return None if malformed."""
    value = value.strip()
    if len(value) != 8 or not value.isdigit():
        return None
    try:
        return dt.date(int(value[:4]), int(value[4:6]), int(value[6:]))
    except ValueError:
        return None


def load_csv(
    path,
    date_column: Optional[str] = DEFAULT_DATE_COLUMN,
    text_column: str = DEFAULT_TEXT_COLUMN,
) -> Corpus:
    """Stream a headline CSV into a :class:`Corpus`.

    Rows with empty text are skipped and counted in ``Corpus.skipped_rows``.
    A malformed date is logged as a warning and stored as ``None``.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    SchemaError
        If the header is missing or lacks a requested column.
    """
    path = Path(path)
    docs: list[Document] = []
    skipped = 0
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        header = [h.strip().lstrip("﻿") for h in header]
        if text_column not in header:
            raise SchemaError(f"{path}: text column {text_column!r} not in header {header}")
        text_idx = header.index(text_column)
        date_idx = None
        if date_column is not None:
            if date_column not in header:
                raise SchemaError(f"{path}: date column {date_column!r} not in header {header}")
            date_idx = header.index(date_column)

        for lineno, row in enumerate(reader, start=2):
            if not row:
                # blank physical line; csv yields []
                skipped += 1
                continue
            text = row[text_idx] if text_idx < len(row) else ""
            if not text.strip():
                skipped += 1
                continue
            date = None
            if date_idx is not None:
                raw = row[date_idx] if date_idx < len(row) else ""
                date = parse_date(raw)
                if date is None:
                    logger.warning("%s:%d: malformed date %r, stored as absent", path, lineno, raw)
            docs.append(Document(len(docs), date, text))

    logger.info("loaded %d documents from %s (%d rows skipped)", len(docs), path, skipped)
    return Corpus(tuple(docs), source=str(path), skipped_rows=skipped)


def split_by_year(corpus: Corpus) -> dict[int, Corpus]:
    """Partition a dated corpus by publication year.

    Each sub-corpus keeps relative order, gets fresh 0-based ids, and records
    the ids the documents had in ``corpus`` in ``original_ids``.
    """
    buckets: dict[int, list[Document]] = {}
    for doc in corpus.documents:
        if doc.date is None:
            raise DataError(f"document {corpus.original_ids[doc.id]} has no date")
        buckets.setdefault(doc.date.year, []).append(doc)

    out = {}
    for year in sorted(buckets):
        members = buckets[year]
        docs = tuple(Document(i, d.date, d.text) for i, d in enumerate(members))
        out[year] = Corpus(
            docs,
            source=f"{corpus.source}#year={year}",
            original_ids=tuple(corpus.original_ids[d.id] for d in members),
        )
    return out
