"""Result artifacts: cluster sizes, per-cluster term rankings, per-year series, plot files."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cluster import ClusteringResult, ElbowCurve, fit_best
from .exceptions import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterSizeTable:
    sizes: tuple  # ((cluster_index, count), ...) by count descending
    total: int

    @property
    def largest_share(self) -> float:
        return self.sizes[0][1] / self.total if self.total else 0.0

    def counts(self) -> list[int]:
        return [c for _, c in self.sizes]


def _assignments_of(result) -> np.ndarray:
    return np.asarray(getattr(result, "assignments", result), dtype=np.int64)


def cluster_sizes(result, k: Optional[int] = None) -> ClusterSizeTable:
    """Members per cluster, largest first (ties by cluster index).

    ``result`` is a :class:`ClusteringResult` or a plain assignment array.
    Clusters up to ``k`` (default: the result's k) appear even when empty.
    """
    a = _assignments_of(result)
    if k is None:
        k = getattr(result, "k", None) or (int(a.max()) + 1 if a.size else 0)
    counts = np.bincount(a, minlength=k) if a.size else np.zeros(k, dtype=np.int64)
    order = sorted(range(len(counts)), key=lambda c: (-counts[c], c))
    return ClusterSizeTable(tuple((c, int(counts[c])) for c in order), int(a.size))


@dataclass(frozen=True)
class TermRanking:
    cluster_index: int
    terms: tuple  # ((ngram string, document frequency), ...)
    cluster_size: int = 0

    @property
    def top_term(self) -> Optional[str]:
        return self.terms[0][0] if self.terms else None


def cluster_document_frequencies(X, assignments, k) -> np.ndarray:
    """(k, dim) array: documents of each cluster containing each feature."""
    import scipy.sparse as sp

    from ._validation import check_matrix

    X = check_matrix(X)
    present = X.copy()
    present.data = (present.data != 0).astype(np.float64)
    n = X.shape[0]
    ind = sp.csr_matrix((np.ones(n), (assignments, np.arange(n))), shape=(k, n))
    return np.rint((ind @ present).toarray()).astype(np.int64)


def top_terms(matrix, result, cluster_index: int, limit: Optional[int] = None,
              names: Optional[Sequence[str]] = None) -> TermRanking:
    """Rank features by how many documents of one cluster contain them.

    Sorted by frequency descending, ties lexicographic on the term text.
    Feature names come from ``matrix.space`` unless ``names`` is given.
    """
    a = _assignments_of(result)
    k = getattr(result, "k", None) or int(a.max()) + 1
    if not 0 <= cluster_index < k:
        raise ValueError(f"cluster {cluster_index} does not exist (k={k})")
    if names is None:
        names = matrix.space.names
    df = cluster_document_frequencies(matrix, a, k)[cluster_index]
    terms = sorted(((names[j], int(df[j])) for j in np.flatnonzero(df)), key=lambda t: (-t[1], t[0]))
    if limit is not None:
        terms = terms[:limit]
    return TermRanking(cluster_index, tuple(terms), int(np.sum(a == cluster_index)))


@dataclass(frozen=True)
class YearEntry:
    year: int
    inertia: float
    sizes: ClusterSizeTable
    n_features: int = 0


@dataclass(frozen=True)
class YearlySeries:
    entries: tuple
    skipped: tuple = ()  # years left out (too few documents)

    def __post_init__(self):
        years = [e.year for e in self.entries]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise ValueError("years must be strictly increasing")

    def __len__(self):
        return len(self.entries)

    @property
    def years(self) -> list[int]:
        return [e.year for e in self.entries]

    @property
    def inertias(self) -> list[float]:
        return [e.inertia for e in self.entries]


def yearly_report(corpus, config, k: Optional[int] = None) -> YearlySeries:
    """Cluster every publication year separately.

    Each year gets its own dictionary and feature space unless
    ``config.shared_dictionary`` is set, in which case the dictionary is
    counted once over the whole corpus. Years with fewer than ``k``
    documents are skipped with a warning.
    """
    from .features import featurize
    from .ingest import split_by_year
    from .ngrams import build_multi
    from .normalize import normalize_corpus

    k = config.k if k is None else k
    normalizer = config.normalizer()
    shared = None
    if config.shared_dictionary:
        shared = build_multi(normalize_corpus(corpus, normalizer), config.ngram)

    entries, skipped = [], []
    for year, sub in split_by_year(corpus).items():
        if len(sub) < k:
            logger.warning("year %d has %d documents (< k=%d); skipped", year, len(sub), k)
            skipped.append(year)
            continue
        feats = featurize(sub, normalizer, config.ngram, config.min_freq, dictionary=shared,
                          n_threads=config.threads)
        res = fit_best(feats.matrix, k, variant=config.variant, restarts=config.restarts,
                       seed=config.seed, **config.fit_params())
        entries.append(YearEntry(year, res.inertia, cluster_sizes(res), len(feats.space)))
    return YearlySeries(tuple(entries), tuple(skipped))


# -- plot data ----------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def _table(obj) -> tuple[list[str], list[list]]:
    if isinstance(obj, ElbowCurve):
        return ["k", "inertia", "restarts"], [[k, j, obj.restarts] for k, j in obj.points]
    if isinstance(obj, YearlySeries):
        return (["year", "inertia", "documents", "largest_cluster", "largest_share", "sizes"],
                [[e.year, e.inertia, e.sizes.total, e.sizes.sizes[0][1], e.sizes.largest_share,
                  ";".join(map(str, e.sizes.counts()))] for e in obj.entries])
    if isinstance(obj, ClusterSizeTable):
        return ["cluster", "count", "share"], [[c, n, n / obj.total] for c, n in obj.sizes]
    if isinstance(obj, TermRanking):
        return ["term", "weight"], [[t, w] for t, w in obj.terms]
    raise TypeError(f"cannot plot {type(obj).__name__}")


def _series(obj) -> tuple[list, list, str, str, str]:
    """(x, y, x label, y label, kind) for the SVG rendering."""
    if isinstance(obj, ElbowCurve):
        return obj.ks, obj.inertias, "k", "inertia", "line"
    if isinstance(obj, YearlySeries):
        return obj.years, obj.inertias, "year", "inertia", "line"
    if isinstance(obj, ClusterSizeTable):
        return [c for c, _ in obj.sizes], obj.counts(), "cluster", "documents", "bar"
    return [t for t, _ in obj.terms], [w for _, w in obj.terms], "term", "documents", "bar"


def write_csv(obj, path) -> Path:
    header, rows = _table(obj)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def render_svg(xs, ys, xlabel, ylabel, kind="line", width=640, height=400) -> str:
    """Minimal static SVG line or bar chart."""
    ml, mr, mt, mb = 70, 20, 20, 50
    pw, ph = width - ml - mr, height - mt - mb
    n = len(ys)
    ymax = max(max(ys), 0.0) or 1.0
    ymin = min(min(ys), 0.0)
    span = (ymax - ymin) or 1.0

    def sy(v):
        return mt + ph - (v - ymin) / span * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{mt + ph}" x2="{ml + pw}" y2="{mt + ph}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ph}" stroke="black"/>',
        f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{_esc(xlabel)}</text>',
        f'<text x="15" y="{mt + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {mt + ph / 2:.1f})">{_esc(ylabel)}</text>',
        f'<text x="{ml - 5}" y="{sy(ymax):.1f}" text-anchor="end">{ymax:.4g}</text>',
        f'<text x="{ml - 5}" y="{sy(ymin):.1f}" text-anchor="end">{ymin:.4g}</text>',
    ]
    if kind == "bar":
        bw = pw / n
        for i, (x, y) in enumerate(zip(xs, ys)):
            top = sy(max(y, 0))
            out.append(f'<rect x="{ml + i * bw + 1:.1f}" y="{top:.1f}" width="{max(bw - 2, 1):.1f}" '
                       f'height="{sy(min(y, 0)) - top:.1f}" fill="steelblue"/>')
            out.append(f'<text x="{ml + (i + .5) * bw:.1f}" y="{mt + ph + 14}" '
                       f'text-anchor="middle">{_esc(x)}</text>')
    else:
        step = pw / (n - 1) if n > 1 else 0.0
        pts = [(ml + (i * step if n > 1 else pw / 2), sy(y)) for i, y in enumerate(ys)]
        out.append('<polyline fill="none" stroke="steelblue" stroke-width="2" points="'
                   + " ".join(f"{px:.1f},{py:.1f}" for px, py in pts) + '"/>')
        for (px, py), x in zip(pts, xs):
            out.append(f'<circle cx="{px:.1f}" cy="{py:.1f}" r="3" fill="steelblue"/>')
            out.append(f'<text x="{px:.1f}" y="{mt + ph + 14}" text-anchor="middle">{_esc(x)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def emit_plots(obj, out_path, svg: bool = True) -> list[Path]:
    """Write ``<out>.csv`` and, if ``svg``, ``<out>.svg`` for a curve, series, table or ranking.

    Output bytes depend only on ``obj``.
    """
    if len(_table(obj)[1]) == 0:
        raise DataError(f"nothing to plot: empty {type(obj).__name__}")
    base = Path(out_path)
    if base.suffix in (".csv", ".svg"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    written = [write_csv(obj, base.with_suffix(".csv"))]
    if svg:
        p = base.with_suffix(".svg")
        p.write_text(render_svg(*_series(obj)), encoding="utf-8")
        written.append(p)
    return written
