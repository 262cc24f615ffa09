"""Headline clustering toolkit.

Simplify raw headlines, count N-grams, build sparse binary presence vectors
and cluster them with K-means and its variants (k-medoids, k-median,
mini-batch), plus elbow curves and per-cluster reports.
"""

from .ingest import Corpus, Document, load_csv, split_by_year
from .normalize import NormalizerConfig, TokenSeq, normalize, normalize_corpus
from .ngrams import (
    FeatureSpace,
    NGramDictionary,
    build_dictionary,
    merge_dictionaries,
    select_features,
)
from .features import (
    FeatureMatrix,
    NGramBinaryVectorizer,
    SparseBinaryVector,
    vectorize,
    vectorize_corpus,
)
from .cluster import (
    ClusteringResult,
    ElbowCurve,
    KMeans,
    KMedian,
    KMedoids,
    MiniBatchKMeans,
    assign,
    compute_inertia,
    elbow_curve,
    kmeans_fit,
    kmedian_fit,
    kmedoids_fit,
    minibatch_kmeans_fit,
    update_means,
)
from .report import (
    ClusterSizeTable,
    TermRanking,
    YearlySeries,
    cluster_sizes,
    emit_plots,
    top_terms,
    yearly_report,
)

__version__ = "0.1.0"
