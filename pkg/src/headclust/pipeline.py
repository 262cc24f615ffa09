"""End-to-end run: ingest, normalize, count, featurize, cluster, report."""

from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from ._threads import resolve_threads
from .cluster import elbow_curve, fit_best
from .config import PipelineConfig
from .exceptions import DataError
from .features import featurize, write_matrix
from .ingest import load_csv
from .ngrams import write_dictionary
from .report import cluster_sizes, emit_plots, top_terms, yearly_report

logger = logging.getLogger(__name__)


class StageError(Exception):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def write_assignments(assignments, path, doc_ids=None) -> None:
    if doc_ids is None:
        doc_ids = range(len(assignments))
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for doc_id, c in zip(doc_ids, assignments):
            fh.write(f"{doc_id}\t{int(c)}\n")


def read_assignments(path) -> tuple[list[int], np.ndarray]:
    ids, labels = [], []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc_id, c = line.split("\t")
                ids.append(int(doc_id))
                labels.append(int(c))
            except ValueError:
                raise DataError(f"{path}:{lineno}: expected 'doc_id<TAB>cluster'") from None
    return ids, np.asarray(labels, dtype=np.int64)


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run_metadata(result, extra=None) -> dict:
    meta = result.metadata()
    meta.update(extra or {})
    return meta


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute every stage in order and write all artifacts under ``config.out``.

    Returns the manifest. On failure the manifest is still written, with
    ``status: FAILED`` and the failing stage, and :class:`StageError` is raised.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    recorded = config.as_dict()
    recorded["threads"] = resolve_threads(config.threads)
    manifest = {"status": "RUNNING", "config": recorded, "artifacts": {}, "timings": {}}
    state = {}

    @contextmanager
    def stage(name):
        t0 = time.perf_counter()
        try:
            yield
        except Exception as exc:
            manifest["status"] = "FAILED"
            manifest["failed_stage"] = name
            manifest["error"] = str(exc)
            write_json(manifest, out / "manifest.json")
            raise StageError(name, exc) from exc
        finally:
            manifest["timings"][name] = round(time.perf_counter() - t0, 6)

    def artifact(key, path):
        manifest["artifacts"][key] = Path(path).name

    if config.input is None:
        raise ValueError("config.input is required")

    with stage("ingest"):
        corpus = load_csv(config.input, config.date_column, config.text_column)
        manifest["corpus_size"] = len(corpus)
        manifest["skipped_rows"] = corpus.skipped_rows
        if len(corpus) == 0:
            raise DataError(f"{config.input}: no documents")

    with stage("featurize"):
        feats = featurize(corpus, config.normalizer(), config.ngram, config.min_freq,
                          n_threads=config.threads)
        manifest["dictionary_size"] = len(feats.dictionary)
        manifest["feature_count"] = len(feats.space)
        manifest["feature_space"] = feats.space.digest()
        write_dictionary(feats.dictionary, out / "dictionary.tsv")
        artifact("dictionary", out / "dictionary.tsv")
        write_matrix(feats.matrix, out / "matrix.tsv")
        artifact("matrix", out / "matrix.tsv")
        state["feats"] = feats

    if config.k_min is not None and config.k_max is not None:
        with stage("elbow"):
            curve = elbow_curve(feats.matrix, config.k_min, config.k_max, restarts=config.restarts,
                                seed=config.seed, variant=config.variant, **config.fit_params())
            for p in emit_plots(curve, out / "elbow", svg=config.svg):
                artifact(p.stem + p.suffix, p)
            manifest["elbow"] = [list(p) for p in curve.points]

    if config.k is not None:
        with stage("cluster"):
            res = fit_best(feats.matrix, config.k, variant=config.variant, restarts=config.restarts,
                           seed=config.seed, **config.fit_params())
            write_assignments(res.assignments, out / "assignments.tsv")
            artifact("assignments", out / "assignments.tsv")
            write_json(run_metadata(res, {"feature_space": feats.space.digest()}), out / "run.json")
            artifact("run", out / "run.json")
            manifest["inertia"] = res.inertia

        with stage("report"):
            sizes = cluster_sizes(res)
            for p in emit_plots(sizes, out / "sizes", svg=config.svg):
                artifact(p.stem + p.suffix, p)
            with (out / "terms.csv").open("w", encoding="utf-8", newline="\n") as fh:
                fh.write("cluster,rank,term,weight\n")
                for c in range(res.k):
                    ranking = top_terms(feats.matrix, res, c, config.terms_limit)
                    for rank, (term, w) in enumerate(ranking.terms, 1):
                        fh.write(f"{c},{rank},{term},{w}\n")
            artifact("terms", out / "terms.csv")
            manifest["largest_share"] = sizes.largest_share

    if config.by_year:
        with stage("yearly"):
            series = yearly_report(corpus, config)
            for p in emit_plots(series, out / "yearly", svg=config.svg):
                artifact(p.stem + p.suffix, p)
            manifest["yearly_skipped"] = list(series.skipped)

    manifest["status"] = "OK"
    write_json(manifest, out / "manifest.json")
    return manifest
