"""Command-line interface.

Subcommands: ingest, dict, featurize, cluster, elbow, yearly, report, run.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .cluster import elbow_curve, fit_best
from .config import PipelineConfig, load_config
from .exceptions import HeadclustError
from .features import featurize, read_matrix, write_matrix
from .ingest import load_csv, split_by_year
from .ngrams import read_dictionary, select_features, write_dictionary
from .pipeline import StageError, read_assignments, run_metadata, run_pipeline, write_assignments, write_json
from .report import cluster_sizes, emit_plots, top_terms, write_csv, yearly_report

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("headclust")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- flag groups ------------------------------------------------------------

def _input_flags(p):
    g = p.add_argument_group("input")
    g.add_argument("--input", help="headline CSV")
    g.add_argument("--text-column", help="text column (default headline_text)")
    g.add_argument("--date-column", help="date column, YYYYMMDD (default publish_date)")
    g.add_argument("--no-date", action="store_true", help="ignore dates")


def _normalize_flags(p):
    g = p.add_argument_group("normalization")
    g.add_argument("--stemmer", help="porter | identity | table:PATH (default porter)")
    g.add_argument("--stopwords", help="stopword file, one word per line (default: bundled English list)")
    g.add_argument("--ngram", type=int, action="append", help="n-gram arity; repeatable (default 1)")
    g.add_argument("--min-freq", type=int, help="minimum n-gram count (default 10)")


def _cluster_flags(p):
    g = p.add_argument_group("clustering")
    g.add_argument("--distance", choices=["sql2", "l2", "l1", "cosine"])
    g.add_argument("--init", choices=["kpp", "random", "firstk"])
    g.add_argument("--variant", choices=["means", "medoids", "median", "minibatch"])
    g.add_argument("--restarts", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--max-iter", type=int)
    g.add_argument("--tol", type=float)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--batches", type=int)


def _common_flags(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--threads", type=int, help="thread cap (default $HEADCLUST_THREADS or 1)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="headclust", description="Headline clustering toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="load and validate a CSV, print a summary")
    _input_flags(p), _common_flags(p)
    p.add_argument("--out", help="write the summary JSON here instead of stdout")

    p = sub.add_parser("dict", help="build an n-gram dictionary TSV")
    _input_flags(p), _normalize_flags(p), _common_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("featurize", help="vectorize a corpus against a dictionary")
    _input_flags(p), _normalize_flags(p), _common_flags(p)
    p.add_argument("--dict", required=True, help="dictionary TSV from 'dict'")
    p.add_argument("--out", required=True, help="matrix file")

    p = sub.add_parser("cluster", help="cluster a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k", type=int, required=True)
    _cluster_flags(p), _common_flags(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("elbow", help="inertia for every k in a range")
    p.add_argument("--matrix", required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    _cluster_flags(p), _common_flags(p)
    p.add_argument("--out", required=True, help="CSV path (an .svg is written next to it with --svg)")
    p.add_argument("--svg", action="store_true")

    p = sub.add_parser("yearly", help="cluster each publication year separately")
    _yearly_flags(p)

    p = sub.add_parser("report", help="sizes / terms / yearly reports")
    rsub = p.add_subparsers(dest="report", required=True, parser_class=_Parser)
    r = rsub.add_parser("sizes")
    r.add_argument("--assignments", required=True)
    r.add_argument("--k", type=int, help="cluster count (default: largest index + 1)")
    r.add_argument("--out", required=True)
    r.add_argument("--svg", action="store_true")
    _common_flags(r)
    r = rsub.add_parser("terms")
    r.add_argument("--matrix", required=True)
    r.add_argument("--assignments", required=True)
    r.add_argument("--dict", required=True, help="dictionary the matrix was built from")
    r.add_argument("--min-freq", type=int)
    r.add_argument("--cluster", type=int, required=True)
    r.add_argument("--limit", type=int, default=20)
    r.add_argument("--out", required=True)
    r.add_argument("--svg", action="store_true")
    _common_flags(r)
    r = rsub.add_parser("yearly")
    _yearly_flags(r)

    p = sub.add_parser("run", help="full pipeline from a config file and/or flags")
    _input_flags(p), _normalize_flags(p), _cluster_flags(p), _common_flags(p)
    p.add_argument("--k", type=int)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--by-year", action="store_true", default=None)
    p.add_argument("--shared-dictionary", action="store_true", default=None)
    p.add_argument("--terms-limit", type=int)
    p.add_argument("--svg", action="store_true", default=None)
    p.add_argument("--out", help="output directory")
    return parser


def _yearly_flags(p):
    _input_flags(p), _normalize_flags(p), _cluster_flags(p), _common_flags(p)
    p.add_argument("--k", type=int, default=None, help="clusters per year (default 19)")
    p.add_argument("--shared-dictionary", action="store_true", default=None,
                   help="count one dictionary over all years")
    p.add_argument("--out", required=True, help="CSV path")
    p.add_argument("--svg", action="store_true", default=None)


# -- config assembly ----------------------------------------------------------

_FLAG_FIELDS = {
    "input": "input", "text_column": "text_column", "date_column": "date_column",
    "stemmer": "stemmer", "stopwords": "stopwords", "ngram": "ngram", "min_freq": "min_freq",
    "k": "k", "k_min": "k_min", "k_max": "k_max", "distance": "distance", "variant": "variant",
    "init": "init", "restarts": "restarts", "seed": "seed", "max_iter": "max_iter", "tol": "tol",
    "batch_size": "batch_size", "batches": "batches", "by_year": "by_year",
    "shared_dictionary": "shared_dictionary", "terms_limit": "terms_limit", "svg": "svg",
    "threads": "threads", "out": "out",
}


def make_config(args, **defaults) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    base = {k: v for k, v in defaults.items() if k not in cfg.fields_set}
    cfg = cfg.updated(**base)
    flags = {field: getattr(args, name) for name, field in _FLAG_FIELDS.items()
             if getattr(args, name, None) is not None}
    cfg = cfg.updated(**flags)
    if getattr(args, "no_date", False):
        cfg.date_column = None
    return cfg


def _require_input(cfg):
    if not cfg.input:
        raise UsageError("--input is required (or 'input' in --config)")


# -- commands -----------------------------------------------------------------

def cmd_ingest(args):
    cfg = make_config(args)
    _require_input(cfg)
    corpus = load_csv(cfg.input, cfg.date_column, cfg.text_column)
    years = {}
    for d in corpus:
        if d.date is not None:
            years[d.date.year] = years.get(d.date.year, 0) + 1
    summary = {
        "source": corpus.source,
        "documents": len(corpus),
        "skipped_rows": corpus.skipped_rows,
        "undated": sum(d.date is None for d in corpus),
        "years": {str(y): years[y] for y in sorted(years)},
    }
    if args.out:
        write_json(summary, args.out)
    else:
        print(json.dumps(summary, indent=2))


def _corpus_and_normalizer(cfg):
    _require_input(cfg)
    return load_csv(cfg.input, cfg.date_column, cfg.text_column), cfg.normalizer()


def cmd_dict(args):
    from .ngrams import build_multi
    from .normalize import normalize_corpus

    cfg = make_config(args)
    corpus, normalizer = _corpus_and_normalizer(cfg)
    d = build_multi(normalize_corpus(corpus, normalizer), cfg.ngram)
    write_dictionary(d, args.out)
    log.info("%d n-grams (arities %s) over %d documents -> %s", len(d), sorted(d.n_values),
             len(corpus), args.out)


def cmd_featurize(args):
    cfg = make_config(args)
    corpus, normalizer = _corpus_and_normalizer(cfg)
    d = read_dictionary(args.dict)
    feats = featurize(corpus, normalizer, sorted(d.n_values), cfg.min_freq, dictionary=d,
                      n_threads=cfg.threads)
    write_matrix(feats.matrix, args.out)
    log.info("%d x %d matrix (space %s) -> %s", len(feats.matrix), len(feats.space),
             feats.space.digest(), args.out)


def cmd_cluster(args):
    cfg = make_config(args)
    mf = read_matrix(args.matrix)
    res = fit_best(mf.to_csr(), args.k, variant=cfg.variant, restarts=cfg.restarts, seed=cfg.seed,
                   **cfg.fit_params())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_assignments(res.assignments, out / "assignments.tsv", mf.doc_ids)
    write_json(run_metadata(res, {"feature_space": mf.space_digest, "matrix": str(args.matrix)}),
               out / "run.json")
    print(json.dumps({"k": res.k, "seed": res.seed, "inertia": res.inertia,
                      "iterations": res.iterations_run}))


def cmd_elbow(args):
    cfg = make_config(args)
    X = read_matrix(args.matrix).to_csr()
    curve = elbow_curve(X, args.k_min, args.k_max, restarts=cfg.restarts, seed=cfg.seed,
                        variant=cfg.variant, **cfg.fit_params())
    for p in emit_plots(curve, args.out, svg=args.svg):
        log.info("wrote %s", p)


def cmd_yearly(args):
    cfg = make_config(args, k=19)
    _require_input(cfg)
    corpus = load_csv(cfg.input, cfg.date_column, cfg.text_column)
    series = yearly_report(corpus, cfg)
    for p in emit_plots(series, args.out, svg=bool(cfg.svg)):
        log.info("wrote %s", p)


def cmd_report(args):
    if args.report == "yearly":
        return cmd_yearly(args)
    _, labels = read_assignments(args.assignments)
    if args.report == "sizes":
        table = cluster_sizes(labels, args.k)
        emit_plots(table, args.out, svg=args.svg)
        return
    mf = read_matrix(args.matrix)
    d = read_dictionary(args.dict)
    min_freq = args.min_freq if args.min_freq is not None else make_config(args).min_freq
    matrix = mf.with_space(select_features(d, min_freq))
    if len(labels) != len(matrix):
        raise HeadclustError(f"{len(labels)} assignments for {len(matrix)} matrix rows")
    ranking = top_terms(matrix, labels, args.cluster, args.limit)
    if args.svg and ranking.terms:
        emit_plots(ranking, args.out, svg=True)
    else:
        write_csv(ranking, args.out)


def cmd_run(args):
    cfg = make_config(args)
    _require_input(cfg)
    manifest = run_pipeline(cfg)
    print(json.dumps({k: manifest[k] for k in ("status", "corpus_size", "feature_count")
                      if k in manifest}))


COMMANDS = {
    "ingest": cmd_ingest, "dict": cmd_dict, "featurize": cmd_featurize, "cluster": cmd_cluster,
    "elbow": cmd_elbow, "yearly": cmd_yearly, "report": cmd_report, "run": cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"headclust: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"headclust: {exc}", file=sys.stderr)
        cause = exc.cause
        data = isinstance(cause, (HeadclustError, OSError, ValueError))
        return EXIT_DATA if data else EXIT_INTERNAL
    except (HeadclustError, OSError, ValueError) as exc:
        print(f"headclust: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"headclust: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
