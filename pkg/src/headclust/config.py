"""Pipeline configuration: one flat record of every knob, loadable from a key=value file."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .ingest import DEFAULT_DATE_COLUMN, DEFAULT_TEXT_COLUMN
from .ngrams import DEFAULT_MIN_FREQ


@dataclass
class PipelineConfig:
    input: Optional[str] = None
    text_column: str = DEFAULT_TEXT_COLUMN
    date_column: Optional[str] = DEFAULT_DATE_COLUMN
    stemmer: str = "porter"
    stopwords: Optional[str] = None
    ngram: tuple = (1,)
    min_freq: int = DEFAULT_MIN_FREQ
    k: Optional[int] = 8
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    distance: str = "sql2"
    variant: str = "means"
    init: str = "kpp"
    restarts: int = 10
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-4
    batch_size: int = 100
    batches: int = 100
    by_year: bool = False
    shared_dictionary: bool = False
    terms_limit: int = 20
    svg: bool = False
    threads: Optional[int] = None
    out: str = "run"
    fields_set: frozenset = field(default=frozenset(), repr=False, compare=False)

    def __post_init__(self):
        self.ngram = tuple(sorted({int(n) for n in self.ngram}))

    def normalizer(self):
        from .normalize import NormalizerConfig

        return NormalizerConfig.from_options(self.stemmer, self.stopwords)

    def fit_params(self) -> dict:
        """Keyword arguments for the fit function of ``self.variant``."""
        if self.variant == "minibatch":
            return {"distance": self.distance, "init": self.init, "batch_size": self.batch_size,
                    "n_batches": self.batches, "n_threads": self.threads}
        return {"distance": self.distance, "init": self.init, "max_iter": self.max_iter,
                "tol": self.tol, "n_threads": self.threads}

    def as_dict(self) -> dict:
        """Every knob with its effective value (no implicit defaults)."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name == "fields_set":
                continue
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    def updated(self, **changes) -> "PipelineConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        new = dataclasses.replace(self, **changes)
        new.fields_set = self.fields_set | frozenset(changes)
        return new


_FIELDS = {f.name: f for f in dataclasses.fields(PipelineConfig) if f.name != "fields_set"}


def _coerce(name: str, raw: str):
    default = _FIELDS[name].default
    raw = raw.strip()
    if name == "ngram":
        return tuple(int(x) for x in raw.replace(",", " ").split())
    if raw.lower() in ("", "none", "null") and (default is None or name in ("date_column", "stopwords")):
        return None
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    if isinstance(default, int) or name in ("k", "k_min", "k_max", "threads"):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def parse_config_text(text: str, source="<config>") -> dict:
    """Parse ``key = value`` lines; keys may use dashes or underscores."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip() if not line.lstrip().startswith("#") else ""
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{source}:{lineno}: expected 'key = value'")
        key = key.strip().lstrip("-").replace("-", "_")
        if key not in _FIELDS:
            raise ValueError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, value)
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
    return values


def load_config(path) -> PipelineConfig:
    values = parse_config_text(Path(path).read_text(encoding="utf-8"), str(path))
    cfg = dataclasses.replace(PipelineConfig(), **values)
    cfg.fields_set = frozenset(values)
    return cfg
