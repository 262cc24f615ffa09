import os

THREADS_ENV = "HEADCLUST_THREADS"


def resolve_threads(n_threads=None) -> int:
    """Explicit value, else $HEADCLUST_THREADS, else 1."""
    if n_threads is None:
        n_threads = os.environ.get(THREADS_ENV) or 1
    n = int(n_threads)
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    return n
