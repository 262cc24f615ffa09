"""Inertia-versus-k curves for the elbow rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._validation import check_matrix, check_positive_int
from ._core import fit_best


@dataclass(frozen=True)
class ElbowCurve:
    points: tuple  # ((k, inertia), ...)
    restarts: int
    seeds: dict  # k -> per-restart seeds
    distance: str = "sql2"
    variant: str = "means"

    def __post_init__(self):
        ks = [k for k, _ in self.points]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("elbow curve ks must be strictly increasing")

    def __len__(self):
        return len(self.points)

    @property
    def ks(self) -> list[int]:
        return [k for k, _ in self.points]

    @property
    def inertias(self) -> list[float]:
        return [j for _, j in self.points]

    def drops(self) -> list[float]:
        """Decrease of inertia from each k to the next."""
        j = self.inertias
        return [a - b for a, b in zip(j, j[1:])]


def _k_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(k)]).generate_state(1)[0])


def elbow_curve(matrix, k_min, k_max, distance="sql2", restarts=10, seed=0, variant="means",
                **params) -> ElbowCurve:
    """Best-of-``restarts`` inertia for every k in ``[k_min, k_max]``.

    Each k draws its restart seeds from ``(seed, k)``, so extending the
    range leaves earlier points unchanged.
    """
    X = check_matrix(matrix)
    k_min = check_positive_int(k_min, "k_min")
    k_max = check_positive_int(k_max, "k_max")
    if k_max < k_min:
        raise ValueError(f"k_max={k_max} < k_min={k_min}")
    if k_max > X.shape[0]:
        raise ValueError(f"k_max={k_max} exceeds the number of rows ({X.shape[0]})")
    restarts = check_positive_int(restarts, "restarts")
    points, seeds = [], {}
    for k in range(k_min, k_max + 1):
        res = fit_best(X, k, variant=variant, restarts=restarts, seed=_k_seed(seed, k),
                       distance=distance, **params)
        points.append((k, res.inertia))
        seeds[k] = list(res.restart_seeds)
    return ElbowCurve(tuple(points), restarts, seeds, res.distance, variant)
