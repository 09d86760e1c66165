"""Initial centroid selection: uniform random rows, k-means++, and max-min."""

from __future__ import annotations

import enum

import numpy as np

from .core import InfeasibleError, UsageError, as_data_matrix, make_rng, pairwise_sq_dists


class InitStrategy(str, enum.Enum):
    RANDOM = "random"
    KMEANSPP = "kmeanspp"
    MAXMIN = "maxmin"


def _unique_row_indices(x: np.ndarray) -> np.ndarray:
    """Index of the first occurrence of each distinct row, in row order."""
    _, first = np.unique(x, axis=0, return_index=True)
    return np.sort(first)


def _check_k(x: np.ndarray, k: int) -> np.ndarray:
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    distinct = _unique_row_indices(x)
    if k > distinct.shape[0]:
        raise InfeasibleError(f"k={k} exceeds the {distinct.shape[0]} distinct rows")
    return distinct


def init_random(data, k: int, rng=None) -> np.ndarray:
    """Pick ``k`` distinct rows uniformly without replacement.

    Duplicate rows are collapsed first so the result is always pairwise
    distinct.
    """
    x = as_data_matrix(data)
    distinct = _check_k(x, k)
    rng = make_rng(rng)
    pick = rng.choice(distinct.shape[0], size=k, replace=False)
    return x[distinct[pick]].copy()


def init_kmeanspp(data, k: int, rng=None, first: int | None = None) -> np.ndarray:
    """k-means++ seeding (Arthur & Vassilvitskii, 2007).

    After a uniform first pick, each new centroid is drawn with probability
    proportional to the squared distance to the nearest centroid chosen so
    far. Rows coinciding with a chosen centroid have probability zero.

    Args:
        data: ``(n, p)`` observations.
        k: number of centroids.
        rng: seed or Generator.
        first: optional row index forcing the first centroid.
    """
    x = as_data_matrix(data)
    _check_k(x, k)
    rng = make_rng(rng)
    n = x.shape[0]
    idx = int(rng.integers(n)) if first is None else int(first)
    centers = [x[idx]]
    d2 = pairwise_sq_dists(x, x[idx][None, :])[:, 0]
    for _ in range(1, k):
        total = d2.sum()
        if not total > 0:
            raise InfeasibleError("all remaining rows coincide with chosen centroids")
        idx = int(rng.choice(n, p=d2 / total))
        centers.append(x[idx])
        d2 = np.minimum(d2, pairwise_sq_dists(x, x[idx][None, :])[:, 0])
    return np.array(centers)


def maxmin_indices(x: np.ndarray, k: int, first: int) -> np.ndarray:
    """Row indices chosen by greedy farthest-point traversal from ``first``.

    Each step takes the row maximizing the minimum distance to the rows
    already chosen; ``np.argmax`` resolves ties to the lowest row index.
    Rows equal to a chosen centroid have distance zero and are never picked
    while a positive distance remains.
    """
    chosen = [int(first)]
    d2 = pairwise_sq_dists(x, x[first][None, :])[:, 0]
    for _ in range(1, k):
        j = int(np.argmax(d2))
        if not d2[j] > 0:
            raise InfeasibleError("fewer distinct rows than requested centroids")
        chosen.append(j)
        d2 = np.minimum(d2, pairwise_sq_dists(x, x[j][None, :])[:, 0])
    return np.array(chosen, dtype=np.int64)


def init_maxmin(data, k: int, rng=None, first: int | None = None) -> np.ndarray:
    """Max-min (farthest-point) initialization.

    The first centroid is a uniformly random row; every later centroid is the
    row whose distance to its nearest already-chosen centroid is largest.
    The only randomness is the first pick, so ``first`` makes the result
    fully deterministic.
    """
    x = as_data_matrix(data)
    _check_k(x, k)
    if first is None:
        first = int(make_rng(rng).integers(x.shape[0]))
    return x[maxmin_indices(x, k, first)].copy()


def initialize(strategy: InitStrategy | str, data, k: int, rng=None) -> np.ndarray:
    strategy = InitStrategy(strategy)
    if strategy is InitStrategy.RANDOM:
        return init_random(data, k, rng)
    if strategy is InitStrategy.KMEANSPP:
        return init_kmeanspp(data, k, rng)
    return init_maxmin(data, k, rng)
