"""k-means engine: SSQ objective, assignment/update steps and four iteration rules.

Lloyd and Forgy run the same batch iteration (they historically differ only
in how centroids are seeded, which is the job of :mod:`initialization`).
MacQueen and Hartigan-Wong start with one batch pass and then sweep the data
moving single points, updating the two affected centroids immediately.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numba
import numpy as np

from .core import (
    InfeasibleError,
    KmclusterError,
    UsageError,
    as_data_matrix,
    as_labels,
    make_rng,
    pairwise_sq_dists,
)
from .initialization import InitStrategy, initialize


class EmptyClusterError(KmclusterError):
    """``update_step`` found a cluster with no members."""

    def __init__(self, clusters):
        self.clusters = list(clusters)
        super().__init__(f"empty clusters: {self.clusters}")


class KmeansVariant(str, enum.Enum):
    LLOYD = "lloyd"
    FORGY = "forgy"
    MACQUEEN = "macqueen"
    HARTIGAN_WONG = "hartigan_wong"


@dataclass(frozen=True)
class KmeansConfig:
    max_iter: int = 100
    ssq_rel_tol: float = 1e-10

    def __post_init__(self):
        if self.max_iter < 1:
            raise UsageError("max_iter must be >= 1")
        if self.ssq_rel_tol < 0:
            raise UsageError("ssq_rel_tol must be >= 0")


@dataclass
class FitResult:
    labels: np.ndarray
    centroids: np.ndarray
    ssq: float
    iterations: int
    converged: bool
    # SSQ after every assignment and every update (one entry per sweep for
    # the single-point variants); non-increasing by construction
    history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@numba.njit(cache=True)
def _nearest_kernel(x, c):
    """Nearest centroid per row (first index wins ties) and its squared distance."""
    n, p = x.shape
    k = c.shape[0]
    labels = np.empty(n, dtype=np.int64)
    best_d = np.empty(n)
    for i in range(n):
        best = 0
        bv = np.inf
        for j in range(k):
            acc = 0.0
            for q in range(p):
                t = x[i, q] - c[j, q]
                acc += t * t
            if acc < bv:
                bv = acc
                best = j
        labels[i] = best
        best_d[i] = bv
    return labels, best_d


@numba.njit(cache=True)
def _ssq_kernel(x, labels, c):
    n, p = x.shape
    total = 0.0
    for i in range(n):
        r = labels[i]
        for q in range(p):
            t = x[i, q] - c[r, q]
            total += t * t
    return total


def ssq_of(data, labels, centroids) -> float:
    """Within-cluster sum of squared distances to the given centroids."""
    x = as_data_matrix(data)
    c = np.asarray(centroids, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    if c.shape[1] != x.shape[1]:
        raise UsageError(f"centroid dimension {c.shape[1]} != data dimension {x.shape[1]}")
    lab = as_labels(labels, n=x.shape[0], k=c.shape[0])
    return float(_ssq_kernel(x, lab, np.ascontiguousarray(c)))


def assign_step(data, centroids) -> np.ndarray:
    """Label each row with its nearest centroid (ties to the lowest index)."""
    x = as_data_matrix(data)
    c = np.asarray(centroids, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    if c.shape[0] == 0:
        raise UsageError("empty centroid set")
    if c.shape[1] != x.shape[1]:
        raise UsageError(f"centroid dimension {c.shape[1]} != data dimension {x.shape[1]}")
    return _nearest_kernel(x, np.ascontiguousarray(c))[0]


def _means(x: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    counts = np.bincount(labels, minlength=k)
    sums = np.column_stack([np.bincount(labels, weights=x[:, q], minlength=k) for q in range(x.shape[1])])
    with np.errstate(invalid="ignore", divide="ignore"):
        return sums / counts[:, None], counts


def update_step(data, labels, k: int) -> np.ndarray:
    """Centroid of each cluster; raises :class:`EmptyClusterError` if one is empty."""
    x = as_data_matrix(data)
    lab = as_labels(labels, n=x.shape[0], k=k)
    means, counts = _means(x, lab, k)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EmptyClusterError(empty.tolist())
    return means


def _reseed_empty(x, labels, centroids, d2, k):
    """Give every empty cluster the row farthest from its own centroid.

    Only rows from clusters with at least two members are eligible, so no
    cluster is emptied in the process. Modifies ``labels`` and ``centroids``.
    """
    counts = np.bincount(labels, minlength=k)
    for r in np.flatnonzero(counts == 0):
        own = d2[np.arange(x.shape[0]), labels]
        own = np.where(counts[labels] > 1, own, -np.inf)
        i = int(np.argmax(own))
        counts[labels[i]] -= 1
        counts[r] += 1
        labels[i] = r
        centroids[r] = x[i]
        d2[:, r] = pairwise_sq_dists(x, x[i][None, :])[:, 0]
    return labels, centroids


def _assign_with_reseed(x, centroids, k):
    labels, _ = _nearest_kernel(x, centroids)
    if np.bincount(labels, minlength=k).min() == 0:
        labels, centroids = _reseed_empty(x, labels, centroids, pairwise_sq_dists(x, centroids), k)
    return labels, centroids


def _batch_iterations(x, c, k, cfg, history):
    labels = None
    prev_ssq = None
    for it in range(1, cfg.max_iter + 1):
        new, c = _assign_with_reseed(x, c.copy(), k)
        history.append(float(_ssq_kernel(x, new, c)))
        if labels is not None and np.array_equal(new, labels):
            return labels, c, it, True
        labels = new
        c = update_step(x, labels, k)
        ssq = float(_ssq_kernel(x, labels, c))
        history.append(ssq)
        if prev_ssq is not None and prev_ssq - ssq <= cfg.ssq_rel_tol * prev_ssq:
            return labels, c, it, True
        prev_ssq = ssq
    return labels, c, cfg.max_iter, False


@numba.njit(cache=True)
def _sweep_kernel(x, labels, c, counts, hartigan):
    """One pass over the rows in index order; returns the number of moves.

    MacQueen moves a row to its nearest centroid. Hartigan-Wong moves row i
    from r to s when ``n_s d_s / (n_s + 1) < n_r d_r / (n_r - 1)``, i.e. when
    the transfer lowers the SSQ. Rows in singleton clusters never move. Both
    rules keep ``c`` equal to the running cluster means.
    """
    n, p = x.shape
    k = c.shape[0]
    d = np.empty(k)
    moved = 0
    for i in range(n):
        r = labels[i]
        if counts[r] <= 1:
            continue
        for j in range(k):
            acc = 0.0
            for q in range(p):
                t = x[i, q] - c[j, q]
                acc += t * t
            d[j] = acc
        best = -1
        best_val = np.inf
        if hartigan:
            for j in range(k):
                if j != r:
                    v = counts[j] / (counts[j] + 1.0) * d[j]
                    if v < best_val:
                        best_val = v
                        best = j
            if not best_val < counts[r] / (counts[r] - 1.0) * d[r]:
                continue
        else:
            for j in range(k):
                if d[j] < best_val:
                    best_val = d[j]
                    best = j
            if not best_val < d[r]:
                continue
        nr = counts[r]
        ns = counts[best]
        for q in range(p):
            c[r, q] = (c[r, q] * nr - x[i, q]) / (nr - 1)
            c[best, q] = (c[best, q] * ns + x[i, q]) / (ns + 1)
        counts[r] = nr - 1
        counts[best] = ns + 1
        labels[i] = best
        moved += 1
    return moved


def _single_point_sweeps(x, labels, c, k, cfg, history, hartigan):
    """Repeat sweeps until one makes no move.

    Centroids are recomputed from scratch after every sweep to remove
    running-mean drift.
    """
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    labels = labels.astype(np.int64)
    for sweep in range(1, cfg.max_iter):
        moved = _sweep_kernel(x, labels, c, counts, hartigan)
        c = update_step(x, labels, k)
        history.append(ssq_of(x, labels, c))
        if moved == 0:
            return labels, c, sweep + 1, True
    return labels, c, cfg.max_iter, False


def fit(
    data,
    k: int,
    variant: KmeansVariant | str = KmeansVariant.LLOYD,
    strategy: InitStrategy | str = InitStrategy.MAXMIN,
    rng=None,
    cfg: KmeansConfig | None = None,
    init_centroids=None,
) -> FitResult:
    """Run k-means from a seeding strategy under one of the iteration rules.

    ``strategy="maxmin"`` with ``variant="lloyd"`` is the farthest-point
    seeded k-means; ``init_centroids`` overrides the strategy entirely.

    Raises:
        InfeasibleError: if ``k`` exceeds the number of distinct rows.
    """
    x = as_data_matrix(data)
    variant = KmeansVariant(variant)
    cfg = cfg or KmeansConfig()
    if k < 1:
        raise UsageError(f"k must be >= 1, got {k}")
    if init_centroids is None:
        c0 = initialize(strategy, x, k, make_rng(rng))
    else:
        c0 = np.array(init_centroids, dtype=np.float64).reshape(k, x.shape[1])
        if k > np.unique(x, axis=0).shape[0]:
            raise InfeasibleError(f"k={k} exceeds the number of distinct rows")

    history: list[float] = []
    if variant in (KmeansVariant.LLOYD, KmeansVariant.FORGY):
        labels, c, iters, converged = _batch_iterations(x, c0, k, cfg, history)
    else:
        labels, c = _assign_with_reseed(x, c0.copy(), k)
        history.append(ssq_of(x, labels, c))
        c = update_step(x, labels, k)
        history.append(ssq_of(x, labels, c))
        hartigan = variant is KmeansVariant.HARTIGAN_WONG
        labels, c, iters, converged = _single_point_sweeps(x, labels, c, k, cfg, history, hartigan)
    return FitResult(
        labels=labels,
        centroids=c,
        ssq=ssq_of(x, labels, c),
        iterations=iters,
        converged=converged,
        history=history,
    )
