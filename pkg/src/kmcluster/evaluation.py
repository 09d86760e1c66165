"""Clustering error rate via optimal label matching, plus outlier counting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import UsageError, as_labels


@dataclass(frozen=True)
class CerResult:
    cer: float
    # mapping[r] = estimated label matched to true label r, or -1 when r is
    # only matched to a zero-padding column
    mapping: np.ndarray
    matched_count: int
    n: int


def confusion(truth, est, k_true: int | None = None, k_est: int | None = None) -> np.ndarray:
    """Count matrix with entry ``(r, s)`` = #points with true label r, estimated s."""
    t = as_labels(truth)
    e = as_labels(est)
    if t.shape[0] != e.shape[0]:
        raise UsageError(f"length mismatch: {t.shape[0]} vs {e.shape[0]}")
    k_true = int(t.max()) + 1 if k_true is None else k_true
    k_est = int(e.max()) + 1 if k_est is None else k_est
    out = np.zeros((k_true, k_est), dtype=np.int64)
    np.add.at(out, (t, e), 1)
    return out


def hungarian(cost) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect matching on a square matrix, O(m^3).

    Shortest augmenting path with row/column potentials (Kuhn-Munkres in the
    Jonker-Volgenant style). Returns ``(assignment, total)`` with
    ``assignment[i]`` the column matched to row ``i``.
    """
    a = np.asarray(cost, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError(f"cost matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise UsageError("cost matrix has non-finite entries")
    m = a.shape[0]
    if m == 0:
        return np.zeros(0, dtype=np.int64), 0.0
    # 1-based bookkeeping, column 0 is a virtual start
    u = np.zeros(m + 1)
    v = np.zeros(m + 1)
    row_of = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, m + 1):
        row_of[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = row_of[j0]
            free = ~used[1:]
            cur = a[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[row_of[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if row_of[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            row_of[j0] = row_of[j1]
            j0 = j1
    assignment = np.empty(m, dtype=np.int64)
    assignment[row_of[1:] - 1] = np.arange(m)
    return assignment, float(a[np.arange(m), assignment].sum())


def cer(truth, est) -> CerResult:
    """Clustering error rate: 1 - (best one-to-one label agreement) / n.

    When the number of true and estimated clusters differ the confusion
    matrix is zero-padded to square, so surplus clusters match nothing.
    """
    t = as_labels(truth)
    e = as_labels(est)
    if t.shape[0] != e.shape[0]:
        raise UsageError(f"length mismatch: {t.shape[0]} vs {e.shape[0]}")
    n = t.shape[0]
    if n == 0:
        raise UsageError("empty label vectors")
    conf = confusion(t, e)
    kt, ke = conf.shape
    m = max(kt, ke)
    padded = np.zeros((m, m), dtype=np.int64)
    padded[:kt, :ke] = conf
    assignment, total = hungarian(-padded)
    matched = int(round(-total))
    mapping = np.where(assignment[:kt] < ke, assignment[:kt], -1)
    return CerResult(cer=1.0 - matched / n, mapping=mapping, matched_count=matched, n=n)


def count_singletons(est) -> int:
    """Number of clusters of size one (the outlier count)."""
    e = as_labels(est)
    return int(np.sum(np.bincount(e) == 1)) if e.size else 0
