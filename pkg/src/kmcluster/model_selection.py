"""Choosing the number of clusters with the Gap statistic.

Tibshirani, Walther & Hastie (2001). The within-cluster dispersion W_k is the
SSQ of the fitted partition, and reference datasets are drawn uniformly over
the axis-aligned bounding box of the data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import InfeasibleError, UsageError, as_data_matrix, make_rng
from .kmeans import FitResult, ssq_of
from .methods import run_method

ClusterFn = Callable[[np.ndarray, int, np.random.Generator], FitResult]


@dataclass
class GapResult:
    k_candidates: np.ndarray
    log_wk: np.ndarray
    ref_log_wk_mean: np.ndarray
    gap: np.ndarray
    sk: np.ndarray
    k_hat: int
    # True when no candidate satisfied the selection rule and k_max was returned
    fallback: bool = False
    skipped: list[int] = field(default_factory=list)


def within_dispersion(data, fit: FitResult) -> float:
    """W_k: squared-distance SSQ of the fit, recomputed from its labels and centroids."""
    return ssq_of(data, fit.labels, fit.centroids)


def _as_cluster_fn(method) -> ClusterFn:
    if callable(method):
        return method
    name = str(method)
    return lambda x, k, rng: run_method(name, x, k, rng)


def _log(w: float) -> float:
    return float(np.log(w)) if w > 0 else -np.inf


def select_k(k_candidates, gap, sk) -> tuple[int, bool]:
    """Smallest k with ``gap(k) >= gap(k+1) - s(k+1)``; otherwise the last k."""
    ks = list(k_candidates)
    for i in range(len(ks) - 1):
        if gap[i] >= gap[i + 1] - sk[i + 1]:
            return int(ks[i]), False
    return int(ks[-1]), len(ks) > 1


def reference_datasets(data, b: int, rng=None) -> np.ndarray:
    """``(b, n, p)`` uniform draws over the bounding box of ``data``."""
    x = as_data_matrix(data)
    rng = make_rng(rng)
    lo, hi = x.min(axis=0), x.max(axis=0)
    return lo + rng.random((b,) + x.shape) * (hi - lo)


def gap_statistic(data, k_max: int, b: int = 50, method="proposed", rng=None,
                  k_min: int = 1) -> GapResult:
    """Gap statistic over ``k_min..k_max``.

    Args:
        data: ``(n, p)`` observations.
        k_max: largest candidate number of clusters.
        b: number of uniform reference datasets.
        method: a method id understood by :func:`methods.run_method`, or a
            callable ``(data, k, rng) -> FitResult``.
        rng: seed or Generator. Child seeds for every (k, reference) fit are
            derived up front, so results do not depend on evaluation order.

    Candidates that are infeasible for the method (e.g. k above the number of
    distinct rows) are skipped and listed in ``skipped``.
    """
    x = as_data_matrix(data)
    if k_max < 1 or b < 1 or k_min < 1 or k_min > k_max:
        raise UsageError("need 1 <= k_min <= k_max and b >= 1")
    fn = _as_cluster_fn(method)
    ss = np.random.SeedSequence(make_rng(rng).integers(2**63))
    ref_seed, fit_seed = ss.spawn(2)
    refs = reference_datasets(x, b, make_rng(ref_seed))
    ks, log_wk, ref_mean, gaps, sks, skipped = [], [], [], [], [], []
    for k, seed in zip(range(k_min, k_max + 1), fit_seed.spawn(k_max - k_min + 1)):
        child = seed.spawn(b + 1)
        try:
            lw = _log(within_dispersion(x, fn(x, k, make_rng(child[0]))))
            ref_lw = np.array([
                _log(within_dispersion(refs[j], fn(refs[j], k, make_rng(child[j + 1]))))
                for j in range(b)
            ])
        except InfeasibleError:
            skipped.append(k)
            continue
        ks.append(k)
        log_wk.append(lw)
        ref_mean.append(ref_lw.mean())
        gaps.append(ref_lw.mean() - lw)
        sks.append(ref_lw.std() * np.sqrt(1.0 + 1.0 / b))
    if not ks:
        raise InfeasibleError("no feasible candidate k")
    k_hat, fallback = select_k(ks, gaps, sks)
    return GapResult(
        k_candidates=np.array(ks),
        log_wk=np.array(log_wk),
        ref_log_wk_mean=np.array(ref_mean),
        gap=np.array(gaps),
        sk=np.array(sks),
        k_hat=k_hat,
        fallback=fallback,
        skipped=skipped,
    )
