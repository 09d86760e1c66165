"""Shared numeric kernels, error types and the seeded RNG contract.

Labels are 0-based integer arrays throughout the library (cluster ``r`` is
``labels == r``); only the CLI writes them 1-based.
"""

from __future__ import annotations

import numpy as np


class KmclusterError(Exception):
    """Base class for library errors."""


class UsageError(KmclusterError, ValueError):
    """Bad arguments: shape mismatch, invalid labels, empty inputs."""


class InfeasibleError(KmclusterError):
    """The clustering request cannot be satisfied, e.g. k > distinct rows."""


class NumericError(KmclusterError, ArithmeticError):
    """A numerical procedure broke down (non-PD covariance, degenerate fit)."""


def make_rng(seed: int | np.random.SeedSequence | np.random.Generator | None = None) -> np.random.Generator:
    """Return a PCG64-backed generator.

    PCG64 streams are identical across platforms for a given seed, and
    ``SeedSequence`` gives independent children for parallel work. Passing
    an existing Generator returns it unchanged.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(*keys: int) -> np.random.SeedSequence:
    """Deterministic child seed from a tuple of non-negative integers."""
    return np.random.SeedSequence([int(k) for k in keys])


def as_data_matrix(data) -> np.ndarray:
    """Validate and convert to a float64 ``(n, p)`` array.

    1-d input is treated as ``n`` observations of a single feature.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise UsageError(f"data must be 2-d, got shape {x.shape}")
    if x.shape[0] < 1 or x.shape[1] < 1:
        raise UsageError(f"data must have n >= 1 and p >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise UsageError("data contains NaN or infinite entries")
    return x


def as_labels(labels, n: int | None = None, k: int | None = None) -> np.ndarray:
    """Validate a 0-based label vector."""
    lab = np.asarray(labels)
    if lab.ndim != 1:
        raise UsageError("labels must be 1-d")
    if lab.size and not np.issubdtype(lab.dtype, np.integer):
        if not np.all(lab == np.round(lab)):
            raise UsageError("labels must be integers")
    lab = lab.astype(np.int64)
    if n is not None and lab.shape[0] != n:
        raise UsageError(f"labels length {lab.shape[0]} does not match {n} rows")
    if lab.size and lab.min() < 0:
        raise UsageError("labels must be non-negative")
    if k is not None and lab.size and lab.max() >= k:
        raise UsageError(f"label {lab.max()} out of range for k={k}")
    return lab


def sq_euclidean(a, b) -> float:
    """Squared Euclidean distance between two vectors."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    d = a - b
    return float(np.dot(d, d))


def pairwise_sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``(n, k)`` squared distances, computed from explicit differences.

    The expanded ``|x|^2 - 2x.c + |c|^2`` form is avoided on purpose: it
    loses exact ties and can go slightly negative.
    """
    diff = x[:, None, :] - c[None, :, :]
    return np.einsum("nkp,nkp->nk", diff, diff)


def nearest_centroid(x, centroids) -> tuple[int, float]:
    """Index of the closest centroid and its (non-squared) distance.

    Ties go to the lowest index.
    """
    c = np.asarray(centroids, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    if c.shape[0] == 0:
        raise UsageError("empty centroid set")
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != c.shape[1]:
        raise UsageError(f"dimension mismatch: {x.shape[0]} vs {c.shape[1]}")
    d2 = pairwise_sq_dists(x[None, :], c)[0]
    j = int(np.argmin(d2))
    return j, float(np.sqrt(d2[j]))


def distinct_row_count(x: np.ndarray) -> int:
    return int(np.unique(x, axis=0).shape[0])
