"""Synthetic data: Gaussian-mixture benchmark scenarios and random stamps."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import UsageError, as_data_matrix, as_labels, make_rng


class ScenarioModel(str, enum.Enum):
    KMEANS = "kmeans"
    QDA = "qda"


@dataclass(frozen=True)
class ScenarioConfig:
    model: ScenarioModel = ScenarioModel.KMEANS
    phi: float = 0.8
    outliers: bool = False
    p: int = 5
    n_small_clusters: int = 5
    n_large_clusters: int = 5
    small_mean: float = 50.0
    large_mean: float = 1000.0
    n_outliers: int = 10
    sigma: float = 0.1
    eig_upper: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "model", ScenarioModel(self.model))
        if not self.phi > 0:
            raise UsageError(f"phi must be positive, got {self.phi}")
        if self.p < 1:
            raise UsageError("p must be >= 1")
        if self.sigma <= 0 or self.eig_upper <= 0:
            raise UsageError("sigma and eig_upper must be positive")

    @property
    def k(self) -> int:
        k = self.n_small_clusters + self.n_large_clusters
        return k + self.n_outliers if self.outliers else k


@dataclass
class LabeledDataset:
    data: np.ndarray
    truth: np.ndarray
    true_means: np.ndarray | None = None
    # (k, p, p) covariance per cluster, when known
    true_covariances: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return int(self.truth.max()) + 1

    @property
    def n(self) -> int:
        return self.data.shape[0]


def random_orthogonal(p: int, rng=None) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian, signs fixed)."""
    if p < 1:
        raise UsageError("p must be >= 1")
    rng = make_rng(rng)
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs[None, :]


def sample_mvn(mu, cov_factor, n: int, rng=None) -> np.ndarray:
    """Draw ``n`` rows ``mu + A z`` with ``z`` standard normal, so Cov = A A^T."""
    rng = make_rng(rng)
    mu = np.asarray(mu, dtype=np.float64).ravel()
    a = np.asarray(cov_factor, dtype=np.float64)
    if a.ndim == 0:
        a = a * np.eye(mu.shape[0])
    if a.shape != (mu.shape[0], mu.shape[0]):
        raise UsageError(f"factor shape {a.shape} does not match dimension {mu.shape[0]}")
    z = rng.standard_normal((n, mu.shape[0]))
    return mu[None, :] + z @ a.T


def poisson_draw(mean: float, rng=None) -> int:
    if not mean > 0:
        raise UsageError("Poisson mean must be positive")
    return int(make_rng(rng).poisson(mean))


def _positive_poisson(mean: float, rng) -> int:
    while True:
        n = poisson_draw(mean, rng)
        if n > 0:
            return n


def gen_scenario(cfg: ScenarioConfig, rng=None) -> LabeledDataset:
    """Generate one labelled Gaussian-mixture benchmark dataset.

    Cluster centers are iid ``N(0, phi^2 I)``. Small and large cluster sizes
    are Poisson with the configured means (zero draws are redrawn) and
    outlier clusters have exactly one point. Points are ``N(mu_r, sigma^2 I)``
    for the k-means model, or ``N(mu_r, U_r D_r U_r^T)`` for the QDA model
    with ``U_r`` Haar-orthogonal and ``D_r`` iid ``Uniform(0, eig_upper)``.
    Rows are shuffled before returning.
    """
    rng = make_rng(rng)
    k, p = cfg.k, cfg.p
    means = rng.normal(0.0, cfg.phi, size=(k, p))
    sizes = [_positive_poisson(cfg.small_mean, rng) for _ in range(cfg.n_small_clusters)]
    sizes += [_positive_poisson(cfg.large_mean, rng) for _ in range(cfg.n_large_clusters)]
    if cfg.outliers:
        sizes += [1] * cfg.n_outliers
    covs = np.empty((k, p, p))
    blocks = []
    for r, nr in enumerate(sizes):
        if cfg.model is ScenarioModel.KMEANS:
            factor = cfg.sigma * np.eye(p)
            covs[r] = cfg.sigma**2 * np.eye(p)
        else:
            u = random_orthogonal(p, rng)
            eig = rng.uniform(0.0, cfg.eig_upper, size=p)
            factor = u * np.sqrt(eig)[None, :]
            covs[r] = (u * eig[None, :]) @ u.T
        blocks.append(sample_mvn(means[r], factor, nr, rng))
    data = np.vstack(blocks)
    truth = np.repeat(np.arange(k), sizes)
    perm = rng.permutation(data.shape[0])
    return LabeledDataset(
        data=data[perm],
        truth=truth[perm],
        true_means=means,
        true_covariances=covs,
        meta={"sizes": sizes, "model": cfg.model.value, "phi": cfg.phi},
    )


def min_center_separation(means) -> float:
    """Smallest pairwise distance between cluster centers."""
    m = np.asarray(means, dtype=np.float64)
    d = np.sqrt(((m[:, None, :] - m[None, :, :]) ** 2).sum(-1))
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def random_stamps(base, base_truth, m: int, scale: float = 10.0, rng=None,
                  spread: str = "sd") -> LabeledDataset:
    """Replicate a labelled base pattern ``m`` times under random translations.

    Shift vectors are iid normal with standard deviation ``scale * s_j`` in
    feature ``j``, where ``s_j`` is the sample standard deviation of that
    feature in the base. ``spread="variance"`` uses ``scale * s_j`` as the
    variance instead, which leaves neighbouring copies overlapping. Copy
    ``v`` keeps the base labels offset by ``v * k_base``.
    """
    if spread not in ("variance", "sd"):
        raise UsageError(f"spread must be 'variance' or 'sd', got {spread!r}")
    if m < 1:
        raise UsageError(f"m must be >= 1, got {m}")
    if not scale > 0:
        raise UsageError("scale must be positive")
    x = as_data_matrix(base)
    _, t = np.unique(as_labels(base_truth, n=x.shape[0]), return_inverse=True)
    k_base = int(t.max()) + 1
    rng = make_rng(rng)
    sd = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.zeros(x.shape[1])
    shift_sd = np.sqrt(scale * sd) if spread == "variance" else scale * sd
    shifts = rng.standard_normal((m, x.shape[1])) * shift_sd[None, :]
    data = np.vstack([x + shifts[v] for v in range(m)])
    truth = np.concatenate([t + v * k_base for v in range(m)])
    return LabeledDataset(data=data, truth=truth, meta={"m": m, "k_base": k_base, "shifts": shifts})


def write_dataset_csv(ds: LabeledDataset, path, feature_names=None) -> None:
    """Features then a ``truth`` column (1-based), shortest round-trip floats."""
    p = ds.data.shape[1]
    names = list(feature_names) if feature_names else [f"x{j + 1}" for j in range(p)]
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["truth"])
        for row, lab in zip(ds.data, ds.truth):
            w.writerow([repr(float(v)) for v in row] + [int(lab) + 1])
