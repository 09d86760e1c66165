"""EM fitting of Gaussian mixtures, entirely in log space.

Two covariance models are supported: one shared spherical variance
(``sigma^2 I`` for every component, the k-means model) and an unrestricted
covariance per component (the QDA model).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp

from .core import (
    InfeasibleError,
    NumericError,
    UsageError,
    as_data_matrix,
    make_rng,
)
from .initialization import InitStrategy, initialize

LOG_2PI = np.log(2.0 * np.pi)


class CovarianceModel(str, enum.Enum):
    SPHERICAL_SHARED = "spherical_shared"
    FULL = "full"


class DegenerateComponentError(NumericError):
    """A component lost (numerically) all of its responsibility mass."""


@dataclass
class GmmParams:
    weights: np.ndarray
    means: np.ndarray
    # scalar variance for SPHERICAL_SHARED, (k, p, p) array for FULL
    covariances: float | np.ndarray
    model: CovarianceModel

    @property
    def k(self) -> int:
        return self.means.shape[0]

    def component_cov(self, r: int) -> np.ndarray:
        p = self.means.shape[1]
        if self.model is CovarianceModel.SPHERICAL_SHARED:
            return float(self.covariances) * np.eye(p)
        return self.covariances[r]


@dataclass(frozen=True)
class EmConfig:
    max_iter: int = 500
    rel_tol: float = 1e-8
    reg_rel: float = 1e-6
    reg_floor: float = 1e-12
    min_weight_sum: float = 1e-12


@dataclass
class GmmFit:
    params: GmmParams
    responsibilities: np.ndarray
    labels: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    ll_history: list[float] = field(default_factory=list)


def _chol(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise NumericError("covariance is not positive definite") from exc


def gaussian_logpdf(x, mu, cov) -> float | np.ndarray:
    """Log density of ``N(mu, cov)`` at ``x``.

    ``cov`` may be a scalar variance (isotropic) or a ``(p, p)`` matrix. ``x``
    may be a single vector or an ``(n, p)`` array, in which case an array of
    ``n`` values is returned.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xs = np.atleast_2d(x)
    mu = np.asarray(mu, dtype=np.float64).ravel()
    p = mu.shape[0]
    if xs.shape[1] != p:
        raise UsageError(f"dimension mismatch: {xs.shape[1]} vs {p}")
    out = _component_logpdf(xs, mu, cov)
    return float(out[0]) if single else out


def _component_logpdf(x: np.ndarray, mu: np.ndarray, cov) -> np.ndarray:
    p = mu.shape[0]
    diff = x - mu
    if np.ndim(cov) == 0:
        var = float(cov)
        if not var > 0:
            raise NumericError("variance must be positive")
        maha = np.einsum("ij,ij->i", diff, diff) / var
        logdet = p * np.log(var)
    else:
        chol = _chol(np.asarray(cov, dtype=np.float64))
        z = solve_triangular(chol, diff.T, lower=True, check_finite=False)
        maha = np.einsum("ij,ij->j", z, z)
        logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    return -0.5 * (p * LOG_2PI + logdet + maha)


def _weighted_log_densities(x: np.ndarray, params: GmmParams) -> np.ndarray:
    """``(n, k)`` matrix of ``log pi_r + log phi(x_i | mu_r, Sigma_r)``."""
    cols = []
    for r in range(params.k):
        cov = params.covariances if params.model is CovarianceModel.SPHERICAL_SHARED else params.covariances[r]
        cols.append(_component_logpdf(x, params.means[r], cov))
    with np.errstate(divide="ignore"):
        return np.column_stack(cols) + np.log(params.weights)[None, :]


def _e_step_with_ll(x: np.ndarray, params: GmmParams) -> tuple[np.ndarray, float]:
    logw = _weighted_log_densities(x, params)
    norm = logsumexp(logw, axis=1, keepdims=True)
    return np.exp(logw - norm), float(norm.sum())


def e_step(data, params: GmmParams) -> np.ndarray:
    """Posterior membership probabilities, normalized with log-sum-exp."""
    resp, _ = _e_step_with_ll(as_data_matrix(data), params)
    return resp


def log_likelihood(data, params: GmmParams) -> float:
    """Observed-data log-likelihood ``sum_i log sum_r pi_r phi(x_i)``."""
    return _e_step_with_ll(as_data_matrix(data), params)[1]


def _regularize(value, p, cfg: EmConfig):
    if np.ndim(value) == 0:
        return float(value) + max(cfg.reg_rel * float(value), cfg.reg_floor)
    eps = max(cfg.reg_rel * np.trace(value) / p, cfg.reg_floor)
    return value + eps * np.eye(p)


def m_step(data, resp, model: CovarianceModel | str = CovarianceModel.FULL,
           cfg: EmConfig | None = None) -> GmmParams:
    """Maximize the expected complete-data log-likelihood.

    Weights are the mean responsibilities, means the responsibility-weighted
    averages, and covariances the weighted outer-product scatter about the
    new means, followed by a small ridge ``eps * I`` with
    ``eps = reg_rel * trace / p`` (floored at ``reg_floor``).
    """
    cfg = cfg or EmConfig()
    x = as_data_matrix(data)
    model = CovarianceModel(model)
    resp = np.asarray(resp, dtype=np.float64)
    n, p = x.shape
    if resp.ndim != 2 or resp.shape[0] != n:
        raise UsageError(f"responsibilities shape {resp.shape} does not match {n} rows")
    nk = resp.sum(axis=0)
    bad = np.flatnonzero(nk < cfg.min_weight_sum)
    if bad.size:
        raise DegenerateComponentError(f"components {bad.tolist()} have no responsibility mass")
    k = resp.shape[1]
    weights = nk / n
    weights = weights / weights.sum()
    means = (resp.T @ x) / nk[:, None]
    if model is CovarianceModel.SPHERICAL_SHARED:
        total = 0.0
        for r in range(k):
            diff = x - means[r]
            total += float(resp[:, r] @ np.einsum("ij,ij->i", diff, diff))
        return GmmParams(weights, means, _regularize(total / (n * p), p, cfg), model)
    covs = np.empty((k, p, p))
    for r in range(k):
        diff = x - means[r]
        s = (resp[:, r, None] * diff).T @ diff / nk[r]
        covs[r] = _regularize(0.5 * (s + s.T), p, cfg)
    return GmmParams(weights, means, covs, model)


def hard_partition(resp) -> np.ndarray:
    """Row-wise argmax of the responsibilities; ties go to the lowest index."""
    resp = np.asarray(resp, dtype=np.float64)
    if resp.ndim != 2:
        raise UsageError("responsibilities must be 2-d")
    return np.argmax(resp, axis=1)


def initial_params(x: np.ndarray, k: int, model: CovarianceModel, rng,
                   strategy: InitStrategy | str = InitStrategy.MAXMIN) -> GmmParams:
    """Seeded means, uniform weights, pooled variance times I."""
    n, p = x.shape
    means = initialize(strategy, x, k, rng)
    pooled = float(np.mean(np.var(x, axis=0)))
    if not pooled > 0:
        pooled = 1.0
    weights = np.full(k, 1.0 / k)
    if model is CovarianceModel.SPHERICAL_SHARED:
        return GmmParams(weights, means, pooled, model)
    return GmmParams(weights, means, np.repeat(pooled * np.eye(p)[None], k, axis=0), model)


def _run_em(x, params, cfg, history, resp_check=None):
    resp, ll = _e_step_with_ll(x, params)
    history.append(ll)
    for it in range(1, cfg.max_iter + 1):
        if resp_check is not None:
            resp_check(resp)
        params = m_step(x, resp, params.model, cfg)
        resp, new_ll = _e_step_with_ll(x, params)
        history.append(new_ll)
        if not np.isfinite(new_ll):
            raise NumericError("log-likelihood is not finite")
        if abs(new_ll - ll) <= cfg.rel_tol * abs(ll):
            return params, resp, it, True
        ll = new_ll
    return params, resp, cfg.max_iter, False


def fit_em(data, k: int, model: CovarianceModel | str = CovarianceModel.FULL, rng=None,
           cfg: EmConfig | None = None, init: GmmParams | None = None,
           resp_check=None, strategy: InitStrategy | str = InitStrategy.MAXMIN) -> GmmFit:
    """Fit a k-component mixture by EM.

    Stops when the relative log-likelihood change drops below ``cfg.rel_tol``
    or after ``cfg.max_iter`` iterations. A degenerate component triggers one
    retry from a fresh initialization; a second failure propagates.

    ``resp_check`` is called with the responsibilities before every M-step
    (used by tests to audit intermediate iterates).
    """
    x = as_data_matrix(data)
    model = CovarianceModel(model)
    cfg = cfg or EmConfig()
    if not 1 <= k <= x.shape[0]:
        raise InfeasibleError(f"k={k} is not in 1..{x.shape[0]}")
    rng = make_rng(rng)
    attempts = 1 if init is not None else 2
    for attempt in range(attempts):
        params = init if init is not None else initial_params(x, k, model, rng, strategy)
        history: list[float] = []
        try:
            params, resp, iters, converged = _run_em(x, params, cfg, history, resp_check)
            break
        except (DegenerateComponentError, NumericError):
            if attempt == attempts - 1:
                raise
    return GmmFit(
        params=params,
        responsibilities=resp,
        labels=hard_partition(resp),
        log_likelihood=history[-1],
        iterations=iters,
        converged=converged,
        ll_history=history,
    )

