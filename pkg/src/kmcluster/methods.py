"""The ten benchmark methods, addressable by a short string id.

``proposed`` is max-min seeding followed by Lloyd iterations. ``hw``,
``lloyd``, ``forgy`` and ``macqueen`` use uniformly random seeds; the
``*_pp`` versions use k-means++ seeding. ``em_gmm`` is a full-covariance
Gaussian mixture fitted by EM from k-means++ seeded means.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import em_gmm, kmeans
from .core import as_data_matrix, make_rng
from .initialization import InitStrategy
from .kmeans import FitResult, KmeansConfig, KmeansVariant

METHOD_IDS = (
    "proposed",
    "hw",
    "lloyd",
    "forgy",
    "macqueen",
    "hw_pp",
    "lloyd_pp",
    "forgy_pp",
    "macqueen_pp",
    "em_gmm",
)

_VARIANTS = {
    "hw": KmeansVariant.HARTIGAN_WONG,
    "lloyd": KmeansVariant.LLOYD,
    "forgy": KmeansVariant.FORGY,
    "macqueen": KmeansVariant.MACQUEEN,
}


@dataclass(frozen=True)
class MethodSpec:
    name: str
    variant: KmeansVariant | None
    strategy: InitStrategy | None

    @property
    def is_em(self) -> bool:
        return self.variant is None


def method_spec(name: str) -> MethodSpec:
    if name not in METHOD_IDS:
        raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHOD_IDS)}")
    if name == "em_gmm":
        return MethodSpec(name, None, None)
    if name == "proposed":
        return MethodSpec(name, KmeansVariant.LLOYD, InitStrategy.MAXMIN)
    if name.endswith("_pp"):
        return MethodSpec(name, _VARIANTS[name[:-3]], InitStrategy.KMEANSPP)
    return MethodSpec(name, _VARIANTS[name], InitStrategy.RANDOM)


def parse_methods(text: str) -> list[str]:
    """Comma separated list of method ids, or ``all``."""
    if text.strip() == "all":
        return list(METHOD_IDS)
    names = [t.strip() for t in text.split(",") if t.strip()]
    for name in names:
        method_spec(name)
    if not names:
        raise ValueError("no methods given")
    return names


def run_method(name: str, data, k: int, rng=None, restarts: int = 1,
               kmeans_cfg: KmeansConfig | None = None,
               em_cfg: em_gmm.EmConfig | None = None) -> FitResult:
    """Cluster ``data`` into ``k`` groups with the named method.

    EM results are reported as a :class:`FitResult` whose centroids are the
    fitted component means and whose ``ssq`` is measured against them.
    ``restarts`` > 1 keeps the lowest-SSQ run and only applies to the
    randomly seeded k-means methods.
    """
    spec = method_spec(name)
    x = as_data_matrix(data)
    rng = make_rng(rng)
    if spec.is_em:
        g = em_gmm.fit_em(x, k, em_gmm.CovarianceModel.FULL, rng, em_cfg,
                          strategy=InitStrategy.KMEANSPP)
        return FitResult(
            labels=g.labels,
            centroids=g.params.means,
            ssq=kmeans.ssq_of(x, g.labels, g.params.means),
            iterations=g.iterations,
            converged=g.converged,
            history=list(g.ll_history),
        )
    runs = max(1, restarts) if spec.strategy is not InitStrategy.MAXMIN else 1
    best = None
    for _ in range(runs):
        res = kmeans.fit(x, k, spec.variant, spec.strategy, rng, kmeans_cfg)
        if best is None or res.ssq < best.ssq:
            best = res
    return best


def fitted_clusters(name: str, data, k: int, rng=None) -> tuple[np.ndarray, np.ndarray]:
    res = run_method(name, data, k, rng)
    return res.labels, res.centroids
