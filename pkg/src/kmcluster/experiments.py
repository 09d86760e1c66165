"""Monte Carlo harnesses: known-k benchmark, random stamps, and Gap-based k recovery.

Every replication derives its own seeds from ``(seed + rep, method index)``
so replications can run in any order or in parallel; records are sorted by
(method, rep) before being returned.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import KmclusterError, derive_seed, make_rng
from .evaluation import cer, count_singletons
from .methods import METHOD_IDS, run_method
from .model_selection import gap_statistic
from .simgen import ScenarioConfig, gen_scenario, random_stamps

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunRecord:
    method: str
    rep: int
    cer: float
    n_singletons: int
    seconds: float
    m: int = 0
    k_true: int = 0
    k_hat: int = 0


def worker_count(requested: int | None = None) -> int:
    """Workers to use: explicit request, else ``KMCLUSTER_THREADS`` (0 = all cores)."""
    if requested is None:
        try:
            requested = int(os.environ.get("KMCLUSTER_THREADS", "1"))
        except ValueError:
            requested = 1
    if requested <= 0:
        requested = os.cpu_count() or 1
    return max(1, requested)


def _method_seed(base: int, name: str) -> np.random.SeedSequence:
    return derive_seed(base, METHOD_IDS.index(name) + 1)


def _score(name, data, truth, k, seed):
    t0 = time.perf_counter()
    try:
        res = run_method(name, data, k, make_rng(seed))
    except (KmclusterError, np.linalg.LinAlgError) as exc:
        log.warning("%s failed: %s", name, exc)
        return float("nan"), -1, time.perf_counter() - t0
    return cer(truth, res.labels).cer, count_singletons(res.labels), time.perf_counter() - t0


def _simulate_rep(args):
    cfg, rep, methods, seed = args
    ds = gen_scenario(cfg, make_rng(seed + rep))
    out = []
    for name in methods:
        c, s, secs = _score(name, ds.data, ds.truth, ds.k, _method_seed(seed + rep, name))
        out.append(RunRecord(name, rep, c, s, secs, k_true=ds.k))
    return out


def _stamps_rep(args):
    base, truth, m, rep, methods, seed, scale, spread = args
    rep_seed = seed + 1000 * m + rep
    ds = random_stamps(base, truth, m, scale, make_rng(rep_seed), spread)
    out = []
    for name in methods:
        c, s, secs = _score(name, ds.data, ds.truth, ds.k, _method_seed(rep_seed, name))
        out.append(RunRecord(name, rep, c, s, secs, m=m, k_true=ds.k))
    return out


def _gap_rep(args):
    cfg, rep, methods, seed, k_max, b = args
    ds = gen_scenario(cfg, make_rng(seed + rep))
    out = []
    for name in methods:
        t0 = time.perf_counter()
        g = gap_statistic(ds.data, k_max, b, name, make_rng(_method_seed(seed + rep, name)))
        out.append(RunRecord(name, rep, float("nan"), -1, time.perf_counter() - t0,
                             k_true=ds.k, k_hat=g.k_hat))
    return out


def _run(fn, tasks, workers):
    workers = worker_count(workers)
    if workers == 1 or len(tasks) < 2:
        results = [fn(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, tasks))
    records = [r for batch in results for r in batch]
    order = {name: i for i, name in enumerate(METHOD_IDS)}
    return sorted(records, key=lambda r: (order[r.method], r.m, r.rep))


def simulate(cfg: ScenarioConfig, reps: int, methods, seed: int = 0,
             workers: int | None = None) -> list[RunRecord]:
    """Score each method (with the true k) on ``reps`` freshly generated datasets."""
    tasks = [(cfg, rep, list(methods), seed) for rep in range(reps)]
    return _run(_simulate_rep, tasks, workers)


def stamps_study(base, base_truth, m_values, reps: int, methods, seed: int = 0,
                 scale: float = 10.0, workers: int | None = None,
                 spread: str = "sd") -> list[RunRecord]:
    """Random-stamps experiment: for each m, cluster ``reps`` stamped patterns with k = m * k_base."""
    tasks = [(base, base_truth, int(m), rep, list(methods), seed, scale, spread)
             for m in m_values for rep in range(reps)]
    return _run(_stamps_rep, tasks, workers)


def gap_study(cfg: ScenarioConfig, reps: int, methods, k_max: int, b: int, seed: int = 0,
              workers: int | None = None) -> list[RunRecord]:
    """Estimate k by the Gap statistic on ``reps`` generated datasets per method."""
    tasks = [(cfg, rep, list(methods), seed, k_max, b) for rep in range(reps)]
    return _run(_gap_rep, tasks, workers)


def summarize(records: list[RunRecord], by_m: bool = False) -> dict:
    """Mean 100*CER, mean singleton count and failure count per method (and m)."""
    groups: dict = {}
    for r in records:
        groups.setdefault((r.method, r.m) if by_m else r.method, []).append(r)
    out = {}
    for key, rs in groups.items():
        cers = np.array([r.cer for r in rs])
        ok = ~np.isnan(cers)
        out[key] = {
            "reps": len(rs),
            "failed": int((~ok).sum()),
            "mean_cer_pct": float(100.0 * cers[ok].mean()) if ok.any() else float("nan"),
            "mean_singletons": float(np.mean([r.n_singletons for r in rs if r.n_singletons >= 0]))
            if any(r.n_singletons >= 0 for r in rs) else float("nan"),
            "pct_k_correct": float(100.0 * np.mean([r.k_hat == r.k_true for r in rs])),
        }
    return out
