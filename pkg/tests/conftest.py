import itertools

import numpy as np
import pytest

# criterion id -> (passed, detail); filled by test_acceptance, printed at the end
ACCEPTANCE_LINES: dict[str, tuple[str, str]] = {}


def brute_force_assignment_min(cost: np.ndarray) -> float:
    m = cost.shape[0]
    return min(cost[np.arange(m), list(p)].sum() for p in itertools.permutations(range(m)))


def brute_force_matches(truth, est) -> int:
    """Largest one-to-one label agreement by trying every injective map."""
    t_levels = sorted(set(truth))
    e_levels = sorted(set(est))
    best = 0
    pairs = list(zip(truth, est))
    if len(t_levels) <= len(e_levels):
        for img in itertools.permutations(e_levels, len(t_levels)):
            m = dict(zip(t_levels, img))
            best = max(best, sum(m[a] == b for a, b in pairs))
    else:
        for img in itertools.permutations(t_levels, len(e_levels)):
            m = dict(zip(e_levels, img))
            best = max(best, sum(m[b] == a for a, b in pairs))
    return best


def blobs(centers, n_per, sigma, rng):
    centers = np.asarray(centers, dtype=float)
    x = np.vstack([c + sigma * rng.standard_normal((n_per, centers.shape[1])) for c in centers])
    return x, np.repeat(np.arange(centers.shape[0]), n_per)


def pentagon(d: float) -> np.ndarray:
    """Five centers on a regular pentagon with side (minimum distance) ``d``."""
    ang = 2 * np.pi * np.arange(5) / 5
    radius = d / (2 * np.sin(np.pi / 5))
    return radius * np.column_stack([np.cos(ang), np.sin(ang)])


def consistency_sweep(separations, reps=100, n_per=500, seed=2024) -> list[float]:
    """Fraction of max-min + Lloyd runs with zero CER, per center separation (sigma = 1)."""
    from kmcluster.evaluation import cer
    from kmcluster.methods import run_method

    out = []
    for d in separations:
        hits = 0
        for rep in range(reps):
            g = np.random.default_rng([seed, rep])
            x, truth = blobs(pentagon(d), n_per, 1.0, g)
            hits += cer(truth, run_method("proposed", x, 5, g).labels).cer == 0.0
        out.append(hits / reps)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_LINES, key=lambda c: int(c.split(".")[0])):
        status, detail = ACCEPTANCE_LINES[cid]
        terminalreporter.write_line(f"criterion {cid}: {status}  {detail}")
