"""Shared fixtures.

The workhorse configurations (the four unknot-regime branch orders in both
perturbation regimes, and the four torus-knot cases) are traced once per
session and cached together with their wall-clock time, so the acceptance
tests can assert runtime budgets without re-running anything.
"""

import time
from dataclasses import dataclass

import pytest

from branchknot import (
    BranchedDiskModel,
    Monomial,
    PerturbationParams,
    SolverConfig,
)
from branchknot.config import RunConfig
from branchknot.loop import LoopConfig
from branchknot.pipeline import PipelineResult, run_pipeline
from branchknot.trace import TraceConfig

UNKNOT_ORDERS = (2, 3, 4, 5)
TORUS_CASES = ((2, 3), (2, 5), (3, 4), (3, 5))


def make_config(n, terms=(), lam=0.0, mu=0.0, gamma=0.0, **overrides):
    model = BranchedDiskModel(branch_order=n, terms=tuple(terms))
    return RunConfig(
        model=model,
        params=PerturbationParams(lam=lam, mu=mu, gamma=gamma),
        solver=overrides.get("solver", SolverConfig()),
        loop=overrides.get("loop", LoopConfig()),
        trace=overrides.get("trace", TraceConfig()),
    )


def unknot_config(n, regime="lam"):
    lam, mu = (0.1, 0.0) if regime == "lam" else (0.0, 0.1)
    return make_config(n, (), lam=lam, mu=mu)


def torus_config(n, m):
    return make_config(n, (Monomial(1.0, m, 0),), lam=0.1)


@dataclass(frozen=True)
class TimedRun:
    result: PipelineResult
    elapsed: float


_cache: dict = {}


def _run_cached(key, cfg) -> TimedRun:
    if key not in _cache:
        t0 = time.perf_counter()
        result = run_pipeline(cfg)
        _cache[key] = TimedRun(result, time.perf_counter() - t0)
    return _cache[key]


@pytest.fixture(scope="session")
def unknot_run():
    """unknot_run(n, regime) -> TimedRun for h = 0 at branch order n."""

    def get(n, regime="lam"):
        return _run_cached(("unknot", n, regime), unknot_config(n, regime))

    return get


@pytest.fixture(scope="session")
def torus_run():
    """torus_run(n, m) -> TimedRun for h = w^m at branch order n."""

    def get(n, m):
        return _run_cached(("torus", n, m), torus_config(n, m))

    return get


@pytest.fixture(scope="session")
def all_runs(unknot_run, torus_run):
    """Every workhorse run: [(label, TimedRun), ...]."""
    runs = []
    for n in UNKNOT_ORDERS:
        for regime in ("lam", "mu"):
            runs.append((f"unknot N={n} {regime}", unknot_run(n, regime)))
    for n, m in TORUS_CASES:
        runs.append((f"torus ({n},{m})", torus_run(n, m)))
    return runs


@pytest.fixture(scope="session")
def trefoil_run(torus_run):
    return torus_run(2, 3)
