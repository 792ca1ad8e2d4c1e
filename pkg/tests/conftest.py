"""Shared fixtures.

The expensive n = 400 Monte-Carlo cells are computed once per session
and shared between the estimator tests and the acceptance suite.
"""

import time
from dataclasses import dataclass

import numpy as np
import pytest

from adadenoise import ExperimentConfig, GaussianMixture, SignalSpec, run_trial

GRID_SIGMAS = (0.2, 0.4, 2.0, 3.0, 4.0)
GRID_TRIALS = 50
GRID_N = 400
BASE_SEED = 20181005


@dataclass(frozen=True)
class McGrid:
    cells: dict
    build_seconds: float

    def __getitem__(self, sigma1):
        return self.cells[sigma1]


@pytest.fixture(scope="session")
def mc_grid():
    """50 trials at n = m = 400, rank 1, mixture noise, per sigma1 cell."""
    config = ExperimentConfig(ns=(GRID_N,), ranks=(1,), sigma1_grid=GRID_SIGMAS,
                              trials=GRID_TRIALS, base_seed=BASE_SEED,
                              output="unused.csv")
    model = GaussianMixture(2.0)
    t0 = time.perf_counter()
    cells = {}
    for spec in config.cells():
        params = config.params_for(spec.m, spec.n)
        records = [run_trial(spec, model, params, config.gamma,
                             config.trial_seed(spec, t))
                   for t in range(config.trials)]
        cells[spec.sigmas[0]] = records
    return McGrid(cells=cells, build_seconds=time.perf_counter() - t0)


def cell_mean(records, attr, index=None):
    vals = [getattr(r, attr) for r in records]
    if index is not None:
        vals = [v[index] for v in vals]
    return float(np.mean(vals))
