"""Persistent-homology regression regularizers (C++ core)."""

import json as _json

from ._phreg import (  # noqa: F401
    DegenerateInput,
    IngestionError,
    InvalidInput,
    generate,
    loss_ld,
    loss_ld_prime,
    loss_lt,
    ls_slope,
    mst,
    pairwise_distances,
    ph0,
    ph_dim_birdal,
    total_persistence,
    twonn,
)
from ._phreg import run_experiment as _run_experiment


def run_experiment(dataset, variant, epochs, seeds=(0,), lambda_d=None, lambda_t=None, n_m=None):
    """Train over seeds; returns the metrics report as a dict."""
    return _json.loads(_run_experiment(dataset, variant, epochs, list(seeds), lambda_d, lambda_t, n_m))
