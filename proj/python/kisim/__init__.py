"""Kicked Ising chain simulator: correlations, fidelity decay, and decay theory.

Thin convenience layer over the compiled ``kisim._core`` extension. Functions
that the core reports as JSON are re-exposed here returning plain dicts.
"""

from __future__ import annotations

import json
from typing import Any, Dict, Optional

from ._core import (  # noqa: F401
    Params,
    TimeSeries,
    __version__,
    correlation_series,
    d_sigma_x,
    delta_from_prime,
    fidelity_quadratic,
    fidelity_series,
    oracle_check,
    perturbative_threshold,
    read_timeseries_csv,
    tau_ergodic,
    tau_nonergodic,
    write_timeseries_csv,
)
from . import _core

__all__ = [
    "Params",
    "TimeSeries",
    "__version__",
    "correlation_series",
    "d_sigma_x",
    "delta_from_prime",
    "estimate_statistics",
    "fidelity_quadratic",
    "fidelity_series",
    "fit_decay",
    "oracle_check",
    "perturbative_threshold",
    "read_timeseries_csv",
    "series_meta",
    "tau_ergodic",
    "tau_nonergodic",
    "theory_report",
    "write_timeseries_csv",
]


def series_meta(series: TimeSeries) -> Dict[str, Any]:
    """Run metadata recorded with a time series."""
    return json.loads(series.meta_json)


def estimate_statistics(series: TimeSeries) -> Dict[str, Any]:
    """Plateau/decay statistics {S_A, D_A, t_mix, t_ave, regime, ...}."""
    return json.loads(_core.estimate_statistics_json(series))


def fit_decay(series: TimeSeries, L: int) -> Dict[str, Any]:
    """Exponential-vs-gaussian decay fit of |F(t)| inside the resolvable window."""
    return json.loads(_core.fit_decay_json(series, L))


def theory_report(
    params: Params,
    L: int,
    delta_prime: float,
    S_A: Optional[float] = None,
    c_A: Optional[float] = None,
) -> Dict[str, Any]:
    """Analytic decay predictions for the given parameters."""
    return json.loads(_core.theory_report_json(params, L, delta_prime, S_A, c_A))
