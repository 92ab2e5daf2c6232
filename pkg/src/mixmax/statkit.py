"""Quick empirical randomness checks over generator output.

These are smoke tests, not a replacement for a full battery such as
TestU01's BigCrush.  Every test is two-sided: a p-value above ``high`` is
flagged as a too-perfect fit just as one below ``low`` is a poor fit.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

FAIL_LOW = 0.001
FAIL_HIGH = 0.999


class InsufficientDraws(ValueError):
    pass


@dataclass
class TestResult:
    __test__ = False  # not a pytest class

    name: str
    statistic: float
    p_value: float
    passed: bool
    exempt: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _verdict(name, statistic, p, low, high, exempt=False) -> TestResult:
    return TestResult(name, float(statistic), float(p), bool(exempt or low <= p <= high), exempt)


def draw(stream, n: int) -> np.ndarray:
    """n floats in [0, 1) from a generator state (anything with ``units``) or an array."""
    if hasattr(stream, "units"):
        return stream.units(n)
    x = np.asarray(stream, dtype=np.float64)
    if x.size < n:
        raise InsufficientDraws(f"stream holds {x.size} values, {n} requested")
    return x[:n]


def chisq_uniform(stream, n_draws: int, bins: int = 1000,
                  low: float = FAIL_LOW, high: float = FAIL_HIGH) -> TestResult:
    if n_draws < 10 * bins:
        raise InsufficientDraws(f"need at least {10 * bins} draws for {bins} bins")
    x = draw(stream, n_draws)
    idx = np.minimum((x * bins).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    expected = n_draws / bins
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    return _verdict("chisq_uniform", chi2, stats.chi2.sf(chi2, bins - 1), low, high)


def serial_pairs(stream, n_draws: int, grid: int = 32,
                 low: float = FAIL_LOW, high: float = FAIL_HIGH) -> TestResult:
    """Chi-square over non-overlapping pairs (x_2k, x_2k+1) on a grid x grid lattice."""
    if n_draws % 2:
        raise ValueError("n_draws must be even")
    cells = grid * grid
    if n_draws // 2 < 10 * cells:
        raise InsufficientDraws(f"need at least {20 * cells} draws for a {grid}x{grid} grid")
    x = draw(stream, n_draws)
    i = np.minimum((x[0::2] * grid).astype(np.int64), grid - 1)
    j = np.minimum((x[1::2] * grid).astype(np.int64), grid - 1)
    counts = np.bincount(i * grid + j, minlength=cells)
    expected = (n_draws // 2) / cells
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    return _verdict("serial_pairs", chi2, stats.chi2.sf(chi2, cells - 1), low, high)


def autocorrelation(stream, n_draws: int, lags=range(1, 65),
                    low: float = FAIL_LOW, high: float = FAIL_HIGH) -> list[TestResult]:
    """Sample autocorrelation per lag; under independence rho ~ N(0, 1/n)."""
    lags = list(lags)
    if lags and max(lags) >= n_draws // 2:
        raise InsufficientDraws("maximum lag must be well below n_draws")
    x = draw(stream, n_draws)
    c = x - x.mean()
    denom = float(np.dot(c, c))
    out = []
    for lag in lags:
        rho = float(np.dot(c[:n_draws - lag], c[lag:])) / denom
        if lag == 0:
            out.append(_verdict("autocorrelation[0]", rho, 1.0, low, high, exempt=True))
            continue
        z = rho * np.sqrt(n_draws)
        out.append(_verdict(f"autocorrelation[{lag}]", rho, 2 * stats.norm.sf(abs(z)), low, high))
    return out


def results_json(results: list[TestResult]) -> str:
    return json.dumps({"schema": "mixmax.stats/1",
                       "results": [r.to_dict() for r in results],
                       "all_passed": all(r.passed for r in results)}, indent=2)
