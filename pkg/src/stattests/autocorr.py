import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence

import numpy as np

from src.common.errors import ContractError
from src.common.logging import logger


@dataclass(frozen=True)
class AutocorrReport:
    """
    Autocorrelation coefficients for lags 0..max_lag.

    Attributes:
        lags (List[int]): 0..max_lag.
        coefficients (List[float]): normalised coefficient per lag; index 0 is exactly 1.
        mean_coefficient (float): mean over lags >= 1.
        theoretical_std (float): 1 / sqrt(N) for an i.i.d. series of length N.
        length (int): N.
    """

    lags: List[int]
    coefficients: List[float]
    mean_coefficient: float
    theoretical_std: float
    length: int

    def within_bound(self, sigmas: float = 3.0) -> bool:
        """|mean coefficient| <= sigmas / sqrt(N)."""
        return abs(self.mean_coefficient) <= sigmas * self.theoretical_std

    def to_dict(self) -> Dict[str, Any]:
        return {
            "length": self.length,
            "mean_coefficient": self.mean_coefficient,
            "theoretical_std": self.theoretical_std,
            "max_abs_coefficient": max((abs(c) for c in self.coefficients[1:]), default=0.0),
            "lags": self.lags,
            "coefficients": self.coefficients,
        }


def autocorrelation(series: Sequence[float], max_lag: int) -> AutocorrReport:
    """
    Normalised coefficient cov(x_t, x_{t+l}) / var(x) for l = 0..max_lag.

    Works on bits (0/1) or on sample values alike. The series is centred once by its
    global mean; each lag averages over its N - l overlapping pairs.
    """
    x = np.asarray(series, dtype=np.float64).ravel()
    n = x.size
    if max_lag < 1:
        raise ContractError(f"max_lag must be >= 1, got {max_lag}")
    if n <= max_lag:
        raise ContractError(f"series of length {n} is too short for max_lag={max_lag}")
    centred = x - x.mean()
    variance = float(np.dot(centred, centred)) / n
    if variance == 0.0:
        raise ContractError("zero variance: autocorrelation of a constant series is undefined")

    coefficients = [1.0]
    for lag in range(1, max_lag + 1):
        cov = float(np.dot(centred[:-lag], centred[lag:])) / (n - lag)
        coefficients.append(float(np.clip(cov / variance, -1.0, 1.0)))
    mean = float(np.mean(coefficients[1:]))
    report = AutocorrReport(
        lags=list(range(max_lag + 1)),
        coefficients=coefficients,
        mean_coefficient=mean,
        theoretical_std=1.0 / math.sqrt(n),
        length=n,
    )
    logger.info(
        f"Autocorrelation over {n} values, lags 1..{max_lag}: mean={mean:.3e}, 1/sqrt(N)={report.theoretical_std:.3e}"
    )
    return report
