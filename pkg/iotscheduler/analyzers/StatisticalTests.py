"""
StatisticalTests.py

Two-sample comparisons of indicator distributions across algorithms.
"""

from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import mannwhitneyu

from iotscheduler.core.Exceptions import IndicatorError

ALPHA = 0.05


class MannWhitneyResult(NamedTuple):
    u: float
    p_value: float
    alpha: float = ALPHA

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha


def _sample(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise IndicatorError(f"sample {name} is empty")
    return arr


def mann_whitney_u(a: Sequence[float], b: Sequence[float], alpha: float = ALPHA) -> MannWhitneyResult:
    """
    U statistic of `a` and the two-sided p-value from the normal
    approximation with tie correction. If every pooled value is identical the
    samples are indistinguishable: U = n_a·n_b/2, p = 1.
    """
    x, y = _sample(a, "a"), _sample(b, "b")
    if np.all(np.concatenate([x, y]) == x[0]):
        return MannWhitneyResult(u=x.size * y.size / 2.0, p_value=1.0, alpha=alpha)
    res = mannwhitneyu(x, y, alternative="two-sided", method="asymptotic")
    return MannWhitneyResult(u=float(res.statistic), p_value=float(res.pvalue), alpha=alpha)


def vargha_delaney_a12(a: Sequence[float], b: Sequence[float]) -> float:
    """P(a > b) + 0.5·P(a = b) over all pairs."""
    x, y = _sample(a, "a"), _sample(b, "b")
    greater = (x[:, None] > y[None, :]).sum()
    ties = (x[:, None] == y[None, :]).sum()
    return float((greater + 0.5 * ties) / (x.size * y.size))


def effect_magnitude(a12: float) -> str:
    """Conventional thresholds on |Â12 - 0.5|."""
    d = abs(a12 - 0.5)
    if d < 0.06:
        return "negligible"
    if d < 0.14:
        return "small"
    if d < 0.21:
        return "medium"
    return "large"
