"""Correlation, Gaussian fitting and the bit-disagreement probability.

Two zero-mean jointly Gaussian values with correlation ``rho`` disagree in
sign with probability ``arctan(sqrt(1 - rho**2) / rho) / pi``.
:func:`pe_monte_carlo` estimates the same quantity by direct sampling and is
kept deliberately independent of the closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import ContractViolation, DegenerateInputError


@dataclass(frozen=True)
class GaussianFit:
    mean: float
    variance: float


@dataclass(frozen=True)
class GaussianFitResult:
    fit: GaussianFit
    ks_statistic: float | None
    ks_pvalue: float | None
    degenerate: bool
    level: float = 0.01

    @property
    def passed(self) -> bool:
        return not self.degenerate and self.ks_pvalue >= self.level


@dataclass(frozen=True)
class CorrelationEstimate:
    coefficient: float
    sample_count: int


@dataclass(frozen=True)
class MonteCarloEstimate:
    probability: float
    standard_error: float
    n_samples: int


def pearson_correlation(xs, ys) -> CorrelationEstimate:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ContractViolation("xs and ys must be 1-D sequences of equal length")
    if x.size < 2:
        raise ContractViolation("at least two samples are required")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("correlation is undefined for a constant sequence")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return CorrelationEstimate(min(1.0, max(-1.0, r)), int(x.size))


def pe_closed_form(rho: float) -> float:
    """Sign-disagreement probability for correlation ``rho`` in ``(0, 1]``."""
    if not 0.0 < rho <= 1.0:
        raise ContractViolation(f"rho must lie in (0, 1], got {rho}; use pe_reflected for rho <= 0")
    return math.atan(math.sqrt(1.0 - rho * rho) / rho) / math.pi


def pe_reflected(rho: float) -> float:
    """Disagreement probability on ``[-1, 1]`` via ``p_e(rho) = 1 - p_e(-rho)``."""
    if not -1.0 <= rho <= 1.0:
        raise ContractViolation(f"rho must lie in [-1, 1], got {rho}")
    if rho > 0:
        return pe_closed_form(rho)
    if rho == 0:
        return 0.5
    return 1.0 - pe_closed_form(-rho)


def pe_monte_carlo(rho: float, n_samples: int, rng: np.random.Generator,
                   chunk: int = 1 << 20) -> MonteCarloEstimate:
    """Fraction of opposite-sign pairs ``(g1, rho*g1 + sqrt(1-rho^2)*g2)``."""
    if not -1.0 <= rho <= 1.0:
        raise ContractViolation(f"rho must lie in [-1, 1], got {rho}")
    if n_samples < 10_000:
        raise ContractViolation(f"n_samples must be at least 1e4, got {n_samples}")
    c = math.sqrt(1.0 - rho * rho)
    disagree = 0
    left = n_samples
    while left:
        m = min(chunk, left)
        g1 = rng.standard_normal(m)
        g2 = rho * g1 + c * rng.standard_normal(m)
        disagree += int(np.count_nonzero((g1 >= 0) != (g2 >= 0)))
        left -= m
    p = disagree / n_samples
    return MonteCarloEstimate(p, math.sqrt(p * (1.0 - p) / n_samples), n_samples)


def gaussian_fit(samples, level: float = 0.01) -> GaussianFitResult:
    """Moment-matched Gaussian plus the KS distance against it."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 100:
        raise ContractViolation(f"at least 100 samples are required, got {x.size}")
    mean, var = float(x.mean()), float(x.var())
    fit = GaussianFit(mean, var)
    if var <= 0.0:
        return GaussianFitResult(fit, None, None, True, level)
    res = sps.kstest(x, sps.norm(mean, math.sqrt(var)).cdf)
    return GaussianFitResult(fit, float(res.statistic), float(res.pvalue), False, level)
