"""Information-theoretic accounting for the key agreement.

Privacy amplification to ``ell`` bits leaks at most
``2**-(n0 - ell - t - r) / ln 2`` bits of Shannon information, where ``t``
is the eavesdropper's Renyi (collision) information and ``r`` the number of
public check bits. The check-bit decoding error is bounded with the
modified Gallager random-coding exponent

    E(R_C) = max_{0 < rho0 < 1} [E0(rho0) - rho0 * (2*R_C - 1) / R_C]
    E0(rho0) = rho0 - (1 + rho0) * log2(p**(1/(1+rho0)) + (1-p)**(1/(1+rho0)))

with ``R_C = n0 / (n0 + r)``, giving ``P_ed <= 2**(-n0 * E(R_C))``. The
inner term is a function of ``rho0`` (some write it as ``E0(R)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, InfeasibleError

LN2 = math.log(2.0)

# rho0 grid for the exponent: step 1e-4 strictly inside (0, 1)
_RHO_GRID = np.arange(1, 10_000) * 1e-4


@dataclass(frozen=True)
class SecurityBudget:
    n0: int
    ell: int
    renyi_t: float
    check_bits: int
    code_rate: float
    exponent: float
    leakage_bound: float
    decoding_bound: float

    @property
    def margin(self) -> float:
        """``n0 - ell - t - r``, the exponent of the leakage bound."""
        return self.n0 - self.ell - self.renyi_t - self.check_bits


@dataclass(frozen=True)
class DiversityConfig:
    antenna_count: int = 1

    def __post_init__(self):
        if int(self.antenna_count) != self.antenna_count or self.antenna_count < 1:
            raise ContractViolation(f"antenna_count must be an integer >= 1, got {self.antenna_count}")


def collision_entropy_rate(pe: float) -> float:
    """``-log2(pe**2 + (1-pe)**2)``: eavesdropper uncertainty per bit."""
    return -math.log2(pe * pe + (1.0 - pe) * (1.0 - pe))


def renyi_information(n: float, pe: float, diversity_m: int = 1) -> float:
    """``n + (n/m) * log2(pe**2 + (1-pe)**2)``; ``m = 1`` is the single-antenna case."""
    if not 0.0 <= pe <= 1.0:
        raise ContractViolation(f"pe must lie in [0, 1], got {pe}")
    if n < 0:
        raise ContractViolation(f"n must be nonnegative, got {n}")
    if diversity_m < 1:
        raise ContractViolation(f"diversity_m must be >= 1, got {diversity_m}")
    return n + (n / diversity_m) * math.log2(pe * pe + (1.0 - pe) * (1.0 - pe))


def pa_leakage_bound(n0: float, ell: float, t: float, r: float = 0) -> float:
    """Upper bound ``2**-(n0 - ell - t - r) / ln 2`` on the leaked information."""
    x = -(n0 - ell - t - r)
    return math.inf if x > 1000 else 2.0**x / LN2


def required_margin(leakage_target: float) -> float:
    """Smallest ``n0 - ell - t - r`` meeting ``leakage_target``."""
    return math.log2(1.0 / (leakage_target * LN2))


def _e0(rho0, p: float):
    rho0 = np.asarray(rho0, dtype=float)
    s = 1.0 / (1.0 + rho0)
    # p**s with 0**s = 0 for s > 0
    inner = np.where(p > 0, np.power(max(p, 1e-300), s), 0.0) + np.where(p < 1, np.power(max(1.0 - p, 1e-300), s), 0.0)
    return rho0 - (1.0 + rho0) * np.log2(inner)


def gallager_E0(rho0: float, p: float) -> float:
    if not 0.0 < rho0 < 1.0:
        raise ContractViolation(f"rho0 must lie in (0, 1), got {rho0}")
    if not 0.0 <= p <= 1.0:
        raise ContractViolation(f"p must lie in [0, 1], got {p}")
    return float(_e0(rho0, p))


def gallager_exponent(code_rate: float, p: float) -> float:
    """``E(R_C)``: grid maximum over ``rho0`` refined by ternary search, clamped at 0."""
    if not 0.0 < code_rate <= 1.0:
        raise ContractViolation(f"code_rate must lie in (0, 1], got {code_rate}")
    if not 0.0 <= p <= 1.0:
        raise ContractViolation(f"p must lie in [0, 1], got {p}")
    penalty = (2.0 * code_rate - 1.0) / code_rate

    def g(x):
        return _e0(x, p) - x * penalty

    vals = g(_RHO_GRID)
    i = int(np.argmax(vals))
    best = float(vals[i])
    # g is concave in rho0, so the maximum lies between the grid neighbours
    lo = _RHO_GRID[i - 1] if i > 0 else _RHO_GRID[0]
    hi = _RHO_GRID[i + 1] if i + 1 < _RHO_GRID.size else _RHO_GRID[-1]
    for _ in range(60):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if g(m1) < g(m2):
            lo = m1
        else:
            hi = m2
    best = max(best, float(g(0.5 * (lo + hi))))
    return max(best, 0.0)


def decoding_error_bound(n0: int, r: int, p: float) -> float:
    """``min(1, 2**(-n0 * E(R_C)))``; an error-free channel (``p = 0``) never fails."""
    if n0 < 1:
        raise ContractViolation(f"n0 must be >= 1, got {n0}")
    if r < 0:
        raise ContractViolation(f"r must be >= 0, got {r}")
    if p == 0.0:
        return 0.0
    e = gallager_exponent(n0 / (n0 + r), p)
    return min(1.0, 2.0 ** (-n0 * e))


def min_check_bits(n0: int, p: float, target_ped: float, max_factor: int = 20) -> int:
    """Smallest ``r`` with ``decoding_error_bound(n0, r, p) <= target_ped``.

    Binary search over ``0 <= r <= max_factor * n0``; the bound is
    non-increasing in ``r``.
    """
    if not 0.0 < target_ped < 1.0:
        raise ContractViolation(f"target_ped must lie in (0, 1), got {target_ped}")
    if not 0.0 <= p < 0.5:
        raise ContractViolation(f"p must lie in [0, 0.5), got {p}")
    if decoding_error_bound(n0, 0, p) <= target_ped:
        return 0
    hi = max_factor * n0
    if decoding_error_bound(n0, hi, p) > target_ped:
        raise InfeasibleError(f"no r <= {hi} reaches P_ed <= {target_ped} at n0={n0}, p={p}")
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if decoding_error_bound(n0, mid, p) <= target_ped:
            hi = mid
        else:
            lo = mid
    return hi


def security_budget(n0: int, ell: int, pe: float, p_legal: float, ped_target: float,
                    diversity_m: int = 1, check_bits: int | None = None) -> SecurityBudget:
    """Full budget at ``n0`` kept bits; ``t`` is computed over the kept bits."""
    t = renyi_information(n0, pe, diversity_m)
    r = min_check_bits(n0, p_legal, ped_target) if check_bits is None else int(check_bits)
    rate = n0 / (n0 + r)
    exponent = gallager_exponent(rate, p_legal)
    return SecurityBudget(n0, ell, t, r, rate, exponent, pa_leakage_bound(n0, ell, t, r),
                          decoding_error_bound(n0, r, p_legal))
