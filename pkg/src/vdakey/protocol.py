"""End-to-end single key agreement on the simulated link.

Planning fixes the selection threshold and the budget once: the optimizer
picks ``alpha`` for method 1, ``n0`` is raised to at least ``min_bits`` so
that the kept-bit stream is long enough for the randomness tests, and the
check-bit count ``r`` is re-sized for that ``n0``. Each run then simulates
fresh intervals, keeps the first ``n0`` reliable positions, reconciles
B's string to A's with ``r`` syndrome bits and hashes both to ``ell`` bits
with a public Toeplitz seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ContractViolation, InfeasibleError
from .functionals import FunctionalKind
from .keygen import RandomnessReport, SelectionKind, bit_randomness_tests, hash_key, select_method1
from .optimizer import OptimizationProblem, OptimizationResult, optimize
from .reconcile import decode_syndrome, parity_check_matrix
from .security import SecurityBudget, security_budget
from .seeding import child_seed
from .sources import PhysicalSource

MIN_TEST_BITS = 1000
_Q_FLOOR = 1e-9


@dataclass(frozen=True)
class ProtocolPlan:
    alpha: float
    budget: SecurityBudget
    erasure_rate: float
    legal_error: float
    eavesdropper_error: float
    optimization: OptimizationResult

    @property
    def n0(self) -> int:
        return self.budget.n0

    @property
    def check_bits(self) -> int:
        return self.budget.check_bits

    @property
    def ell(self) -> int:
        return self.budget.ell


@dataclass
class ProtocolOutcome:
    key_A: np.ndarray
    key_B: np.ndarray
    n_intervals: int
    legal_disagreements: int
    decoder_converged: bool
    reconciled: bool
    randomness: RandomnessReport
    plan: ProtocolPlan

    @property
    def keys_match(self) -> bool:
        return bool(np.array_equal(self.key_A, self.key_B))


def plan_protocol(source: PhysicalSource, ell: int, rng: np.random.Generator,
                  alpha_grid=(0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3), trials: int = 100_000,
                  leakage_target: float = 1e-9, ped_target: float = 1e-5,
                  min_bits: int = MIN_TEST_BITS, n_cap: int = 2_000_000) -> ProtocolPlan:
    """Optimize ``alpha`` and size the per-run budget.

    Raises :class:`InfeasibleError` when no grid point meets the targets.
    """
    problem = OptimizationProblem(source, ell, SelectionKind.THRESHOLD_ALPHA, tuple(alpha_grid),
                                  leakage_target, ped_target, trials, n_cap=n_cap)
    opt = optimize(problem, rng)
    pe = opt.measured.eavesdropper_error
    n0 = max(opt.budget.n0, min_bits)
    budget = security_budget(n0, ell, pe, opt.legal_error_used, ped_target)
    if budget.leakage_bound > leakage_target or budget.decoding_bound > ped_target:
        raise InfeasibleError(f"targets not met at n0={n0}")
    return ProtocolPlan(float(opt.best_parameter), budget, opt.measured.erasure_rate,
                        opt.legal_error_used, pe, opt)


def bit_error_llr(source: PhysicalSource, link, eta_B: np.ndarray, positions: np.ndarray,
                  bits_B: np.ndarray) -> np.ndarray:
    """``log P(A's bit = 0) / P(A's bit = 1)`` from B's own observations.

    For the phase difference the noise on ``eta_B - eta_A`` is treated as
    Gaussian with variance ``2 * s2 * (1/a1**2 + 1/a2**2)`` (``s2`` the
    per-quadrature noise variance, ``a1, a2`` B's amplitudes in the pair),
    and A's sign differs when the noise crosses zero or the wrap at ``pi``.
    For the envelope the difference has variance ``2 * s2``.
    """
    s2 = link.noise_variance
    d = np.abs(eta_B[positions])
    if s2 == 0:
        q = np.full(d.size, _Q_FLOOR)
    elif source.functional is FunctionalKind.PHASE_DIFFERENCE:
        amp = np.abs(link.obs_B)
        step = 1 if source.overlapping else 2
        a_prev, a_cur = amp[positions * step], amp[positions * step + 1]
        sd = np.sqrt(2.0 * s2 * (1.0 / a_prev**2 + 1.0 / a_cur**2))
        q = 0.5 * special.erfc(d / (sd * math.sqrt(2))) + 0.5 * special.erfc((np.pi - d) / (sd * math.sqrt(2)))
    else:
        sd = math.sqrt(2.0 * s2)
        q = 0.5 * special.erfc(d / (sd * math.sqrt(2)))
    q = np.clip(q, _Q_FLOOR, 0.5 - _Q_FLOOR)
    return np.log((1.0 - q) / q) * (1.0 - 2.0 * bits_B.astype(float))


def run_protocol(source: PhysicalSource, plan: ProtocolPlan, rng: np.random.Generator,
                 level: float = 0.01) -> ProtocolOutcome:
    """One key agreement: simulate, select, reconcile, hash, test."""
    if plan.n0 < MIN_TEST_BITS:
        raise ContractViolation(f"plan needs n0 >= {MIN_TEST_BITS} for the randomness tests")
    n_bits = math.ceil(1.25 * plan.n0 / max(1.0 - plan.erasure_rate, 1e-3)) + 64
    while True:
        draw = source.draw(n_bits, rng, keep_link=True)
        run = select_method1(draw.eta_A, draw.eta_B, draw.zeta_E, plan.alpha)
        if run.n0 >= plan.n0:
            break
        n_bits *= 2
    positions = run.kept_indices[: plan.n0]
    k_a = run.bits_A[positions].astype(np.uint8)
    k_b = run.bits_B[positions].astype(np.uint8)
    n_intervals = int(positions[-1]) + 1

    code = parity_check_matrix(plan.n0, plan.check_bits, child_seed(rng))
    llr = bit_error_llr(source, draw.link, draw.eta_B, positions, k_b)
    decoded, converged = decode_syndrome(code, code.syndrome(k_a), llr)

    hash_seed = child_seed(rng)
    key_a = hash_key(k_a, plan.ell, hash_seed)
    key_b = hash_key(decoded, plan.ell, hash_seed)
    return ProtocolOutcome(key_a, key_b, n_intervals, int(np.count_nonzero(k_a != k_b)), converged,
                           bool(np.array_equal(decoded, k_a)), bit_randomness_tests(k_a, level), plan)
