"""Key-rate maximisation over the reliability-selection parameter.

A candidate parameter (``alpha`` for method 1, ``M`` for method 2) is
evaluated by simulation: the selection runs on a draw of functional values
and yields the legal error ``p``, the conditioned eavesdropper error
``p_e`` and the erasure rate ``P_er``. The smallest number of kept bits
``n0`` is then found such that, with ``r`` check bits sized for
``P_ed <= ped_target``, privacy amplification to ``ell`` bits leaks at most
``leakage_target``. The interval count follows as ``n = ceil(n0 / (1 - P_er))``
and the key rate as ``ell / n``; ``ell / n0`` is reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, EmptyKeyError, InfeasibleError
from .keygen import ErrorReport, SelectionKind, measure_errors, merge_reports, select_method1, select_method2
from .security import SecurityBudget, collision_entropy_rate, required_margin, security_budget
from .sources import FunctionalDraw

MIN_TRIALS = 10_000


@dataclass
class OptimizationProblem:
    source: object  # SyntheticSource | PhysicalSource
    ell: int
    method: SelectionKind = SelectionKind.THRESHOLD_ALPHA
    search_grid: tuple = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
    leakage_target: float = 1e-9
    ped_target: float = 1e-5
    trials: int = 200_000
    block_size: int = 10_588
    diversity_m: int = 1
    n_cap: int = 2_000_000

    def __post_init__(self):
        self.method = SelectionKind(self.method)
        if not (0 < self.leakage_target < 1 and 0 < self.ped_target < 1):
            raise ContractViolation("targets must lie in (0, 1)")
        if len(self.search_grid) == 0:
            raise ContractViolation("search grid is empty")
        if self.ell < 1:
            raise ContractViolation(f"ell must be positive, got {self.ell}")
        if self.method is SelectionKind.TOP_M and self.trials < self.block_size:
            raise ContractViolation("method 2 needs at least one full block of trials")


@dataclass
class CandidateEvaluation:
    parameter: float
    errors: ErrorReport
    budget: SecurityBudget | None
    n: int | None
    legal_error_used: float = 0.0
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.budget is not None

    @property
    def key_rate(self) -> float:
        return self.budget.ell / self.n if self.feasible else 0.0

    @property
    def key_rate_n0(self) -> float:
        return self.budget.ell / self.budget.n0 if self.feasible else 0.0


@dataclass
class OptimizationResult:
    best_parameter: float
    measured: ErrorReport
    budget: SecurityBudget
    key_rate: float
    key_rate_n0: float
    n: int
    legal_error_used: float
    candidates: list = field(default_factory=list)

    def verify(self, leakage_target: float, ped_target: float) -> bool:
        b = self.budget
        return (b.leakage_bound <= leakage_target and b.decoding_bound <= ped_target
                and self.key_rate == b.ell / self.n)


def measure_candidate(method: SelectionKind, parameter: float, draw: FunctionalDraw,
                      block_size: int = 10_588) -> ErrorReport:
    """Error rates of one selection parameter on a fixed draw."""
    if SelectionKind(method) is SelectionKind.THRESHOLD_ALPHA:
        return measure_errors(select_method1(draw.eta_A, draw.eta_B, draw.zeta_E, parameter))
    m = int(parameter)
    reports = []
    for start in range(0, len(draw) - block_size + 1, block_size):
        sl = slice(start, start + block_size)
        reports.append(measure_errors(select_method2(draw.eta_A[sl], draw.eta_B[sl], draw.zeta_E[sl], m)))
    return merge_reports(reports)


def budget_legal_error(errors: ErrorReport, legal_noise: bool) -> float:
    """Legal error rate used for check-bit sizing.

    With a noisy legal channel a run without any observed disagreement is
    replaced by the rule-of-three bound ``3 / n0``; otherwise a finite
    simulation could certify zero check bits for a channel that does err.
    """
    if legal_noise and errors.legal_disagreements == 0:
        return min(3.0 / max(errors.n0, 1), 0.5)
    return errors.legal_error


def size_budget(ell: int, pe: float, p_legal: float, leakage_target: float, ped_target: float,
                diversity_m: int = 1, n_cap: int = 2_000_000) -> SecurityBudget:
    """Smallest ``n0`` meeting both targets (binary search; the margin grows with ``n0``)."""
    if pe <= 0.0 or pe >= 1.0 or collision_entropy_rate(pe) <= 0.0:
        raise InfeasibleError(f"eavesdropper error {pe} leaves no secrecy")
    if p_legal >= 0.5:
        raise InfeasibleError(f"legal error {p_legal} cannot be corrected")
    need = required_margin(leakage_target)

    def ok(n0):
        try:
            b = security_budget(n0, ell, pe, p_legal, ped_target, diversity_m)
        except InfeasibleError:
            return None
        return b if b.margin >= need and b.leakage_bound <= leakage_target else None

    hi = max(ell + 1, 64)
    while ok(hi) is None:
        if hi >= n_cap:
            raise InfeasibleError(f"no n0 <= {n_cap} meets the targets")
        hi = min(2 * hi, n_cap)
    lo = ell  # ok(ell) is impossible: margin would be negative
    best = ok(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        b = ok(mid)
        if b is None:
            lo = mid
        else:
            hi, best = mid, b
    return best


def evaluate_on_draw(problem: OptimizationProblem, parameter: float, draw: FunctionalDraw) -> CandidateEvaluation:
    try:
        errors = measure_candidate(problem.method, parameter, draw, problem.block_size)
    except EmptyKeyError as exc:
        return CandidateEvaluation(parameter, ErrorReport(0.0, 0.0, 1.0, len(draw), 0), None, None, reason=str(exc))
    p_legal = budget_legal_error(errors, getattr(problem.source, "legal_noise", True))
    try:
        budget = size_budget(problem.ell, errors.eavesdropper_error, p_legal, problem.leakage_target,
                             problem.ped_target, problem.diversity_m, problem.n_cap)
    except InfeasibleError as exc:
        return CandidateEvaluation(parameter, errors, None, None, p_legal, str(exc))
    n = math.ceil(budget.n0 / (1.0 - errors.erasure_rate))
    return CandidateEvaluation(parameter, errors, budget, n, p_legal)


def evaluate_candidate(problem: OptimizationProblem, parameter: float, trials: int,
                       rng: np.random.Generator) -> CandidateEvaluation:
    """Simulate ``trials`` functional values and size the budget at ``parameter``.

    Raises :class:`InfeasibleError` when the targets cannot be met.
    """
    if trials < MIN_TRIALS:
        raise ContractViolation(f"trials must be at least {MIN_TRIALS}, got {trials}")
    cand = evaluate_on_draw(problem, parameter, problem.source.draw(trials, rng))
    if not cand.feasible:
        raise InfeasibleError(cand.reason)
    return cand


def optimize(problem: OptimizationProblem, rng: np.random.Generator | None = None,
             draw: FunctionalDraw | None = None) -> OptimizationResult:
    """Grid search for the feasible parameter with the largest ``ell / n``.

    All grid points share one draw. Ties go to the smaller parameter.
    """
    if draw is None:
        if rng is None:
            raise ContractViolation("either rng or draw is required")
        if problem.trials < MIN_TRIALS:
            raise ContractViolation(f"trials must be at least {MIN_TRIALS}, got {problem.trials}")
        draw = problem.source.draw(problem.trials, rng)
    cands = [evaluate_on_draw(problem, p, draw) for p in sorted(problem.search_grid)]
    feasible = [c for c in cands if c.feasible]
    if not feasible:
        reasons = "; ".join(sorted({c.reason for c in cands}))
        raise InfeasibleError(f"no feasible parameter in the grid ({reasons})")
    best = max(feasible, key=lambda c: (c.key_rate, -c.parameter))
    result = OptimizationResult(best.parameter, best.errors, best.budget, best.key_rate, best.key_rate_n0,
                                best.n, best.legal_error_used, cands)
    if not result.verify(problem.leakage_target, problem.ped_target):
        raise AssertionError("optimizer returned a point that violates its own constraints")
    return result
