import math

import numpy as np
import pytest

from vdakey.errors import ContractViolation, InfeasibleError
from vdakey.keygen import ErrorReport, SelectionKind
from vdakey.optimizer import (OptimizationProblem, budget_legal_error, evaluate_candidate, optimize,
                              size_budget)
from vdakey.security import required_margin
from vdakey.seeding import rng_for
from vdakey.sources import SyntheticSource


def test_synthetic_source_correlation():
    draw = SyntheticSource(0.9, snr=math.inf).draw(100_000, rng_for(1))
    assert np.array_equal(draw.eta_A, draw.eta_B)
    assert np.corrcoef(draw.eta_B, draw.zeta_E)[0, 1] == pytest.approx(0.9, abs=0.005)


def test_draws_do_not_depend_on_workers():
    a = SyntheticSource(0.9, 100, workers=1).draw(150_000, rng_for(5))
    b = SyntheticSource(0.9, 100, workers=4).draw(150_000, rng_for(5))
    assert np.array_equal(a.eta_A, b.eta_A) and np.array_equal(a.zeta_E, b.zeta_E)


def test_size_budget_is_minimal():
    b = size_budget(256, 0.1, 0.003, 1e-9, 1e-5)
    assert b.margin >= required_margin(1e-9)
    assert b.leakage_bound <= 1e-9 and b.decoding_bound <= 1e-5
    with pytest.raises(InfeasibleError):
        size_budget(256, 0.1, 0.003, 1e-9, 1e-5, n_cap=b.n0 - 1)


def test_size_budget_rejects_secrecy_free_channel():
    with pytest.raises(InfeasibleError):
        size_budget(128, 0.0, 0.01, 1e-9, 1e-5)
    with pytest.raises(InfeasibleError):
        size_budget(128, 0.2, 0.5, 1e-9, 1e-5)


def test_rule_of_three_on_noisy_channel():
    rep = ErrorReport(0.0, 0.2, 0.1, 1000, 900, 0)
    assert budget_legal_error(rep, legal_noise=True) == pytest.approx(3 / 900)
    assert budget_legal_error(rep, legal_noise=False) == 0.0


def test_noiseless_channel_needs_no_check_bits():
    problem = OptimizationProblem(SyntheticSource(0.8, snr=math.inf), 128, search_grid=(0.0,), trials=20_000)
    res = optimize(problem, rng_for(2))
    assert res.budget.check_bits == 0
    assert res.measured.legal_error == 0.0
    assert res.best_parameter == 0.0


def test_single_point_grid_returns_that_point():
    problem = OptimizationProblem(SyntheticSource(0.8), 128, search_grid=(0.15,), trials=50_000)
    res = optimize(problem, rng_for(3))
    assert res.best_parameter == 0.15
    assert len(res.candidates) == 1


def test_result_reverifies():
    problem = OptimizationProblem(SyntheticSource(0.8), 256, trials=100_000)
    res = optimize(problem, rng_for(4))
    assert res.verify(1e-9, 1e-5)
    assert res.key_rate == res.budget.ell / res.n
    assert res.key_rate <= res.key_rate_n0 <= 1.0
    assert res.n == math.ceil(res.budget.n0 / (1 - res.measured.erasure_rate))


def test_key_rate_grows_with_ell():
    source = SyntheticSource(0.8)
    draw = source.draw(100_000, rng_for(6))
    rates = [optimize(OptimizationProblem(source, ell), draw=draw).key_rate for ell in (128, 256, 512)]
    assert rates[0] < rates[1] < rates[2]


def test_method2_blocks():
    problem = OptimizationProblem(SyntheticSource(0.8), 128, SelectionKind.TOP_M, (9000,), trials=21_176)
    res = optimize(problem, rng_for(7))
    assert res.measured.n == 21_176
    with pytest.raises(ContractViolation):
        OptimizationProblem(SyntheticSource(0.8), 128, SelectionKind.TOP_M, (9000,), trials=10_000)


def test_useless_legal_channel_is_infeasible():
    problem = OptimizationProblem(SyntheticSource(0.5, snr=1e-6), 128, trials=20_000)
    with pytest.raises(InfeasibleError):
        optimize(problem, rng_for(8))
    with pytest.raises(InfeasibleError):
        evaluate_candidate(problem, 0.1, 20_000, rng_for(8))


def test_candidate_needs_trials():
    problem = OptimizationProblem(SyntheticSource(0.8), 128)
    with pytest.raises(ContractViolation):
        evaluate_candidate(problem, 0.1, 9_999, rng_for(9))


@pytest.mark.slow
def test_alpha_opt_band_at_rho_0_8():
    res = optimize(OptimizationProblem(SyntheticSource(0.8), 128, trials=200_000), rng_for(10))
    assert 0.1 <= res.best_parameter <= 0.2


@pytest.mark.slow
@pytest.mark.parametrize("rho", [0.95, 0.99])
def test_method2_not_worse_than_method1_at_large_rho(rho):
    src = SyntheticSource(rho)
    draw = src.draw(211_760, rng_for(12))
    m1 = optimize(OptimizationProblem(src, 256, trials=211_760), draw=draw)
    m2 = optimize(OptimizationProblem(src, 256, SelectionKind.TOP_M, (7500, 8000, 8500, 9000, 9500, 10_000),
                                      trials=211_760), draw=draw)
    assert m2.key_rate >= m1.key_rate - 0.02
