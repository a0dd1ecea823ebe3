import numpy as np
import pytest

from vdakey.protocol import plan_protocol, run_protocol
from vdakey.reconcile import decode_syndrome, parity_check_matrix
from vdakey.scenario import Scenario
from vdakey.seeding import rng_for


def test_parity_check_shape_and_weight():
    code = parity_check_matrix(100, 40, seed=1)
    h = code.dense()
    assert h.shape == (40, 100)
    assert np.all(h.sum(axis=0) <= 3) and np.all(h.sum(axis=0) >= 1)
    bits = np.random.default_rng(0).integers(0, 2, 100)
    assert np.array_equal(code.syndrome(bits), (h.astype(int) @ bits) % 2)


def test_decoder_corrects_sparse_errors(rng):
    n, r = 1000, 350
    code = parity_check_matrix(n, r, seed=2)
    a = rng.integers(0, 2, n).astype(np.uint8)
    b = a.copy()
    flips = rng.choice(n, 30, replace=False)
    b[flips] ^= 1
    llr = np.log(0.97 / 0.03) * (1.0 - 2.0 * b)
    decoded, ok = decode_syndrome(code, code.syndrome(a), llr)
    assert ok and np.array_equal(decoded, a)


def test_decoder_without_checks_returns_hard_decision():
    code = parity_check_matrix(10, 0, seed=1)
    llr = np.array([1.0, -1.0] * 5)
    decoded, ok = decode_syndrome(code, code.syndrome(np.zeros(10)), llr)
    assert ok and list(decoded) == [0, 1] * 5


@pytest.fixture(scope="module")
def demo_plan():
    source = Scenario().physical_source()
    return source, plan_protocol(source, 128, rng_for(1, 0), trials=50_000)


def test_plan_meets_targets(demo_plan):
    _, plan = demo_plan
    assert plan.n0 >= 1000
    assert plan.budget.leakage_bound <= 1e-9
    assert plan.budget.decoding_bound <= 1e-5
    assert plan.alpha in (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)


def test_single_run_agrees(demo_plan):
    source, plan = demo_plan
    out = run_protocol(source, plan, rng_for(1, 1, 0))
    assert out.keys_match and out.reconciled
    assert out.key_A.size == 128
    assert out.legal_disagreements > 0


def test_runs_are_reproducible(demo_plan):
    source, plan = demo_plan
    a = run_protocol(source, plan, rng_for(1, 1, 3))
    b = run_protocol(source, plan, rng_for(1, 1, 3))
    assert np.array_equal(a.key_A, b.key_A) and a.n_intervals == b.n_intervals
