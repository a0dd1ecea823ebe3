import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vdakey.errors import ContractViolation, DegenerateInputError
from vdakey.stats import gaussian_fit, pe_closed_form, pe_monte_carlo, pe_reflected, pearson_correlation

# independent high-precision evaluations of arctan(sqrt(1 - rho^2) / rho) / pi
PE_ORACLE = {0.2: 0.435905783151, 0.5: 1 / 3, 0.8: 0.204832764699, 0.95: 0.101082624104, 0.99: 0.0450534136444}


@pytest.mark.parametrize("rho, expected", sorted(PE_ORACLE.items()))
def test_closed_form_oracle(rho, expected):
    assert pe_closed_form(rho) == pytest.approx(expected, abs=1e-11)


def test_closed_form_endpoints():
    assert pe_closed_form(1.0) == 0.0
    assert pe_closed_form(1e-12) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ContractViolation):
        pe_closed_form(0.0)


@given(st.floats(1e-6, 1.0))
def test_closed_form_range_and_identity(rho):
    p = pe_closed_form(rho)
    assert 0.0 <= p < 0.5
    # same quantity written through arccos
    assert p == pytest.approx(math.acos(rho) / math.pi, abs=1e-9)


@given(st.floats(0.01, 0.98), st.floats(0.001, 0.01))
def test_closed_form_decreasing(rho, step):
    assert pe_closed_form(rho + step) < pe_closed_form(rho)


@given(st.floats(-1.0, 1.0))
def test_reflection_symmetry(rho):
    assert pe_reflected(rho) + pe_reflected(-rho) == pytest.approx(1.0)


def test_monte_carlo_agrees(rng):
    est = pe_monte_carlo(0.5, 200_000, rng)
    assert abs(est.probability - 1 / 3) < 4 * est.standard_error
    assert est.n_samples == 200_000


def test_monte_carlo_chunking_is_transparent():
    a = pe_monte_carlo(0.7, 30_000, np.random.default_rng(3), chunk=30_000)
    b = pe_monte_carlo(0.7, 30_000, np.random.default_rng(3), chunk=30_000)
    assert a == b


def test_monte_carlo_needs_samples(rng):
    with pytest.raises(ContractViolation):
        pe_monte_carlo(0.5, 9_999, rng)


def test_pearson_values():
    x = np.arange(10.0)
    assert pearson_correlation(x, 2 * x + 1).coefficient == pytest.approx(1.0)
    assert pearson_correlation(x, -x).coefficient == pytest.approx(-1.0)
    with pytest.raises(DegenerateInputError):
        pearson_correlation(x, np.ones(10))


def test_gaussian_fit(rng):
    res = gaussian_fit(rng.normal(1.0, 2.0, 20_000))
    assert res.fit.mean == pytest.approx(1.0, abs=0.05)
    assert res.fit.variance == pytest.approx(4.0, rel=0.05)
    assert res.passed
    assert not gaussian_fit(rng.uniform(-math.pi, math.pi, 20_000)).passed
    flat = gaussian_fit(np.ones(200))
    assert flat.degenerate and not flat.passed
