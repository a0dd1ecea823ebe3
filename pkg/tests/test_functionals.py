import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdakey.channel import QuadratureObservation
from vdakey.errors import ContractViolation
from vdakey.functionals import (FunctionalKind, FunctionalSample, envelope, functional_sequence,
                                intervals_needed, phase, phase_difference, phase_difference_sequence, wrap_angle)

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_envelope_and_phase_values():
    obs = QuadratureObservation(3.0, 4.0)
    assert envelope(obs) == 5.0
    assert phase(obs) == pytest.approx(math.atan2(4.0, 3.0))
    assert phase(QuadratureObservation(-1.0, 0.0)) == math.pi
    assert phase(QuadratureObservation(-1.0, -0.0)) == math.pi
    assert phase(QuadratureObservation(0.0, -2.0)) == pytest.approx(-math.pi / 2)


def test_zero_phasor_phase_rejected():
    with pytest.raises(ContractViolation):
        phase(QuadratureObservation(0.0, 0.0))


def test_phase_difference_wraps():
    assert phase_difference(3.0, -3.0) == pytest.approx(6.0 - 2 * math.pi)
    assert phase_difference(-3.0, 3.0) == pytest.approx(2 * math.pi - 6.0)
    assert phase_difference(math.pi, 0.0) == pytest.approx(math.pi)
    assert phase_difference(0.0, math.pi) == pytest.approx(math.pi)


@given(finite)
def test_wrap_range(x):
    w = wrap_angle(x)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(x), abs_tol=1e-9)
    assert math.isclose(math.sin(w), math.sin(x), abs_tol=1e-9)


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(-50, 50))
@settings(max_examples=100)
def test_phase_difference_invariant_to_common_rotation(a, b, c):
    d1 = phase_difference(a, b)
    d2 = phase_difference(wrap_angle(a + c), wrap_angle(b + c))
    assert math.isclose(math.cos(d1), math.cos(d2), abs_tol=1e-9)
    assert math.isclose(math.sin(d1), math.sin(d2), abs_tol=1e-9)


def test_nonoverlapping_pairs():
    z = np.exp(1j * np.array([0.1, 0.4, 1.0, 0.5, 2.0]))
    assert phase_difference_sequence(z) == pytest.approx([0.3, -0.5])
    assert phase_difference_sequence(z, overlapping=True) == pytest.approx([0.3, 0.6, -0.5, 1.5])


@pytest.mark.parametrize("kind, overlapping, expected", [("envelope", False, 10), ("phase_difference", False, 20),
                                                         ("phase_difference", True, 11)])
def test_intervals_needed(kind, overlapping, expected):
    n = intervals_needed(10, kind, overlapping)
    assert n == expected
    z = np.exp(1j * np.arange(n))
    assert functional_sequence(z, kind, overlapping).size == 10


def test_sample_validation():
    with pytest.raises(ContractViolation):
        FunctionalSample(-0.1, FunctionalKind.ENVELOPE)
    with pytest.raises(ContractViolation):
        FunctionalSample(-math.pi, "phase_difference")
    assert FunctionalSample(math.pi, "phase_difference").kind is FunctionalKind.PHASE_DIFFERENCE
