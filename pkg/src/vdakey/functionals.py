"""Key-generating functionals of the quadrature observations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import QuadratureObservation
from .errors import ContractViolation


class FunctionalKind(str, Enum):
    ENVELOPE = "envelope"
    PHASE = "phase"
    PHASE_DIFFERENCE = "phase_difference"


@dataclass(frozen=True)
class FunctionalSample:
    value: float
    kind: FunctionalKind

    def __post_init__(self):
        kind = FunctionalKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is FunctionalKind.ENVELOPE and self.value < 0:
            raise ContractViolation("envelope values are nonnegative")
        if kind is FunctionalKind.PHASE_DIFFERENCE and not -math.pi < self.value <= math.pi:
            raise ContractViolation("phase differences lie in (-pi, pi]")


def wrap_angle(x):
    """Wrap angles into ``(-pi, pi]``; works on scalars and arrays."""
    w = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)
    return float(w) if np.ndim(w) == 0 else w


def envelope(obs: QuadratureObservation) -> float:
    return math.hypot(obs.in_phase, obs.quadrature)


def phase(obs: QuadratureObservation) -> float:
    """Four-quadrant angle of ``mu_c + i*mu_s`` in ``(-pi, pi]``."""
    if obs.in_phase == 0 and obs.quadrature == 0:
        raise ContractViolation("phase of a zero phasor is undefined")
    a = math.atan2(obs.quadrature, obs.in_phase)
    return math.pi if a == -math.pi else a


def phase_difference(current: float, previous: float) -> float:
    if not (math.isfinite(current) and math.isfinite(previous)):
        raise ContractViolation("phases must be finite")
    return wrap_angle(current - previous)


def phase_difference_sequence(z: np.ndarray, overlapping: bool = False) -> np.ndarray:
    """Phase differences of a run of complex observations.

    By default consecutive intervals are paired without overlap,
    ``(psi_2 - psi_1), (psi_4 - psi_3), ...``, so every interval feeds one
    bit and the bits stay independent. ``overlapping=True`` gives
    ``psi_{j+1} - psi_j`` for every ``j``.
    """
    psi = np.angle(np.asarray(z))
    if overlapping:
        return wrap_angle(np.diff(psi))
    m = psi.size // 2
    return wrap_angle(psi[1:2 * m:2] - psi[0:2 * m:2])


def intervals_needed(n_bits: int, kind: FunctionalKind | str, overlapping: bool = False) -> int:
    """Number of key intervals that yield ``n_bits`` functional values."""
    if FunctionalKind(kind) is FunctionalKind.PHASE_DIFFERENCE:
        return n_bits + 1 if overlapping else 2 * n_bits
    return n_bits


def functional_sequence(z: np.ndarray, kind: FunctionalKind | str, overlapping: bool = False) -> np.ndarray:
    """Raw functional values (uncentred) for a run of observations."""
    kind = FunctionalKind(kind)
    if kind is FunctionalKind.ENVELOPE:
        return np.abs(z)
    if kind is FunctionalKind.PHASE:
        return np.angle(z)
    return phase_difference_sequence(z, overlapping)
