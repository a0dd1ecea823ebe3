"""Three-ray multipath channel between A, B and the eavesdropper E.

Layout: A sits at the origin, B at distance ``link_length`` on the x axis and
E on the same line, ``eavesdropper_offset`` metres from B towards A. All
three are at height zero between two parallel reflecting planes, one
``surface1_distance`` above and one ``surface2_distance`` below. Each
receiver sees the direct ray plus one single reflection off each plane,
constructed with image sources.

Every key interval is a baseband snapshot: one excitation of A's ring and
one complex observation ``mu_c + i*mu_s`` per receiver. The carrier term
cancels from all functionals, so no explicit time axis is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .antenna import ExcitationVector, RingAntenna, diagram_batch, evaluate_diagram
from .errors import ContractViolation


class Receiver(str, Enum):
    LEGAL_USER = "legal_user"
    EAVESDROPPER = "eavesdropper"


@dataclass(frozen=True)
class Geometry:
    link_length: float = 25.0
    surface1_distance: float = 3.0
    surface2_distance: float = 3.0
    eavesdropper_offset: float = 0.0
    reflection_magnitude: float = 1.0

    def __post_init__(self):
        if not self.link_length > 0:
            raise ContractViolation(f"link_length must be positive, got {self.link_length}")
        if not (self.surface1_distance > 0 and self.surface2_distance > 0):
            raise ContractViolation("surface distances must be positive")
        if not 0.0 <= self.eavesdropper_offset < self.link_length:
            raise ContractViolation(
                f"eavesdropper_offset must lie in [0, {self.link_length}), got {self.eavesdropper_offset}")
        if not 0.0 <= self.reflection_magnitude <= 1.0:
            raise ContractViolation(f"reflection_magnitude must lie in [0, 1], got {self.reflection_magnitude}")

    def receiver_distance(self, receiver: Receiver | str) -> float:
        """Horizontal distance from A to ``receiver``."""
        if Receiver(receiver) is Receiver.LEGAL_USER:
            return self.link_length
        return self.link_length - self.eavesdropper_offset

    def with_offset(self, offset: float) -> "Geometry":
        return Geometry(self.link_length, self.surface1_distance, self.surface2_distance,
                        offset, self.reflection_magnitude)


@dataclass(frozen=True)
class RayPath:
    path_length: float
    departure_azimuth: float
    departure_elevation: float
    attenuation: float
    propagation_phase: float


RaySet = tuple  # tuple[RayPath, ...]


@dataclass(frozen=True)
class QuadratureObservation:
    in_phase: float
    quadrature: float

    def __post_init__(self):
        if not (math.isfinite(self.in_phase) and math.isfinite(self.quadrature)):
            raise ContractViolation("quadrature components must be finite")

    @classmethod
    def from_complex(cls, z: complex) -> "QuadratureObservation":
        return cls(float(z.real), float(z.imag))

    def as_complex(self) -> complex:
        return complex(self.in_phase, self.quadrature)


def trace_rays(geometry: Geometry, receiver: Receiver | str, wavenumber: float,
               reference_gain: float = 1.0) -> RaySet:
    """Direct ray and the two single reflections reaching ``receiver``.

    Attenuation follows the free-space amplitude law ``reference_gain / d``
    (unit gain at 1 m) times the reflection magnitude. A reflection
    coefficient of ``-magnitude`` adds ``pi`` to the propagation phase.
    """
    d = geometry.receiver_distance(receiver)
    if d <= 0:
        raise ContractViolation("receiver coincides with the transmitter")
    gamma = geometry.reflection_magnitude
    rays = [RayPath(d, 0.0, math.pi / 2, reference_gain / d, (wavenumber * d) % (2 * math.pi))]
    # image of A in the upper plane sits at height +2*h1, in the lower plane at -2*h2
    for height, sign in ((geometry.surface1_distance, 1.0), (geometry.surface2_distance, -1.0)):
        length = math.hypot(d, 2.0 * height)
        elevation = math.pi / 2 - sign * math.atan2(2.0 * height, d)
        phase = (wavenumber * length + math.pi) % (2 * math.pi)
        rays.append(RayPath(length, 0.0, elevation, gamma * reference_gain / length, phase))
    return tuple(rays)


def compose_observation(rays: RaySet, antenna: RingAntenna, excitation: ExcitationVector) -> QuadratureObservation:
    """Sum ``A_i * exp(i*theta_i)`` over rays, ``A_i = |f_i|*beta_i``."""
    if not rays:
        raise ContractViolation("at least one ray is required")
    mu_c = mu_s = 0.0
    for ray in rays:
        f = evaluate_diagram(antenna, excitation, ray.departure_azimuth, ray.departure_elevation)
        amp = f.amplitude * ray.attenuation
        theta = f.phase + ray.propagation_phase
        mu_c += amp * math.cos(theta)
        mu_s += amp * math.sin(theta)
    return QuadratureObservation(mu_c, mu_s)


def observe_batch(rays: RaySet, antenna: RingAntenna, phases: np.ndarray) -> np.ndarray:
    """Noiseless complex observations for a stack of excitations."""
    total = np.zeros(np.asarray(phases).shape[0], dtype=complex)
    for ray in rays:
        f = diagram_batch(antenna, phases, ray.departure_azimuth, ray.departure_elevation)
        total += ray.attenuation * np.exp(1j * ray.propagation_phase) * f
    return total


def add_receiver_noise(obs, snr: float, signal_power_reference: float, rng: np.random.Generator):
    """Add complex Gaussian receiver noise at linear power ratio ``snr``.

    Each quadrature gets variance ``signal_power_reference / (2*snr)``.
    ``snr = inf`` returns the input untouched. Accepts a single
    :class:`QuadratureObservation` or a complex array.
    """
    if not snr > 0:
        raise ContractViolation(f"snr must be positive, got {snr}")
    if math.isinf(snr):
        return obs
    sd = math.sqrt(signal_power_reference / (2.0 * snr))
    if isinstance(obs, QuadratureObservation):
        nc, ns = rng.normal(0.0, sd, 2)
        return QuadratureObservation(obs.in_phase + nc, obs.quadrature + ns)
    z = np.asarray(obs, dtype=complex)
    return z + sd * (rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape))


def reciprocal_pair(rays: RaySet, antenna: RingAntenna, excitation: ExcitationVector, snr: float,
                    rng: np.random.Generator, signal_power_reference: float | None = None):
    """Observations of A (uplink) and B (downlink) over the same channel.

    Both share one noiseless observation; each receiver adds its own noise.
    Without an explicit reference the snapshot's own power is used.
    """
    clean = compose_observation(rays, antenna, excitation)
    ref = abs(clean.as_complex()) ** 2 if signal_power_reference is None else signal_power_reference
    obs_a = add_receiver_noise(clean, snr, ref, rng)
    obs_b = add_receiver_noise(clean, snr, ref, rng)
    return {"obs_A": obs_a, "obs_B": obs_b, "clean": clean}


@dataclass
class LinkSamples:
    """Complex observations for a run of intervals.

    ``clean`` is the shared noiseless A<->B observation, ``obs_A``/``obs_B``
    the noisy legal observations and ``obs_E`` the noiseless eavesdropper
    observation.
    """

    clean: np.ndarray
    obs_A: np.ndarray
    obs_B: np.ndarray
    obs_E: np.ndarray
    noise_variance: float  # per quadrature


def simulate_link(geometry: Geometry, antenna: RingAntenna, snr: float, phases: np.ndarray,
                  rng: np.random.Generator, signal_power_reference: float | None = None) -> LinkSamples:
    """Run the 3-ray channel over excitations ``phases`` of shape ``(n, N)``.

    The noise reference defaults to the mean ``mu_c**2 + mu_s**2`` of the
    noiseless legal observations over this run.
    """
    k0 = antenna.wavenumber
    clean = observe_batch(trace_rays(geometry, Receiver.LEGAL_USER, k0), antenna, phases)
    obs_e = observe_batch(trace_rays(geometry, Receiver.EAVESDROPPER, k0), antenna, phases)
    ref = float(np.mean(np.abs(clean) ** 2)) if signal_power_reference is None else signal_power_reference
    obs_a = add_receiver_noise(clean, snr, ref, rng)
    obs_b = add_receiver_noise(clean, snr, ref, rng)
    var = 0.0 if math.isinf(snr) else ref / (2.0 * snr)
    return LinkSamples(clean, obs_a, obs_b, obs_e, var)
