"""Ring-type variable-directional antenna.

The array is a horizontal ring of ``N`` ideal isotropic radiators with no
mutual coupling. Angles follow the usual spherical convention: the azimuth
``phi`` is measured in the ring plane and the elevation ``theta`` from the
ring's vertical axis, so ``theta = pi/2`` is the horizon. With radiator
phases ``psi_s`` the complex instant diagram is::

    f(phi, theta) = sum_s exp(i*k0*R*sin(theta)*cos(phi - 2*pi*s/N) - i*psi_s)

Each key interval re-draws the phases uniformly on ``[0, 2*pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats

from .errors import ContractViolation

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RingAntenna:
    n_radiators: int
    radius: float
    wavelength: float
    wavenumber: float = field(init=False)

    def __post_init__(self):
        if int(self.n_radiators) != self.n_radiators or self.n_radiators < 1:
            raise ContractViolation(f"n_radiators must be a positive integer, got {self.n_radiators}")
        if not self.radius > 0:
            raise ContractViolation(f"radius must be positive, got {self.radius}")
        if not self.wavelength > 0:
            raise ContractViolation(f"wavelength must be positive, got {self.wavelength}")
        object.__setattr__(self, "n_radiators", int(self.n_radiators))
        object.__setattr__(self, "wavenumber", TWO_PI / self.wavelength)

    @property
    def element_azimuths(self) -> np.ndarray:
        """Angular positions ``2*pi*s/N`` for ``s = 1..N``."""
        s = np.arange(1, self.n_radiators + 1)
        return TWO_PI * s / self.n_radiators

    def steering(self, azimuth: float, elevation: float) -> np.ndarray:
        """Geometric phasors ``exp(i*k0*R*sin(theta)*cos(phi - 2*pi*s/N))``."""
        arg = self.wavenumber * self.radius * math.sin(elevation) * np.cos(azimuth - self.element_azimuths)
        return np.exp(1j * arg)


@dataclass(frozen=True)
class ExcitationVector:
    phases: np.ndarray

    def __post_init__(self):
        arr = np.mod(np.asarray(self.phases, dtype=float).ravel(), TWO_PI)
        # mod can return exactly 2*pi for tiny negative inputs
        arr[arr >= TWO_PI] = 0.0
        arr.setflags(write=False)
        object.__setattr__(self, "phases", arr)

    def __len__(self):
        return self.phases.size


@dataclass(frozen=True)
class DiagramValue:
    gain: complex

    @property
    def amplitude(self) -> float:
        return abs(self.gain)

    @property
    def phase(self) -> float:
        a = math.atan2(self.gain.imag, self.gain.real)
        return math.pi if a == -math.pi else a


def evaluate_diagram(antenna: RingAntenna, excitation: ExcitationVector,
                     azimuth: float, elevation: float) -> DiagramValue:
    """Complex instant diagram of ``antenna`` under ``excitation``."""
    if len(excitation) != antenna.n_radiators:
        raise ContractViolation(
            f"excitation has {len(excitation)} phases but the ring has {antenna.n_radiators} radiators")
    gain = np.sum(antenna.steering(azimuth, elevation) * np.exp(-1j * excitation.phases))
    return DiagramValue(complex(gain))


def diagram_batch(antenna: RingAntenna, phases: np.ndarray, azimuth: float, elevation: float) -> np.ndarray:
    """Diagram gains for a stack of excitations, ``phases`` of shape ``(n, N)``."""
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 2 or phases.shape[1] != antenna.n_radiators:
        raise ContractViolation(f"phases must have shape (n, {antenna.n_radiators}), got {phases.shape}")
    return np.exp(-1j * phases) @ antenna.steering(azimuth, elevation)


def sample_excitation(antenna: RingAntenna, rng: np.random.Generator) -> ExcitationVector:
    """Draw i.i.d. uniform phases on ``[0, 2*pi)`` for every radiator."""
    return ExcitationVector(rng.uniform(0.0, TWO_PI, antenna.n_radiators))


def sample_excitations(antenna: RingAntenna, n: int, rng: np.random.Generator) -> np.ndarray:
    """Phases for ``n`` independent intervals, shape ``(n, N)``."""
    return rng.uniform(0.0, TWO_PI, (n, antenna.n_radiators))


@dataclass
class DiagramStatistics:
    """Empirical distribution of the diagram at one direction.

    ``rice_nu``/``rice_sigma`` come from a minimum Kolmogorov-distance fit on
    half of the samples (started from the method-of-moments solution); the
    Rice KS test is then run on the other, held-out half so the critical
    value stays valid. ``moment_nu``/``moment_sigma`` keep the raw moment
    estimates for reference.
    """

    n_samples: int
    amplitude_counts: np.ndarray
    amplitude_edges: np.ndarray
    phase_counts: np.ndarray
    phase_edges: np.ndarray
    amplitude_mean: float
    amplitude_var: float
    moment_nu: float
    moment_sigma: float
    rice_nu: float
    rice_sigma: float
    phase_ks: float
    phase_pvalue: float
    rice_ks: float | None
    rice_pvalue: float | None
    degenerate: bool
    level: float = 0.01

    @property
    def phase_uniform(self) -> bool:
        return self.phase_pvalue >= self.level

    @property
    def rice_ok(self) -> bool:
        return self.rice_pvalue is not None and self.rice_pvalue >= self.level


def rice_moments(amplitudes: np.ndarray) -> tuple[float, float]:
    """Method-of-moments Rice parameters from the 2nd and 4th moments."""
    m2 = float(np.mean(amplitudes**2))
    m4 = float(np.mean(amplitudes**4))
    nu2 = math.sqrt(max(2.0 * m2 * m2 - m4, 0.0))
    sigma2 = max((m2 - nu2) / 2.0, 0.0)
    return math.sqrt(nu2), math.sqrt(sigma2)


def _kolmogorov_distance(sorted_x: np.ndarray, cdf) -> float:
    n = sorted_x.size
    c = cdf(sorted_x)
    i = np.arange(1, n + 1) / n
    return float(max(np.max(i - c), np.max(c - (i - 1.0 / n))))


def fit_rice(amplitudes: np.ndarray) -> tuple[float, float]:
    """Minimum Kolmogorov-distance Rice fit ``(nu, sigma)``."""
    x = np.sort(np.asarray(amplitudes, dtype=float))
    nu0, s0 = rice_moments(x)
    s0 = max(s0, 1e-6 * max(float(x.mean()), 1.0))

    def loss(p):
        nu, s = abs(p[0]), math.exp(p[1])
        return _kolmogorov_distance(x, stats.rice(nu / s, scale=s).cdf)

    res = optimize.minimize(loss, [max(nu0, 1e-3), math.log(s0)], method="Nelder-Mead",
                            options={"xatol": 1e-5, "fatol": 1e-7, "maxiter": 400})
    return abs(float(res.x[0])), math.exp(float(res.x[1]))


def diagram_statistics(antenna: RingAntenna, azimuth: float, elevation: float, n_samples: int,
                       rng: np.random.Generator, bins: int = 60, level: float = 0.01) -> DiagramStatistics:
    if n_samples < 1000:
        raise ContractViolation(f"n_samples must be at least 1000, got {n_samples}")
    gains = diagram_batch(antenna, sample_excitations(antenna, n_samples, rng), azimuth, elevation)
    amp = np.abs(gains)
    ph = np.mod(np.angle(gains), TWO_PI)

    amp_counts, amp_edges = np.histogram(amp, bins=bins, range=(0.0, float(antenna.n_radiators)))
    ph_counts, ph_edges = np.histogram(ph, bins=bins, range=(0.0, TWO_PI))
    phase_test = stats.kstest(ph, stats.uniform(0.0, TWO_PI).cdf)

    mean, var = float(amp.mean()), float(amp.var())
    degenerate = var <= 1e-24 * max(mean * mean, 1.0)
    if degenerate:
        # every sample is the same phasor length; no spread to fit
        return DiagramStatistics(
            n_samples, amp_counts, amp_edges, ph_counts, ph_edges, mean, 0.0, mean, 0.0, mean, 0.0,
            float(phase_test.statistic), float(phase_test.pvalue), None, None, True, level)

    nu_m, sigma_m = rice_moments(amp)
    half = n_samples // 2
    nu, sigma = fit_rice(amp[:half])
    rice_test = stats.kstest(amp[half:], stats.rice(nu / sigma, scale=sigma).cdf)
    return DiagramStatistics(
        n_samples, amp_counts, amp_edges, ph_counts, ph_edges, mean, var, nu_m, sigma_m, nu, sigma,
        float(phase_test.statistic), float(phase_test.pvalue),
        float(rice_test.statistic), float(rice_test.pvalue), False, level)
