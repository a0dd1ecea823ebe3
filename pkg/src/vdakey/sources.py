"""Sources of aligned functional triples ``(eta_A, eta_B, zeta_E)``.

:class:`PhysicalSource` runs the ring antenna through the 3-ray channel.
:class:`SyntheticSource` draws the triple directly: ``eta`` and ``zeta`` are
unit-variance Gaussians with correlation exactly ``rho``, and each legal
user adds independent Gaussian noise of variance ``1/snr`` (the functional
carries unit power, so ``snr`` is the signal-to-noise power ratio of the
functional itself).

Draws are split into fixed-size chunks whose generators are derived from a
single master seed by chunk index, so results do not depend on ``workers``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .antenna import RingAntenna, sample_excitations
from .channel import Geometry, LinkSamples, simulate_link
from .errors import ContractViolation
from .functionals import FunctionalKind, functional_sequence, intervals_needed
from .seeding import child_seed, rng_for

CHUNK_BITS = 1 << 16


@dataclass
class FunctionalDraw:
    eta_A: np.ndarray
    eta_B: np.ndarray
    zeta_E: np.ndarray
    link: LinkSamples | None = None

    def __len__(self):
        return self.eta_A.size


def _chunked(n_bits: int, rng: np.random.Generator, make, workers: int = 1):
    master = child_seed(rng)
    sizes = [min(CHUNK_BITS, n_bits - i) for i in range(0, n_bits, CHUNK_BITS)]
    jobs = [(k, m) for k, m in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda km: make(km[1], rng_for(master, km[0])), jobs))
    else:
        parts = [make(m, rng_for(master, k)) for k, m in jobs]
    return parts


@dataclass(frozen=True)
class SyntheticSource:
    rho: float
    snr: float = 100.0
    workers: int = 1

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ContractViolation(f"rho must lie in [-1, 1], got {self.rho}")
        if not self.snr > 0:
            raise ContractViolation(f"snr must be positive, got {self.snr}")

    @property
    def legal_noise(self) -> bool:
        return not math.isinf(self.snr)

    def _chunk(self, m: int, rng: np.random.Generator):
        eta = rng.standard_normal(m)
        zeta = self.rho * eta + math.sqrt(1.0 - self.rho * self.rho) * rng.standard_normal(m)
        if self.legal_noise:
            sd = 1.0 / math.sqrt(self.snr)
            return eta + sd * rng.standard_normal(m), eta + sd * rng.standard_normal(m), zeta
        return eta.copy(), eta, zeta

    def draw(self, n_bits: int, rng: np.random.Generator) -> FunctionalDraw:
        parts = _chunked(n_bits, rng, self._chunk, self.workers)
        a, b, e = (np.concatenate([p[i] for p in parts]) for i in range(3))
        return FunctionalDraw(a, b, e)


@dataclass(frozen=True)
class PhysicalSource:
    """Ring antenna plus 3-ray channel.

    Envelope values are centred on each user's own sample mean before they
    are used as key material; phase differences are already zero-mean.
    """

    geometry: Geometry
    antenna: RingAntenna
    snr: float = 100.0
    functional: FunctionalKind = FunctionalKind.PHASE_DIFFERENCE
    overlapping: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "functional", FunctionalKind(self.functional))
        if self.functional is FunctionalKind.PHASE:
            raise ContractViolation("key generation uses the envelope or the phase difference")
        if not self.snr > 0:
            raise ContractViolation(f"snr must be positive, got {self.snr}")

    @property
    def legal_noise(self) -> bool:
        return not math.isinf(self.snr)

    def simulate(self, n_intervals: int, rng: np.random.Generator) -> LinkSamples:
        """One contiguous run of intervals (noise reference taken over the run)."""
        phases = sample_excitations(self.antenna, n_intervals, rng)
        return simulate_link(self.geometry, self.antenna, self.snr, phases, rng)

    def functionals(self, link: LinkSamples):
        f = self.functional
        a = functional_sequence(link.obs_A, f, self.overlapping)
        b = functional_sequence(link.obs_B, f, self.overlapping)
        e = functional_sequence(link.obs_E, f, self.overlapping)
        if f is FunctionalKind.ENVELOPE:
            a, b, e = a - a.mean(), b - b.mean(), e - e.mean()
        return a, b, e

    def draw(self, n_bits: int, rng: np.random.Generator, keep_link: bool = False) -> FunctionalDraw:
        if keep_link:
            link = self.simulate(intervals_needed(n_bits, self.functional, self.overlapping), rng)
            return FunctionalDraw(*self.functionals(link), link=link)

        def make(m, r):
            return self.functionals(self.simulate(intervals_needed(m, self.functional, self.overlapping), r))

        parts = _chunked(n_bits, rng, make, self.workers)
        a, b, e = (np.concatenate([p[i] for p in parts]) for i in range(3))
        return FunctionalDraw(a, b, e)
