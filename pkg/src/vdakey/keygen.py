"""Key bits from functional sequences.

Bits are stored as ``int8`` arrays with ``ERASED = -1`` for positions that
were dropped. Erasures are announced publicly, so A, B and E always read
their bits off the same kept index set.

The first reliability method thresholds each user's own values at
``alpha`` times that user's sample standard deviation. The second keeps the
``M`` largest ``|eta|`` of each user and intersects the two index sets.
The eavesdropper has no erasures of her own and reads the sign of her
value at every kept index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg, special

from .errors import ContractViolation, EmptyKeyError

ERASED = -1


class SelectionKind(str, Enum):
    THRESHOLD_ALPHA = "threshold_alpha"
    TOP_M = "top_m"


@dataclass(frozen=True)
class SelectionPolicy:
    kind: SelectionKind
    alpha: float = 0.0
    m_keep: int = 0

    def __post_init__(self):
        kind = SelectionKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is SelectionKind.THRESHOLD_ALPHA and not self.alpha >= 0:
            raise ContractViolation(f"alpha must be nonnegative, got {self.alpha}")
        if kind is SelectionKind.TOP_M and not self.m_keep > 0:
            raise ContractViolation(f"m_keep must be positive, got {self.m_keep}")


@dataclass
class KeyRun:
    eta_A: np.ndarray
    eta_B: np.ndarray
    zeta_E: np.ndarray
    bits_A: np.ndarray
    bits_B: np.ndarray
    bits_E: np.ndarray
    kept_indices: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eta_A.size)

    @property
    def n0(self) -> int:
        return int(self.kept_indices.size)

    @property
    def n_er(self) -> int:
        return self.n - self.n0

    def kept_bits(self, who: str = "A") -> np.ndarray:
        bits = {"A": self.bits_A, "B": self.bits_B, "E": self.bits_E}[who]
        return bits[self.kept_indices].astype(np.uint8)


@dataclass(frozen=True)
class ErrorReport:
    legal_error: float
    eavesdropper_error: float
    erasure_rate: float
    n: int = 0
    n0: int = 0
    legal_disagreements: int = 0


def quantize_threshold(value: float, threshold: float) -> int:
    """1 if ``value >= threshold``, 0 if ``value <= -threshold``, else erased."""
    if threshold < 0:
        raise ContractViolation(f"threshold must be nonnegative, got {threshold}")
    if value >= threshold:
        return 1
    if value <= -threshold:
        return 0
    return ERASED


def quantize_array(values: np.ndarray, threshold: float) -> np.ndarray:
    """Vectorised :func:`quantize_threshold`."""
    v = np.asarray(values, dtype=float)
    out = np.full(v.shape, ERASED, dtype=np.int8)
    out[v <= -threshold] = 0
    out[v >= threshold] = 1
    return out


def _aligned(eta_A, eta_B, zeta_E):
    a, b, e = (np.asarray(x, dtype=float).ravel() for x in (eta_A, eta_B, zeta_E))
    if not a.size == b.size == e.size:
        raise ContractViolation("functional sequences must have equal length")
    return a, b, e


def _build_run(a, b, e, bits_a, bits_b, kept) -> KeyRun:
    if kept.size == 0:
        raise EmptyKeyError("no interval survived the reliability selection")
    mask = np.zeros(a.size, dtype=bool)
    mask[kept] = True
    bits_a = np.where(mask, bits_a, ERASED).astype(np.int8)
    bits_b = np.where(mask, bits_b, ERASED).astype(np.int8)
    bits_e = np.where(mask, quantize_array(e, 0.0), ERASED).astype(np.int8)
    return KeyRun(a, b, e, bits_a, bits_b, bits_e, kept)


def select_method1(eta_A, eta_B, zeta_E, alpha_in_sigma: float) -> KeyRun:
    """Threshold selection; the threshold is ``alpha`` sample std of each user's own values."""
    if alpha_in_sigma < 0:
        raise ContractViolation(f"alpha must be nonnegative, got {alpha_in_sigma}")
    a, b, e = _aligned(eta_A, eta_B, zeta_E)
    bits_a = quantize_array(a, alpha_in_sigma * float(a.std()))
    bits_b = quantize_array(b, alpha_in_sigma * float(b.std()))
    kept = np.flatnonzero((bits_a != ERASED) & (bits_b != ERASED))
    return _build_run(a, b, e, bits_a, bits_b, kept)


def top_m_indices(values: np.ndarray, m_keep: int) -> np.ndarray:
    """Indices of the ``m_keep`` largest ``|values|``; ties go to the lower index."""
    order = np.argsort(-np.abs(values), kind="stable")
    return np.sort(order[:m_keep])


def select_method2(eta_A, eta_B, zeta_E, m_keep: int) -> KeyRun:
    """Keep the intersection of A's and B's top-``m_keep`` reliability sets."""
    a, b, e = _aligned(eta_A, eta_B, zeta_E)
    if not 0 < m_keep <= a.size:
        raise ContractViolation(f"m_keep must lie in (0, {a.size}], got {m_keep}")
    kept = np.intersect1d(top_m_indices(a, m_keep), top_m_indices(b, m_keep))
    return _build_run(a, b, e, quantize_array(a, 0.0), quantize_array(b, 0.0), kept)


def measure_errors(keyrun: KeyRun) -> ErrorReport:
    if keyrun.n0 == 0:
        raise ContractViolation("kept set is empty")
    k = keyrun.kept_indices
    a, b, e = keyrun.bits_A[k], keyrun.bits_B[k], keyrun.bits_E[k]
    legal = int(np.count_nonzero(a != b))
    return ErrorReport(legal / k.size, float(np.mean(b != e)), keyrun.n_er / keyrun.n,
                       keyrun.n, keyrun.n0, legal)


def merge_reports(reports) -> ErrorReport:
    """Pool error counts from independent runs."""
    reports = list(reports)
    n = sum(r.n for r in reports)
    n0 = sum(r.n0 for r in reports)
    legal = sum(r.legal_disagreements for r in reports)
    eve = sum(r.eavesdropper_error * r.n0 for r in reports)
    return ErrorReport(legal / n0, eve / n0, (n - n0) / n, n, n0, legal)


@dataclass(frozen=True)
class RandomnessReport:
    monobit_statistic: float
    monobit_pvalue: float
    serial_statistic: float
    serial_pvalue: float
    runs_statistic: float
    runs_pvalue: float
    level: float = 0.01

    @property
    def monobit_passed(self) -> bool:
        return self.monobit_pvalue >= self.level

    @property
    def serial_passed(self) -> bool:
        return self.serial_pvalue >= self.level

    @property
    def runs_passed(self) -> bool:
        return self.runs_pvalue >= self.level

    @property
    def passed(self) -> bool:
        return self.monobit_passed and self.serial_passed and self.runs_passed


def bit_randomness_tests(bits, level: float = 0.01) -> RandomnessReport:
    """Monobit frequency, lag-1 serial correlation and Wald-Wolfowitz runs tests."""
    x = np.asarray(bits).astype(np.int64).ravel()
    n = x.size
    if n < 1000:
        raise ContractViolation(f"at least 1000 bits are required, got {n}")
    if np.any((x != 0) & (x != 1)):
        raise ContractViolation("bits must be 0 or 1")

    s = 2 * x - 1
    mono = abs(int(s.sum())) / math.sqrt(n)
    mono_p = float(special.erfc(mono / math.sqrt(2)))

    # lag-1 autocorrelation is ~ N(0, 1/n) under independence
    c = s - s.mean()
    denom = float(c @ c)
    r1 = float(c[:-1] @ c[1:]) / denom if denom > 0 else 1.0
    serial = r1 * math.sqrt(n)
    serial_p = float(special.erfc(abs(serial) / math.sqrt(2)))

    n1 = int(x.sum())
    n0 = n - n1
    runs = 1 + int(np.count_nonzero(x[1:] != x[:-1]))
    if n0 == 0 or n1 == 0:
        runs_z, runs_p = math.inf, 0.0
    else:
        mu = 2.0 * n0 * n1 / n + 1.0
        var = 2.0 * n0 * n1 * (2.0 * n0 * n1 - n) / (n * n * (n - 1.0))
        runs_z = (runs - mu) / math.sqrt(var) if var > 0 else math.inf
        runs_p = float(special.erfc(abs(runs_z) / math.sqrt(2)))
    return RandomnessReport(mono, mono_p, serial, serial_p, runs_z, runs_p, level)


def toeplitz_seed_bits(n_in: int, output_length: int, seed: int) -> np.ndarray:
    """The ``output_length + n_in - 1`` public bits that define the hash."""
    return np.random.default_rng(seed).integers(0, 2, output_length + n_in - 1, dtype=np.uint8)


def toeplitz_matrix(seed_bits: np.ndarray, n_in: int, output_length: int) -> np.ndarray:
    """Binary Toeplitz matrix ``T[i, j] = seed_bits[i - j + n_in - 1]``."""
    col = seed_bits[n_in - 1:n_in - 1 + output_length]
    row = seed_bits[n_in - 1::-1]
    return linalg.toeplitz(col, row).astype(np.uint8)


def hash_key(bits, output_length: int, seed: int) -> np.ndarray:
    """Compress agreed bits to ``output_length`` bits with a seeded Toeplitz hash.

    Random binary Toeplitz matrices form a universal family: for distinct
    inputs the outputs collide with probability ``2**-output_length`` over
    the seed.
    """
    x = np.asarray(bits).astype(np.uint8).ravel()
    if not 0 < output_length < x.size:
        raise ContractViolation(f"output_length must lie in (0, {x.size}), got {output_length}")
    t = toeplitz_matrix(toeplitz_seed_bits(x.size, output_length, seed), x.size, output_length)
    return ((t.astype(np.int64) @ x.astype(np.int64)) & 1).astype(np.uint8)
