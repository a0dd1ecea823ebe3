"""One-shot check-bit reconciliation for the end-to-end demo.

A publishes ``r`` check bits, the syndrome ``H @ k_A mod 2`` of a seeded
sparse parity-check matrix ``H`` (column weight 3, rows filled as evenly as
the shape allows). B runs sum-product decoding on that syndrome, starting
from log-likelihood ratios built from its own observations, and recovers
A's string. The information budget is unchanged: ``r`` public check bits,
exactly as in the leakage bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation


@dataclass(frozen=True)
class ParityCheck:
    """Sparse ``r x n`` binary matrix stored as its edge list."""

    n: int
    r: int
    rows: np.ndarray
    cols: np.ndarray

    def syndrome(self, bits: np.ndarray) -> np.ndarray:
        bits = np.asarray(bits).astype(np.int64)
        if bits.size != self.n:
            raise ContractViolation(f"expected {self.n} bits, got {bits.size}")
        return (np.bincount(self.rows, bits[self.cols], self.r) % 2).astype(np.uint8)

    def dense(self) -> np.ndarray:
        h = np.zeros((self.r, self.n), dtype=np.uint8)
        h[self.rows, self.cols] = 1
        return h


def parity_check_matrix(n: int, r: int, seed: int, column_weight: int = 3) -> ParityCheck:
    if n < 1 or r < 0:
        raise ContractViolation("need n >= 1 and r >= 0")
    if r == 0:
        return ParityCheck(n, 0, np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    rng = np.random.default_rng(seed)
    w = min(column_weight, r)
    sockets = np.tile(np.arange(r), math.ceil(n * w / r))[: n * w]
    rng.shuffle(sockets)
    cols = np.repeat(np.arange(n), w)
    # a repeated (row, col) pair would cancel over GF(2); keep one copy
    pairs = np.unique(np.stack([sockets, cols], axis=1), axis=0)
    return ParityCheck(n, r, pairs[:, 0], pairs[:, 1])


def decode_syndrome(code: ParityCheck, syndrome: np.ndarray, llr: np.ndarray,
                    max_iter: int = 100) -> tuple[np.ndarray, bool]:
    """Sum-product decoding towards the string with the given syndrome.

    ``llr`` is ``log P(bit = 0) / P(bit = 1)`` per position. Returns the
    hard decision and whether it satisfies every check.
    """
    llr = np.asarray(llr, dtype=float)
    hard = (llr < 0).astype(np.uint8)
    if code.r == 0:
        return hard, True
    s = np.asarray(syndrome).astype(np.uint8)
    if np.array_equal(code.syndrome(hard), s):
        return hard, True
    rows, cols = code.rows, code.cols
    sign_s = 1.0 - 2.0 * s[rows]
    v2c = llr[cols].copy()
    for _ in range(max_iter):
        t = np.tanh(np.clip(v2c, -40.0, 40.0) / 2.0)
        t = np.where(np.abs(t) < 1e-15, 1e-15, t)
        log_abs = np.log(np.abs(t))
        neg = (t < 0).astype(np.int64)
        row_log = np.bincount(rows, log_abs, code.r)
        row_neg = np.bincount(rows, neg, code.r)
        ext = np.exp(row_log[rows] - log_abs)
        ext_sign = 1.0 - 2.0 * ((row_neg[rows] - neg) % 2)
        c2v = 2.0 * np.arctanh(np.clip(ext, 0.0, 1.0 - 1e-15) * ext_sign * sign_s)
        total = llr + np.bincount(cols, c2v, code.n)
        hard = (total < 0).astype(np.uint8)
        if np.array_equal(code.syndrome(hard), s):
            return hard, True
        v2c = total[cols] - c2v
    return hard, False
