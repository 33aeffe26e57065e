"""Minimum-distance checks: the row-weight bound and exact brute force."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import CodeSpec, encode, kron_row_weight


class BudgetExceeded(ValueError):
    """K exceeds the enumeration budget; only the row-weight bound is available."""

    def __init__(self, K: int, budget: int):
        super().__init__(f"K={K} exceeds enumeration budget {budget}")
        self.K = K
        self.budget = budget


@dataclass
class DistanceReport:
    """upper_bound from row weights; exact and witness when brute force ran.

    The witness is an info word whose codeword weight equals ``exact`` when
    present, else equals ``upper_bound`` (a single selected row).
    """

    upper_bound: int
    exact: int | None = None
    witness: np.ndarray | None = None


def min_row_weight(spec: CodeSpec) -> int:
    """min over A of 2^popcount(i): an upper bound on d_min."""
    return min(kron_row_weight(int(i), spec.n) for i in spec.info_set)


def brute_force_min_distance(spec: CodeSpec, budget: int = 24) -> DistanceReport:
    """Exact d_min over all 2^K - 1 nonzero info words, Gray-code order.

    Each step flips one generator row into a bit-packed running codeword;
    steps are processed in vectorized chunks with a carried prefix.  Raises
    BudgetExceeded for K > budget (caller falls back to min_row_weight).
    """
    K = spec.K
    if K > budget:
        raise BudgetExceeded(K, budget)
    rows = encode(spec, np.eye(K, dtype=np.uint8))  # generator rows of A
    packed = _pack_bits(rows)
    nwords = packed.shape[1]

    best = spec.N + 1
    best_step = 0
    state = np.zeros(nwords, dtype=np.uint64)
    chunk = 1 << 16
    for t0 in range(1, 1 << K, chunk):
        t = np.arange(t0, min(t0 + chunk, 1 << K), dtype=np.uint64)
        lsb = t & (np.uint64(0) - t)
        flips = np.log2(lsb.astype(np.float64)).astype(np.intp)
        words = packed[flips]
        np.bitwise_xor.accumulate(words, axis=0, out=words)
        words ^= state
        state = words[-1].copy()
        weights = np.bitwise_count(words).sum(axis=1, dtype=np.int64)
        j = int(np.argmin(weights))
        if weights[j] < best:
            best = int(weights[j])
            best_step = t0 + j
    g = best_step ^ (best_step >> 1)  # Gray code of the best step
    witness = ((g >> np.arange(K)) & 1).astype(np.uint8)
    return DistanceReport(upper_bound=min_row_weight(spec), exact=best,
                          witness=witness)


def _pack_bits(rows: np.ndarray) -> np.ndarray:
    """(K, N) bits to (K, ceil(N/64)) uint64 words."""
    K, N = rows.shape
    nwords = (N + 63) // 64
    buf = np.zeros((K, nwords * 64), dtype=np.uint8)
    buf[:, :N] = rows
    return np.packbits(buf, axis=1).view(np.uint64)
