"""Kronecker-power kernel: row weights, the GF(2) butterfly transform, encoding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(eq=False)
class CodeSpec:
    """A constructed code: block exponent n, N = 2^n, K, and the info set A.

    ``info_set`` is the sorted array of information positions (0-based).
    ``construction`` records how A was chosen: "polar", "rm" or "rmpolar",
    together with the design erasure probability ``z0`` and, for rmpolar,
    the row-weight floor ``w_min``.
    """

    n: int
    K: int
    info_set: np.ndarray
    construction: str
    z0: float = 0.5
    w_min: int | None = None

    def __post_init__(self) -> None:
        self.info_set = np.asarray(self.info_set, dtype=np.int64)
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        N = 1 << self.n
        if not 1 <= self.K <= N:
            raise ValueError(f"K must be in [1, {N}], got {self.K}")
        if self.info_set.shape != (self.K,):
            raise ValueError(f"info_set must hold exactly K={self.K} indices")
        if np.any(np.diff(self.info_set) <= 0):
            raise ValueError("info_set must be strictly increasing")
        if self.info_set[0] < 0 or self.info_set[-1] >= N:
            raise ValueError(f"info_set indices must lie in [0, {N})")
        if self.w_min is not None:
            weights = np.array([kron_row_weight(int(i), self.n) for i in self.info_set])
            if weights.min() < self.w_min:
                raise ValueError(f"info_set violates row-weight floor {self.w_min}")

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[self.info_set] = True
        return mask

    def label(self) -> str:
        return f"{self.construction}_{self.N}_{self.K}"


def kron_row_weight(i: int, n: int) -> int:
    """Hamming weight of row i of F^{xn}: 2^popcount(i)."""
    if not 0 <= i < (1 << n):
        raise ValueError(f"row index {i} out of range for n={n}")
    return 1 << int(i).bit_count()


def as_bits(word, N: int | None = None) -> np.ndarray:
    """Validate and convert a bit sequence to a uint8 array over {0,1}."""
    bits = np.asarray(word, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("bit word must be one-dimensional")
    if N is not None and bits.size != N:
        raise ValueError(f"expected {N} bits, got {bits.size}")
    if bits.size and bits.max() > 1:
        raise ValueError("bits must be 0 or 1")
    return bits


def transform(u, n: int | None = None) -> np.ndarray:
    """u F^{xn} over GF(2) via the in-place butterfly, O(N log N).

    Accepts a single word or a batch with words along the last axis.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    if N == 0 or N & (N - 1):
        raise ValueError(f"word length {N} is not a power of two")
    if n is not None and N != 1 << n:
        raise ValueError(f"word length {N} does not match n={n}")
    step = 1
    while step < N:
        for j in range(0, N, 2 * step):
            x[..., j:j + step] ^= x[..., j + step:j + 2 * step]
        step <<= 1
    return x


def encode(spec: CodeSpec, info) -> np.ndarray:
    """Scatter info bits into A, zeros on frozen positions, then transform."""
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != spec.K:
        raise ValueError(f"expected {spec.K} info bits, got {info.shape[-1]}")
    u = np.zeros(info.shape[:-1] + (spec.N,), dtype=np.uint8)
    u[..., spec.info_set] = info
    return transform(u, spec.n)
