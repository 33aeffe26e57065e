"""Information-set construction: BEC Bhattacharyya evolution and the three selectors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import CodeSpec, kron_row_weight


class Infeasible(ValueError):
    """Requested (K, w_min) cannot be met: fewer eligible rows than K."""

    def __init__(self, K: int, eligible: int):
        super().__init__(f"K={K} exceeds eligible row count {eligible}")
        self.K = K
        self.eligible = eligible


@dataclass
class ReliabilityProfile:
    """Per-bit-channel erasure surrogates z[i] from design probability z0."""

    z: np.ndarray
    z0: float

    @property
    def N(self) -> int:
        return self.z.size


def evolve_bhattacharyya(z0: float, n: int) -> ReliabilityProfile:
    """BEC evolution of z0 through n polarization levels.

    Bit b of index i, read MSB-first, applies the minus transform
    z <- 2z - z^2 for b = 0 and the plus transform z <- z^2 for b = 1.
    Hence z[N-1] = z0^N and z[0] is the least reliable channel.
    """
    if not 0.0 <= z0 <= 1.0:
        raise ValueError(f"z0 must lie in [0, 1], got {z0}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = np.array([z0], dtype=np.float64)
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return ReliabilityProfile(z=z, z0=z0)


def _smallest_z(z: np.ndarray, K: int, candidates: np.ndarray) -> np.ndarray:
    """K candidate indices with smallest z; ties prefer the larger index."""
    # lexsort: primary key z ascending, secondary -index ascending
    order = np.lexsort((-candidates, z[candidates]))
    return np.sort(candidates[order[:K]])


def select_polar(profile: ReliabilityProfile, K: int) -> np.ndarray:
    """The K most reliable bit-channels (smallest z), sorted ascending."""
    if not 1 <= K <= profile.N:
        raise ValueError(f"K must be in [1, {profile.N}], got {K}")
    return _smallest_z(profile.z, K, np.arange(profile.N))


def select_rm(n: int, K: int) -> np.ndarray:
    """The K rows of F^{xn} with largest Hamming weight, sorted ascending.

    When K cuts inside a weight class, ties are broken by smaller
    Bhattacharyya z at z0 = 0.5, then by larger index.  For
    K = sum_{i<=r} C(n, i) this is exactly {i : popcount(i) >= n - r}.
    """
    N = 1 << n
    if not 1 <= K <= N:
        raise ValueError(f"K must be in [1, {N}], got {K}")
    idx = np.arange(N)
    pop = np.array([int(i).bit_count() for i in range(N)])
    z = evolve_bhattacharyya(0.5, n).z
    # keys: weight descending, then z ascending, then index descending
    order = np.lexsort((-idx, z, -pop))
    return np.sort(idx[order[:K]])


def select_rm_polar(profile: ReliabilityProfile, K: int, w_min: int) -> np.ndarray:
    """K most reliable channels among rows with weight >= w_min.

    Realizes the hybrid rule: drop rows lighter than w_min, then apply the
    reliability criterion to what remains.  Raises Infeasible when fewer
    than K rows survive the weight floor.
    """
    if w_min < 1 or w_min & (w_min - 1):
        raise ValueError(f"w_min must be a power of two, got {w_min}")
    N = profile.N
    n = N.bit_length() - 1
    eligible = np.array([i for i in range(N) if kron_row_weight(i, n) >= w_min])
    if K > eligible.size:
        raise Infeasible(K, eligible.size)
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return _smallest_z(profile.z, K, eligible)


def build_code_spec(n: int, K: int, construction: str, z0: float = 0.5,
                    w_min: int | None = None) -> CodeSpec:
    """Dispatch over the three selectors and record the construction metadata."""
    if not 0.0 < z0 < 1.0:
        raise ValueError(f"design z0 must lie in (0, 1), got {z0}")
    if construction == "polar":
        info_set = select_polar(evolve_bhattacharyya(z0, n), K)
        w = None
    elif construction == "rm":
        # selection ignores the design z0; ties always use z at 0.5
        info_set = select_rm(n, K)
        z0 = 0.5
        w = None
    elif construction == "rmpolar":
        if w_min is None:
            raise ValueError("rmpolar construction requires w_min")
        info_set = select_rm_polar(evolve_bhattacharyya(z0, n), K, w_min)
        w = w_min
    else:
        raise ValueError(f"unknown construction {construction!r}")
    return CodeSpec(n=n, K=K, info_set=info_set, construction=construction,
                    z0=z0, w_min=w)
