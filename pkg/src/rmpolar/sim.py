"""Seeded BPSK/AWGN Monte-Carlo harness for FER, BER and the ML lower bound."""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codebook import CodeSpec, transform
from .scl import LLR_MAX, ListEngine, default_batch

# Counter-based generator backing every frame stream.  Each frame draws from
# Philox4x64-10 with key = (seed, cell) and counter = (0, 0, lane, frame):
# lane 0 yields the info bits, lane 1 the channel noise.  Streams therefore
# depend only on (seed, cell, frame), never on worker count or batch order.
RNG_ALGORITHM = "philox4x64-10"
LANE_INFO = 0
LANE_NOISE = 1


def frame_rng(seed: int, cell: int, lane: int, frame: int) -> np.random.Generator:
    """The documented per-frame stream; reproducible by construction."""
    bg = np.random.Philox(key=[seed, cell], counter=[0, 0, lane, frame])
    return np.random.Generator(bg)


@dataclass(frozen=True)
class DecoderConfig:
    """Which decoder runs a point: "sc", or "scl" with a list size."""

    decoder: str
    list_size: int = 1
    exact: bool = True

    def __post_init__(self):
        if self.decoder not in ("sc", "scl"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.list_size < 1:
            raise ValueError(f"list size must be >= 1, got {self.list_size}")

    def label(self) -> str:
        return self.decoder


@dataclass(frozen=True)
class StopRule:
    """Stop at min_frame_errors, or at max_frames, whichever comes first."""

    min_frame_errors: int = 100
    max_frames: int = 10_000_000

    def __post_init__(self):
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")


@dataclass
class SimStats:
    """Counters for one (code, decoder, Eb/N0) cell plus derived rates."""

    ebno_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    ml_errors: int
    info_bits: int
    elapsed_seconds: float = 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.info_bits)

    @property
    def ml_fer(self) -> float:
        return self.ml_errors / self.frames


def ebno_to_sigma(ebno_db: float, rate: float) -> float:
    """Noise std-dev for unit-energy BPSK at the given Eb/N0 and code rate."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    return float(np.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))))


def channel_llr(codeword, sigma: float, noise) -> np.ndarray:
    """LLRs of codeword bits after BPSK over AWGN: 2 y / sigma^2, saturated."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    symbols = 1.0 - 2.0 * np.asarray(codeword, dtype=np.float64)
    y = symbols + sigma * np.asarray(noise, dtype=np.float64)
    return np.clip(2.0 * y / (sigma * sigma), -LLR_MAX, LLR_MAX)


@dataclass(frozen=True)
class _Cell:
    """Everything a worker needs to simulate any frame range of one cell."""

    spec: CodeSpec
    config: DecoderConfig
    ebno_db: float
    seed: int
    cell: int


class _Workspace:
    """Per-process decoder instances, reused across blocks of one cell."""

    def __init__(self, cell: _Cell):
        spec, config = cell.spec, cell.config
        mode = "sign" if config.decoder == "sc" else "list"
        L = 1 if config.decoder == "sc" else config.list_size
        self.engine = ListEngine(spec, L=L, mode=mode, exact=config.exact)
        self.force = (ListEngine(spec, mode="force", exact=config.exact,
                                 batch=self.engine.batch)
                      if config.decoder == "scl" else None)
        self.sigma = ebno_to_sigma(cell.ebno_db, spec.rate)

    def run_frames(self, cell: _Cell, start: int, count: int):
        """Per-frame error flags, info-bit error counts and ML flags."""
        spec = cell.spec
        K, N = spec.K, spec.N
        info = np.empty((count, K), dtype=np.uint8)
        noise = np.empty((count, N))
        for j in range(count):
            info[j] = frame_rng(cell.seed, cell.cell, LANE_INFO, start + j).integers(
                0, 2, size=K, dtype=np.uint8)
            noise[j] = frame_rng(cell.seed, cell.cell, LANE_NOISE, start + j).standard_normal(N)
        u = np.zeros((count, N), dtype=np.uint8)
        u[:, spec.info_set] = info
        x = transform(u, spec.n)
        llr = channel_llr(x, self.sigma, noise)
        got, pm, _ = self.engine.decode(llr)
        wrong = got != info
        err = wrong.any(axis=1)
        bit_errs = wrong.sum(axis=1, dtype=np.int64)
        ml = np.zeros(count, dtype=bool)
        if self.force is not None and err.any():
            bad = np.flatnonzero(err)
            _, forced, _ = self.force.decode(llr[bad], u_forced=u[bad])
            ml[bad] = pm[bad] <= forced
        return err, bit_errs, ml


_worker_cache: dict = {}


def _run_block(cell: _Cell, start: int, count: int):
    key = (cell.spec.label(), cell.spec.n, cell.spec.K,
           hash(cell.spec.info_set.tobytes()), cell.config, cell.ebno_db)
    ws = _worker_cache.get(key)
    if ws is None:
        _worker_cache.clear()  # one live workspace per process is plenty
        ws = _worker_cache[key] = _Workspace(cell)
    return ws.run_frames(cell, start, count)


def run_point(spec: CodeSpec, config: DecoderConfig, ebno_db: float,
              stop: StopRule = StopRule(), seed: int = 1, cell: int = 0,
              threads: int = 1) -> SimStats:
    """Monte-Carlo one cell until the stop rule fires.

    Frame f draws from streams derived only from (seed, cell, f), and the
    stop point is found on the frame-ordered error sequence, so the result
    is a pure function of (spec, config, ebno_db, stop, seed, cell) no
    matter how many workers execute the blocks.
    """
    t0 = time.perf_counter()
    ctx = _Cell(spec=spec, config=config, ebno_db=ebno_db, seed=seed, cell=cell)
    B = _block_size(spec, config)
    frames = errors = bits = ml = 0
    target = stop.min_frame_errors

    def consume(err, bit_errs, mlf):
        nonlocal frames, errors, bits, ml
        cum = errors + np.cumsum(err)
        if target > 0 and cum[-1] >= target:
            last = int(np.searchsorted(cum, target))  # frame where threshold lands
            err, bit_errs, mlf = err[:last + 1], bit_errs[:last + 1], mlf[:last + 1]
            done = True
        else:
            done = False
        frames += err.size
        errors += int(err.sum())
        bits += int(bit_errs.sum())
        ml += int(mlf.sum())
        return done

    if threads <= 1:
        start = 0
        while start < stop.max_frames:
            count = min(B, stop.max_frames - start)
            if consume(*_run_block(ctx, start, count)):
                break
            start += count
    else:
        starts = list(range(0, stop.max_frames, B))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            pending = {}
            nxt = 0
            for _ in range(min(threads + 2, len(starts))):
                s = starts[nxt]
                pending[nxt] = pool.submit(_run_block, ctx, s,
                                           min(B, stop.max_frames - s))
                nxt += 1
            served = 0
            while served in pending:
                res = pending.pop(served).result()
                served += 1
                if nxt < len(starts):
                    s = starts[nxt]
                    pending[nxt] = pool.submit(_run_block, ctx, s,
                                               min(B, stop.max_frames - s))
                    nxt += 1
                if consume(*res):
                    for fut in pending.values():
                        fut.cancel()
                    break
    return SimStats(ebno_db=ebno_db, frames=frames, frame_errors=errors,
                    bit_errors=bits, ml_errors=ml, info_bits=spec.K,
                    elapsed_seconds=time.perf_counter() - t0)


def run_sweep(specs, configs, ebno_grid, stop: StopRule = StopRule(),
              seed: int = 1, threads: int = 1):
    """Cartesian (spec, config, ebno) sweep; one row per cell, stable order.

    Cell c in row-major order (ebno fastest) seeds its streams with
    (seed, c), so adding grid points changes no existing cell's draw.
    """
    rows = []
    cell = 0
    for spec in specs:
        for config in configs:
            for ebno in ebno_grid:
                stats = run_point(spec, config, ebno, stop=stop, seed=seed,
                                  cell=cell, threads=threads)
                rows.append((spec, config, stats))
                cell += 1
    return rows


def _block_size(spec: CodeSpec, config: DecoderConfig) -> int:
    L = config.list_size if config.decoder == "scl" else 1
    return default_batch(spec.N, L)
