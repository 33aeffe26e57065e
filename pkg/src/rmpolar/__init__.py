"""Workbench for polar, Reed-Muller and hybrid RM-polar block codes.

Construction (erasure-channel reliability evolution and row-weight rules),
encoding, successive-cancellation and list decoding over LLRs, brute-force
minimum distance, and a reproducible BPSK/AWGN Monte-Carlo simulator.
"""
from .codebook import CodeSpec, encode, kron_row_weight, transform
from .construct import (Infeasible, ReliabilityProfile, build_code_spec,
                        evolve_bhattacharyya, select_polar, select_rm,
                        select_rm_polar)
from .distance import BudgetExceeded, DistanceReport, brute_force_min_distance, min_row_weight
from .sc import f_combine, g_combine, sc_decode
from .scl import (DecodeResult, LLR_MAX, ListEngine, default_batch,
                  forced_path_metric, ml_error_witness, path_metric_update,
                  scl_decode)
from .sim import (DecoderConfig, RNG_ALGORITHM, SimStats, StopRule,
                  channel_llr, ebno_to_sigma, frame_rng, run_point, run_sweep)

__all__ = [
    "CodeSpec", "encode", "kron_row_weight", "transform",
    "Infeasible", "ReliabilityProfile", "build_code_spec",
    "evolve_bhattacharyya", "select_polar", "select_rm", "select_rm_polar",
    "BudgetExceeded", "DistanceReport", "brute_force_min_distance",
    "min_row_weight",
    "f_combine", "g_combine", "sc_decode",
    "DecodeResult", "LLR_MAX", "ListEngine", "default_batch",
    "forced_path_metric", "ml_error_witness", "path_metric_update",
    "scl_decode",
    "DecoderConfig", "RNG_ALGORITHM", "SimStats", "StopRule", "channel_llr",
    "ebno_to_sigma", "frame_rng", "run_point", "run_sweep",
]

__version__ = "0.1.0"
