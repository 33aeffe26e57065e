"""Successive-cancellation decoding over LLRs.

The batched chain engine is shared with the list decoder and lives in
:mod:`.scl`; plain SC runs it with a single lane and sign decisions.
"""
from __future__ import annotations

import numpy as np

from .codebook import CodeSpec, encode
from .scl import LLR_MAX, DecodeResult, ListEngine, _check_llr


def f_combine(a, b, exact: bool = True):
    """Check-node combine: 2 atanh(tanh(a/2) tanh(b/2)) in stable form.

    Computed as logaddexp(0, a+b) - logaddexp(a, b); the magnitude never
    exceeds min(|a|, |b|), so saturation is inherited from the inputs.
    Min-sum mode: sign(a) sign(b) min(|a|, |b|).
    """
    a = np.clip(np.asarray(a, dtype=np.float64), -LLR_MAX, LLR_MAX)
    b = np.clip(np.asarray(b, dtype=np.float64), -LLR_MAX, LLR_MAX)
    if exact:
        return np.logaddexp(0.0, a + b) - np.logaddexp(a, b)
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def g_combine(a, b, u):
    """Variable-node combine with partial sum: b + (1-2u) a, saturated."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    u = np.asarray(u)
    return np.clip(b + np.where(u == 1, -a, a), -LLR_MAX, LLR_MAX)


def sc_decode(spec: CodeSpec, y, exact: bool = True) -> DecodeResult:
    """Decode one LLR word bit by bit.

    Frozen positions decide 0; info positions decide by LLR sign, ties
    toward 0.  The returned path metric accumulates the same per-decision
    penalty the list decoder uses, so values are directly comparable.
    """
    y = _check_llr(spec, y)
    eng = ListEngine(spec, mode="sign", exact=exact, batch=1)
    info, pm, _ = eng.decode(y[None, :])
    return DecodeResult(info=info[0], codeword=encode(spec, info[0]),
                        path_metric=float(pm[0]))
