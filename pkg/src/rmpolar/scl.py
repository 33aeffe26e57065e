"""SC-List decoding: batched path engine, path metrics, and the ML-bound witness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import CodeSpec, as_bits, encode

LLR_MAX = 300.0


def path_metric_update(pm, llr, u, exact: bool = True):
    """pm + ln(1 + exp(-(1-2u) llr)), the log-domain penalty of deciding u.

    Approximation mode adds |llr| when the decision conflicts with the
    LLR sign and nothing otherwise.
    """
    pm = np.asarray(pm, dtype=np.float64)
    llr = np.asarray(llr, dtype=np.float64)
    signed = np.where(np.asarray(u) == 1, llr, -llr)
    if exact:
        return pm + np.logaddexp(0.0, signed)
    return pm + np.where(signed > 0, signed, 0.0)


@dataclass
class DecodeResult:
    """Decoder output: info bits, re-encoded codeword, final path metric.

    ``ml_witness`` is None unless the transmitted word was supplied; True
    means the decoder erred although the transmitted word's forced metric
    strictly beat the winner, i.e. the list lost it before the end.
    """

    info: np.ndarray
    codeword: np.ndarray
    path_metric: float
    ml_witness: bool | None = None


class ListEngine:
    """Batched successive-cancellation engine over frames x lanes.

    One instance per worker; buffers are preallocated for up to ``batch``
    frames and reused across calls (not thread-safe).  Lane state lives in
    per-stage banks; forks never copy banks, they compose per-lane lineage
    maps instead, so cloning a path is O(1) and memory stays O(L N) per
    frame.  A full-bank write resets that bank's lineage to the identity.

    Modes: "list" forks every info bit and keeps the L best paths;
    "sign" decides by LLR sign with a single lane (plain SC);
    "force" replays a supplied input word, accumulating its metric.
    """

    def __init__(self, spec: CodeSpec, L: int = 1, mode: str = "list",
                 exact: bool = True, batch: int | None = None):
        if mode not in ("list", "sign", "force"):
            raise ValueError(f"unknown mode {mode!r}")
        if L < 1:
            raise ValueError(f"list size must be >= 1, got {L}")
        self.spec = spec
        self.mode = mode
        self.exact = exact
        self.L = L if mode == "list" else 1
        self.batch = batch if batch is not None else default_batch(spec.N, self.L)
        n, L, B = spec.n, self.L, self.batch
        self.n = n
        self.N = spec.N
        self.info_mask = spec.info_mask
        self._llr = [np.empty((B, L, 1 << s)) for s in range(n)]
        self._scr = [np.empty((B, L, 1 << s)) for s in range(n)]
        self._cs0 = [np.empty((B, L, 1 << s), dtype=np.uint8) for s in range(n)]
        self._cs1 = [np.empty((B, L, 1 << s), dtype=np.uint8) for s in range(n)]
        # lineage rows: s -> llr[s]; n+s -> cs0[s]; 2n+s -> cs1[s]
        # two buffers so fork-time composition ping-pongs without allocating
        self._lin = np.empty((3 * n, B, L), dtype=np.intp)
        self._lin2 = np.empty((3 * n, B, L), dtype=np.intp)
        self._ident = np.empty(3 * n, dtype=bool)
        self._pm = np.empty((B, L))
        self._cand = np.empty((B, 2 * L))
        self._pmap = np.empty((B, L), dtype=np.intp)
        self._iden = np.arange(L, dtype=np.intp)

    def decode(self, llr_ch: np.ndarray, u_forced: np.ndarray | None = None,
               trace: list | None = None):
        """Decode a (frames, N) LLR batch.

        Returns (info, pm, act): decided info bits (frames, K), the winning
        path metric per frame, and the number of live lanes.  In force mode
        info is None.  Use :meth:`last_list` afterwards for the full list.
        """
        n, N, L = self.n, self.N, self.L
        f = llr_ch.shape[0]
        if llr_ch.ndim != 2 or llr_ch.shape[1] != N:
            raise ValueError(f"expected (frames, {N}) LLRs")
        if f > self.batch:
            raise ValueError(f"batch capacity {self.batch} exceeded: {f}")
        if self.mode == "force":
            if u_forced is None:
                raise ValueError("force mode needs the input word")
            u_forced = np.asarray(u_forced, dtype=np.uint8)
            if np.any(u_forced[:, ~self.info_mask]):
                raise ValueError("forced word sets a frozen position")
        llr = [bank[:f] for bank in self._llr]
        scr = [bank[:f] for bank in self._scr]
        cs0 = [bank[:f] for bank in self._cs0]
        cs1 = [bank[:f] for bank in self._cs1]
        lin = self._lin[:, :f]
        lin_alt = self._lin2[:, :f]
        iden = self._iden
        lin[:] = iden
        ident = self._ident
        ident[:] = True
        pm = self._pm[:f]
        pm[:] = np.inf
        pm[:, 0] = 0.0
        act = 1
        steps: list[tuple[np.ndarray, np.ndarray | None]] = []
        af2 = np.arange(f)[:, None]
        exact = self.exact
        info_mask = self.info_mask
        mode = self.mode

        for i in range(N):
            # recompute the LLR chain for stages top .. 0
            top = n - 1 if i == 0 else ((i & -i).bit_length() - 1)
            for s in range(top, -1, -1):
                h = 1 << s
                if s == n - 1:
                    a = llr_ch[:, None, :h]
                    b = llr_ch[:, None, h:]
                else:
                    src = llr[s + 1]
                    if ident[s + 1]:
                        a = src[:, :act, :h]
                        b = src[:, :act, h:]
                    else:
                        rows = lin[s + 1, :, :act]
                        gat = src[af2, rows]
                        a = gat[..., :h]
                        b = gat[..., h:]
                dst = llr[s][:, :act]
                if (i >> s) & 1 == 0:
                    if exact:
                        # f = logaddexp(0, a+b) - logaddexp(a, b); |f| <= min(|a|,|b|)
                        # so the saturation bound is inherited from the inputs
                        t = scr[s][:, :act]
                        np.add(a, b, out=t)
                        np.logaddexp(0.0, t, out=t)
                        np.logaddexp(a, b, out=dst)
                        np.subtract(t, dst, out=dst)
                    else:
                        t = scr[s][:, :act]
                        np.minimum(np.abs(a), np.abs(b), out=t)
                        np.multiply(np.sign(a), np.sign(b), out=dst)
                        np.multiply(dst, t, out=dst)
                else:
                    if ident[n + s]:
                        u = cs0[s][:, :act]
                    else:
                        u = cs0[s][af2, lin[n + s, :, :act]]
                    np.multiply(a, 1.0 - 2.0 * u, out=dst)
                    np.add(dst, b, out=dst)
                    np.clip(dst, -LLR_MAX, LLR_MAX, out=dst)
                lin[s] = iden
                ident[s] = True
            llr0 = llr[0][:, :act, 0]

            # decide bit i, forking in list mode
            if not info_mask[i]:
                pm[:, :act] += self._penalty(-llr0)
                bits = np.zeros((f, act), dtype=np.uint8)
            elif mode == "sign":
                bits = (llr0 < 0).view(np.uint8)
                pm[:, :act] += self._penalty(np.where(bits == 1, llr0, -llr0))
                steps.append((bits.copy(), None))
            elif mode == "force":
                bits = np.broadcast_to(u_forced[:, i, None], (f, act))
                pm[:, :act] += self._penalty(np.where(bits == 1, llr0, -llr0))
            else:
                sp0 = self._penalty(-llr0)
                cand = self._cand[:f, :2 * act]
                np.add(pm[:, :act], sp0, out=cand[:, :act])
                if exact:
                    np.add(cand[:, :act], llr0, out=cand[:, act:])
                else:
                    np.add(pm[:, :act], self._penalty(llr0), out=cand[:, act:])
                if 2 * act <= L:
                    parents = np.broadcast_to(np.concatenate([np.arange(act)] * 2),
                                              (f, 2 * act))
                    bits = np.broadcast_to(
                        np.repeat(np.array([0, 1], dtype=np.uint8), act), (f, 2 * act))
                    pm[:, :2 * act] = cand
                    act *= 2
                else:
                    # stable sort realizes the tie-break: equal metrics keep
                    # the u=0 block first, then the lower parent slot
                    sel = np.argsort(cand, axis=1, kind="stable")[:, :L]
                    parents = sel % act
                    bits = (sel >= act).view(np.uint8)
                    pm[:] = np.take_along_axis(cand, sel, axis=1)
                    act = L
                pmap = self._pmap[:f]
                pmap[:] = iden
                pmap[:, :parents.shape[1]] = parents
                flat = (af2 * L + pmap).ravel()
                np.take(lin.reshape(3 * n, f * L), flat, axis=1,
                        out=lin_alt.reshape(3 * n, f * L))
                lin, lin_alt = lin_alt, lin
                ident[:] = False
                steps.append((bits, parents))
                if trace is not None:
                    trace.append({"index": i, "pm": pm[:, :act].copy(),
                                  "cand": cand.copy(), "parents": parents.copy()})
            if trace is not None and (not info_mask[i] or mode != "list"):
                trace.append({"index": i, "pm": pm[:, :act].copy(),
                              "cand": None, "parents": None})

            # push the decision into the partial-sum banks
            side = i & 1
            (cs1 if side else cs0)[0][:, :act, 0] = bits
            row = (2 * n if side else n)
            lin[row] = iden
            ident[row] = True
            if i == N - 1:
                break
            s = 0
            while (i >> s) & 1:
                if ident[n + s]:
                    left = cs0[s][:, :act]
                else:
                    left = cs0[s][af2, lin[n + s, :, :act]]
                if ident[2 * n + s]:
                    right = cs1[s][:, :act]
                else:
                    right = cs1[s][af2, lin[2 * n + s, :, :act]]
                nxt = (i >> (s + 1)) & 1
                dst = (cs1 if nxt else cs0)[s + 1]
                h = 1 << s
                np.bitwise_xor(left, right, out=dst[:, :act, :h])
                dst[:, :act, h:] = right
                row = (2 * n if nxt else n) + s + 1
                lin[row] = iden
                ident[row] = True
                s += 1

        self._last = (f, act, steps)
        if mode == "force":
            return None, pm[:, 0].copy(), act
        if mode == "sign":
            K = self.spec.K
            info = np.empty((f, K), dtype=np.uint8)
            for t, (b, _) in enumerate(steps):
                info[:, t] = b[:, 0]
            return info, pm[:, 0].copy(), act
        w = np.argmin(pm[:, :act], axis=1)
        return self._traceback(f, steps, w), pm[af2[:, 0], w], act

    def last_list(self):
        """Info bits and metrics of every lane surviving the last decode.

        Returns (info, pm) with shapes (frames, act, K) and (frames, act),
        metric-sorted per frame (ties keep lane order).
        """
        f, act, steps = self._last
        pm = self._pm[:f, :act]
        order = np.argsort(pm, axis=1, kind="stable")
        info = np.empty((f, act, self.spec.K), dtype=np.uint8)
        for lane in range(act):
            info[:, lane] = self._traceback(f, steps, order[:, lane])
        return info, np.take_along_axis(pm, order, axis=1)

    def _traceback(self, f: int, steps, lane: np.ndarray) -> np.ndarray:
        af = np.arange(f)
        info = np.empty((f, len(steps)), dtype=np.uint8)
        lane = lane.copy()
        for t in range(len(steps) - 1, -1, -1):
            bits, parents = steps[t]
            info[:, t] = bits[af, lane]
            if parents is not None:
                lane = parents[af, lane]
        return info

    def _penalty(self, signed_llr):
        """Penalty of a decision whose agreement-signed LLR is given."""
        if self.exact:
            return np.logaddexp(0.0, signed_llr)
        return np.maximum(signed_llr, 0.0)


def default_batch(N: int, L: int) -> int:
    """Frames decoded per engine pass: largest power of two with modest banks."""
    cap = max(1, min(128, (1 << 23) // (max(L, 1) * N)))
    return 1 << (cap.bit_length() - 1)


def scl_decode(spec: CodeSpec, y, L: int, exact: bool = True,
               transmitted_u=None, return_list: bool = False,
               trace: list | None = None):
    """List-decode one LLR word; lowest-metric path wins (no CRC selection).

    With ``transmitted_u`` the result's ml_witness reports whether that
    word's forced metric strictly beats every surviving path.  With
    ``return_list`` a second value carries the full metric-sorted list as
    (info, path_metric) pairs.
    """
    y = _check_llr(spec, y)
    eng = ListEngine(spec, L=L, mode="list", exact=exact, batch=1)
    info, pm, _ = eng.decode(y[None, :], trace=trace)
    result = DecodeResult(info=info[0], codeword=encode(spec, info[0]),
                          path_metric=float(pm[0]))
    if transmitted_u is not None:
        forced = forced_path_metric(spec, y, transmitted_u, exact=exact)
        tx = np.asarray(transmitted_u, dtype=np.uint8)[spec.info_set]
        # bits first: list and force mode may round the same sum apart
        result.ml_witness = bool(not np.array_equal(result.info, tx)
                                 and forced < result.path_metric)
    if return_list:
        linfo, lpm = eng.last_list()
        return result, [(linfo[0, j], float(lpm[0, j])) for j in range(lpm.shape[1])]
    return result


def forced_path_metric(spec: CodeSpec, y, u_full, exact: bool = True) -> float:
    """Metric accumulated when every decision is forced to ``u_full``.

    Same update rule and schedule as list decoding, so the value is
    comparable with DecodeResult.path_metric.
    """
    y = _check_llr(spec, y)
    u_full = as_bits(u_full, spec.N)
    eng = ListEngine(spec, mode="force", exact=exact, batch=1)
    _, pm, _ = eng.decode(y[None, :], u_forced=u_full[None, :])
    return float(pm[0])


def ml_error_witness(decoded: DecodeResult, transmitted_info,
                     forced_pm_of_transmitted: float) -> bool:
    """True iff the frame counts toward the ML lower bound.

    The decoder erred and its winner is at least as likely as the
    transmitted word, so genuine ML decoding had no better evidence.
    """
    transmitted_info = np.asarray(transmitted_info, dtype=np.uint8)
    if np.array_equal(decoded.info, transmitted_info):
        return False
    return decoded.path_metric <= forced_pm_of_transmitted


def _check_llr(spec: CodeSpec, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (spec.N,):
        raise ValueError(f"expected {spec.N} LLRs, got shape {y.shape}")
    return np.clip(y, -LLR_MAX, LLR_MAX)
