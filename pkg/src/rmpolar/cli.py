"""Command-line front end: construct, simulate, encode, decode, mindist."""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .codebook import CodeSpec, encode, kron_row_weight
from .construct import Infeasible, build_code_spec, evolve_bhattacharyya
from .distance import BudgetExceeded, brute_force_min_distance, min_row_weight
from .scl import LLR_MAX, scl_decode
from .sc import sc_decode
from .sim import DecoderConfig, RNG_ALGORITHM, StopRule, run_sweep

CSV_HEADER = ("code,decoder,list_size,ebno_db,frames,frame_errors,bit_errors,"
              "ml_errors,fer,ber,ml_fer,seed,elapsed_seconds")


def bits_to_hex(bits) -> str:
    """Bit 0 becomes the MSB of the first hex digit; width covers all bits."""
    bits = np.asarray(bits, dtype=np.uint8)
    padded = np.concatenate([np.zeros((-bits.size) % 8, np.uint8), bits])
    value = int.from_bytes(np.packbits(padded).tobytes(), "big")
    return "0x" + format(value, "X").zfill((bits.size + 3) // 4)


def hex_to_bits(text: str, nbits: int) -> np.ndarray:
    value = int(text, 16)
    if value < 0 or value >> nbits:
        raise ValueError(f"{text} does not fit in {nbits} bits")
    raw = np.frombuffer(value.to_bytes((nbits + 7) // 8, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[-nbits:]


def spec_to_json(spec: CodeSpec) -> dict:
    construction = {"type": spec.construction, "z0": spec.z0}
    if spec.w_min is not None:
        construction["w_min"] = spec.w_min
    return {"n": spec.n, "K": spec.K, "construction": construction,
            "info_set": [int(i) for i in spec.info_set]}


def load_spec(path: str) -> CodeSpec:
    """Read a spec file, rebuilding and cross-checking any stored info_set."""
    with open(path) as fh:
        doc = json.load(fh)
    cons = doc["construction"]
    spec = build_code_spec(doc["n"], doc["K"], cons["type"],
                           z0=cons.get("z0", 0.5), w_min=cons.get("w_min"))
    stored = doc.get("info_set")
    if stored is not None and not np.array_equal(np.asarray(stored), spec.info_set):
        raise ValueError(f"{path}: stored info_set does not match its "
                         "construction parameters (defaults drifted?)")
    return spec


def _parse_ebno(text: str) -> list[float]:
    """Either comma-separated values or an inclusive start:step:stop range."""
    if ":" in text:
        start, step, stop = (float(p) for p in text.split(":"))
        if step <= 0:
            raise ValueError("ebno range step must be positive")
        count = int(round((stop - start) / step)) + 1
        if count < 1:
            raise ValueError("empty ebno range")
        return [start + k * step for k in range(count)]
    return [float(p) for p in text.split(",")]


def _g(x: float) -> str:
    return format(x, ".6g")


def cmd_construct(args) -> int:
    spec = build_code_spec(args.n, args.k, args.type, z0=args.z0, w_min=args.wmin)
    doc = spec_to_json(spec)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
    if args.profile:
        profile = evolve_bhattacharyya(spec.z0, spec.n)
        z = profile.z
        order = np.lexsort((-np.arange(z.size), z))
        with open(args.profile, "w") as fh:
            fh.write("rank,index,z,row_weight\n")
            for rank, idx in enumerate(order):
                fh.write(f"{rank},{idx},{_g(z[idx])},"
                         f"{kron_row_weight(int(idx), spec.n)}\n")
    if args.json:
        json.dump(doc, sys.stdout)
        print()
    else:
        print(f"{spec.label()}: N={spec.N} K={spec.K} "
              f"min_row_weight={min_row_weight(spec)}")
        if args.out:
            print(f"wrote {args.out}")
        if args.profile:
            print(f"wrote {args.profile}")
    return 0


def cmd_simulate(args) -> int:
    specs = [load_spec(p) for p in args.spec]
    config = DecoderConfig(decoder=args.decoder,
                           list_size=args.list_size if args.decoder == "scl" else 1,
                           exact=not args.approx)
    grid = _parse_ebno(args.ebno)
    stop = StopRule(min_frame_errors=args.min_errors, max_frames=args.max_frames)
    rows = run_sweep(specs, [config], grid, stop=stop, seed=args.seed,
                     threads=args.threads)
    lines = [CSV_HEADER]
    for spec, cfg, st in rows:
        elapsed = st.elapsed_seconds if args.timing else 0.0
        lines.append(",".join([
            spec.label(), cfg.label(), str(cfg.list_size), _g(st.ebno_db),
            str(st.frames), str(st.frame_errors), str(st.bit_errors),
            str(st.ml_errors), _g(st.fer), _g(st.ber), _g(st.ml_fer),
            str(args.seed), _g(elapsed)]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.gnuplot:
        _write_gnuplot(args.gnuplot, args.out or "results.csv", rows)
    if args.json:
        doc = [{"code": spec.label(), "decoder": cfg.label(),
                "list_size": cfg.list_size, "ebno_db": st.ebno_db,
                "frames": st.frames, "frame_errors": st.frame_errors,
                "bit_errors": st.bit_errors, "ml_errors": st.ml_errors,
                "fer": st.fer, "ber": st.ber, "ml_fer": st.ml_fer,
                "seed": args.seed, "elapsed_seconds": st.elapsed_seconds}
               for spec, cfg, st in rows]
        json.dump(doc, sys.stdout)
        print()
    else:
        print(f"{'code':<18} {'dec':<4} {'L':>4} {'ebno':>6} {'frames':>9} "
              f"{'errors':>7} {'fer':>10} {'ml_fer':>10} {'secs':>8}")
        for spec, cfg, st in rows:
            print(f"{spec.label():<18} {cfg.label():<4} {cfg.list_size:>4} "
                  f"{st.ebno_db:>6.2f} {st.frames:>9} {st.frame_errors:>7} "
                  f"{st.fer:>10.3e} {st.ml_fer:>10.3e} "
                  f"{st.elapsed_seconds:>8.1f}")
        if args.out:
            print(f"wrote {args.out}")
    return 0


def _write_gnuplot(path: str, csv_path: str, rows) -> None:
    series = []
    for spec, cfg, _ in rows:
        key = (spec.label(), cfg.label(), cfg.list_size)
        if key not in series:
            series.append(key)
    plots = []
    for code, dec, L in series:
        sel = f'(strcol(1) eq "{code}" && strcol(2) eq "{dec}" && $3 == {L})'
        title = f"{code} {dec}" + (f" L={L}" if dec == "scl" else "")
        plots.append(f"'{csv_path}' using ({sel} ? $4 : NaN):9 "
                     f"with linespoints title '{title}'")
        if dec == "scl":
            plots.append(f"'{csv_path}' using ({sel} ? $4 : NaN):11 "
                         f"with lines dashtype 2 title '{title} ML bound'")
    with open(path, "w") as fh:
        fh.write("set datafile separator ','\n"
                 "set logscale y\n"
                 "set grid\n"
                 "set xlabel 'Eb/N0 (dB)'\n"
                 "set ylabel 'FER'\n"
                 "set key bottom left\n"
                 "plot " + ", \\\n     ".join(plots) + "\n")


def cmd_encode(args) -> int:
    spec = load_spec(args.spec)
    info = hex_to_bits(args.info, spec.K)
    word = encode(spec, info)
    if args.json:
        json.dump({"codeword": bits_to_hex(word)}, sys.stdout)
        print()
    else:
        print(bits_to_hex(word))
    return 0


def cmd_decode(args) -> int:
    spec = load_spec(args.spec)
    if args.llr_file:
        llr = np.fromfile(args.llr_file, dtype="<f4").astype(np.float64)
    else:
        llr = np.array([float(p) for p in args.llr.split(",")])
    if llr.size != spec.N:
        raise ValueError(f"expected {spec.N} LLRs, got {llr.size}")
    llr = np.clip(llr, -LLR_MAX, LLR_MAX)
    if args.decoder == "sc":
        result = sc_decode(spec, llr, exact=not args.approx)
    else:
        result = scl_decode(spec, llr, L=args.list_size, exact=not args.approx)
    if args.json:
        json.dump({"info": bits_to_hex(result.info),
                   "path_metric": result.path_metric}, sys.stdout)
        print()
    else:
        print(f"{bits_to_hex(result.info)} path_metric={_g(result.path_metric)}")
    return 0


def cmd_mindist(args) -> int:
    spec = load_spec(args.spec)
    try:
        report = brute_force_min_distance(spec, budget=args.budget)
        doc = {"upper_bound": report.upper_bound, "exact": report.exact,
               "witness": bits_to_hex(report.witness)}
    except BudgetExceeded:
        # bound only; the witness is the unit word on a lightest selected row
        weights = [kron_row_weight(int(i), spec.n) for i in spec.info_set]
        unit = np.zeros(spec.K, dtype=np.uint8)
        unit[int(np.argmin(weights))] = 1
        doc = {"upper_bound": min_row_weight(spec), "witness": bits_to_hex(unit)}
    json.dump(doc, sys.stdout)
    print()
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    seed_default = int(os.environ.get("RMPOLAR_SEED", "1"))
    threads_default = int(os.environ.get("RMPOLAR_THREADS", "1"))
    p = _Parser(prog="rmpolar",
                description="Polar / RM / RM-Polar code workbench "
                            f"(frame streams: {RNG_ALGORITHM})")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a code and write its spec file")
    c.add_argument("--n", type=int, required=True, help="block exponent, N=2^n")
    c.add_argument("--k", type=int, required=True, help="information bits")
    c.add_argument("--type", choices=["polar", "rm", "rmpolar"], required=True)
    c.add_argument("--z0", type=float, default=0.5, help="design erasure probability")
    c.add_argument("--wmin", type=int, help="row-weight floor (rmpolar)")
    c.add_argument("--out", help="spec file path")
    c.add_argument("--profile", help="write (rank,index,z,row_weight) CSV")
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_construct)

    s = sub.add_parser("simulate", help="Monte-Carlo FER/BER over an Eb/N0 grid")
    s.add_argument("--spec", nargs="+", required=True, help="spec file(s)")
    s.add_argument("--decoder", choices=["sc", "scl"], default="scl")
    s.add_argument("--list-size", type=int, default=32)
    s.add_argument("--ebno", required=True,
                   help="grid: comma list or start:step:stop (dB)")
    s.add_argument("--min-errors", type=int, default=100,
                   help="frame errors to stop a point at")
    s.add_argument("--max-frames", type=int, default=10_000_000)
    s.add_argument("--seed", type=int, default=seed_default)
    s.add_argument("--threads", type=int, default=threads_default)
    s.add_argument("--approx", action="store_true",
                   help="min-sum combines and metrics (speed studies only)")
    s.add_argument("--timing", action="store_true",
                   help="real elapsed seconds in the CSV (breaks byte-identity)")
    s.add_argument("--out", help="results CSV path")
    s.add_argument("--gnuplot", help="write a gnuplot script for the CSV")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_simulate)

    e = sub.add_parser("encode", help="encode hex info bits to a hex codeword")
    e.add_argument("--spec", required=True)
    e.add_argument("--info", required=True, help="K bits as hex, bit 0 first")
    e.add_argument("--json", action="store_true")
    e.set_defaults(fn=cmd_encode)

    d = sub.add_parser("decode", help="decode N channel LLRs to hex info bits")
    d.add_argument("--spec", required=True)
    d.add_argument("--llr", help="comma-separated reals, index 0 first")
    d.add_argument("--llr-file", help="binary little-endian float32 file")
    d.add_argument("--decoder", choices=["sc", "scl"], default="sc")
    d.add_argument("--list-size", type=int, default=8)
    d.add_argument("--approx", action="store_true")
    d.add_argument("--json", action="store_true")
    d.set_defaults(fn=cmd_decode)

    m = sub.add_parser("mindist", help="minimum-distance report as JSON")
    m.add_argument("--spec", required=True)
    m.add_argument("--budget", type=int, default=24,
                   help="max K for exact enumeration")
    m.set_defaults(fn=cmd_mindist)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "decode" and not (args.llr or args.llr_file):
            parser.error("decode needs --llr or --llr-file")
        return args.fn(args)
    except SystemExit as ex:
        return int(ex.code or 0)
    except Infeasible as ex:
        print(f"infeasible construction: eligible={ex.eligible}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
