"""Command-line interface.

CSV goes to stdout (or ``--out``); human-readable summaries go to stderr.
Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .harness import SimConfig, default_threads, run_fer, write_csv
from .latency_model import code_bounds
from .node_classifier import FEATURE_SETS, SNFSC, classify, count_sr1spc
from .polar_code import (
    FIVE_G,
    GAUSSIAN_APPROX,
    code_from_mapping,
    dump_descriptor,
    encode,
    k_for_rate,
    parse_kv,
)


class ConfigError(Exception):
    """Invalid user configuration (exit code 2)."""


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]
    except ValueError as e:
        raise ConfigError(f"bad number list {text!r}") from e


def _add_code_args(p):
    g = p.add_argument_group("code")
    g.add_argument("--code", metavar="FILE", help="code descriptor file (key=value)")
    g.add_argument("--n", type=int, help="log2 code length")
    g.add_argument("--k", type=int, help="information length")
    g.add_argument("--rate", help="nominal rate such as 1/2, used when --k is absent")
    g.add_argument("--rounding", choices=("floor", "round", "ceil"), default="floor", help="K rounding for --rate")
    g.add_argument("--construction", choices=(FIVE_G, GAUSSIAN_APPROX), default=None)
    g.add_argument("--design-snr-db", type=float, default=None, help="GA design Eb/N0")
    g.add_argument("--frozen", help="explicit 0-based frozen indices, comma separated")


def _add_out(p):
    p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")


def _code_mapping(args, base: dict | None = None) -> dict:
    d = dict(base or {})
    if args.code:
        try:
            d.update({k.lower(): v for k, v in parse_kv(Path(args.code).read_text()).items()})
        except OSError as e:
            raise ConfigError(f"cannot read descriptor: {e}") from e
    if args.n is not None:
        d["n"] = args.n
    if args.k is not None:
        d["k"] = args.k
    elif args.rate is not None:
        if "n" not in d:
            raise ConfigError("--rate needs --n")
        try:
            d["k"] = k_for_rate(1 << int(d["n"]), args.rate, args.rounding)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"bad rate {args.rate!r}") from e
    if args.construction is not None:
        d["construction"] = args.construction
    if args.design_snr_db is not None:
        d["design_snr_db"] = args.design_snr_db
    if args.frozen is not None:
        d["frozen"] = args.frozen
    return d


def _build_code(args, base=None):
    d = _code_mapping(args, base)
    try:
        return code_from_mapping(d)
    except (ValueError, KeyError) as e:
        raise ConfigError(str(e)) from e


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def cmd_construct(args) -> int:
    code = _build_code(args)
    print(f"N={code.N} K={code.K} construction={code.construction}", file=sys.stderr)
    if args.descriptor:
        _emit(args, dump_descriptor(code))
    else:
        rows = [(i, int(b)) for i, b in enumerate(code.indicator)]
        _emit(args, _rows_csv(rows, ("index", "info")))
    return 0


def cmd_classify(args) -> int:
    code = _build_code(args)
    plan = classify(code, args.features, args.min_basic_len, args.min_seq_len)
    print(plan.render(), file=sys.stderr)
    hist = count_sr1spc(plan, include_nested=args.all, include_empty=args.all)
    print(f"SR1/SPC nodes: {sum(hist.values())}", file=sys.stderr)
    _emit(args, _rows_csv(sorted(hist.items()), ("length", "count")))
    return 0


def cmd_encode(args) -> int:
    code = _build_code(args)
    if args.msg is not None:
        bits = args.msg.replace(",", "").strip()
        if any(ch not in "01" for ch in bits):
            raise ConfigError("--msg must be a 0/1 string")
        msg = np.array([int(ch) for ch in bits], dtype=np.uint8)
        if msg.size != code.K:
            raise ConfigError(f"--msg has {msg.size} bits, K={code.K}")
    else:
        msg = np.random.default_rng(args.seed).integers(0, 2, code.K, dtype=np.uint8)
    x = encode(code, msg)
    text = _rows_csv([("".join(map(str, msg)), "".join(map(str, x)))], ("message", "codeword"))
    _emit(args, text)
    return 0


def _sim_settings(args):
    cfg = {}
    if args.config:
        try:
            cfg = parse_kv(Path(args.config).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from e
        except ValueError as e:
            raise ConfigError(str(e)) from e
    code_keys = {"n", "k", "construction", "design_snr_db", "frozen"}
    code = _build_code(args, {k: v for k, v in cfg.items() if k in code_keys})
    if code.K == 0:
        raise ConfigError("code has zero rate")

    def pick(name, cli, conv, default):
        if cli is not None:
            return cli
        if name in cfg:
            try:
                return conv(cfg[name])
            except ValueError as e:
                raise ConfigError(f"bad value for {name}: {cfg[name]!r}") from e
        return default

    return code, pick


def cmd_fer_sim(args) -> int:
    code, pick = _sim_settings(args)
    grid = _float_list(pick("ebn0", args.ebn0, str, "1,2,3"))
    decoders = tuple(d.strip() for d in pick("decoders", args.decoders, str, "sc,snfsc").split(",") if d.strip())
    try:
        threads = pick("threads", args.threads, int, None) or default_threads()
        cfg = SimConfig(
            code=code,
            ebn0_grid=tuple(grid),
            max_frames=pick("max_frames", args.max_frames, int, 100_000),
            min_frame_errors=pick("min_errors", args.min_errors, int, 100),
            seed=pick("seed", args.seed, int, 0),
            decoders=decoders,
            threads=threads,
            chunk_size=pick("chunk_size", args.chunk_size, int, 1000),
            m_policy=pick("m_policy", args.m_policy, str, "joint"),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e

    def progress(ebn0, frames, errs):
        if args.verbose:
            print(f"  Eb/N0={ebn0:g} frames={frames} errors={errs}", file=sys.stderr)

    res = run_fer(cfg, progress)
    for p in res.points:
        print(f"{p.decoder:6s} Eb/N0={p.ebn0_db:5.2f} frames={p.frames:8d} errors={p.frame_errors:6d} "
              f"FER={p.fer:.3e} steps={p.mean_steps:.2f}", file=sys.stderr)
    buf = io.StringIO()
    write_csv(res.rows(), buf)
    _emit(args, buf.getvalue())
    return 0


def cmd_latency(args) -> int:
    code = _build_code(args)
    rows = []
    features = [f.strip() for f in args.features.split(",") if f.strip()]
    for f in features:
        if f not in FEATURE_SETS:
            raise ConfigError(f"unknown feature set {f!r}")
    grid = _float_list(args.ebn0) if args.ebn0 else []
    for f in features:
        plan = classify(code, f)
        lb, ub = code_bounds(plan)
        if not grid:
            rows.append((code.N, code.K, f, "", "", lb, ub))
            continue
        cfg = SimConfig(code, tuple(grid), max_frames=args.frames, min_frame_errors=args.frames + 1,
                        seed=args.seed, decoders=(f,), threads=args.threads or default_threads())
        for p in run_fer(cfg).points:
            rows.append((code.N, code.K, f, f"{p.ebn0_db:g}", f"{p.mean_steps:.4f}", lb, ub))
    print(f"N={code.N} K={code.K}", file=sys.stderr)
    _emit(args, _rows_csv(rows, ("N", "K", "feature_set", "ebn0_db", "mean_steps", "lb", "ub")))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="artifact", description="Polar code construction, fast SC decoding and FER simulation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and print its indicator vector")
    _add_code_args(p)
    _add_out(p)
    p.add_argument("--descriptor", action="store_true", help="print a descriptor file instead of CSV")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify", help="print the decoding plan and the SR1/SPC length histogram")
    _add_code_args(p)
    _add_out(p)
    p.add_argument("--features", choices=FEATURE_SETS, default=SNFSC)
    p.add_argument("--min-basic-len", type=int, default=2)
    p.add_argument("--min-seq-len", type=int, default=4)
    p.add_argument("--all", action="store_true", help="also count nested SR1/SPC nodes and those with empty L")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("encode", help="encode a message")
    _add_code_args(p)
    _add_out(p)
    p.add_argument("--msg", help="message bits as a 0/1 string (random if absent)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("fer-sim", help="Monte-Carlo FER and latency simulation")
    _add_code_args(p)
    _add_out(p)
    p.add_argument("--config", metavar="FILE", help="key=value settings; flags override")
    p.add_argument("--ebn0", help="comma-separated Eb/N0 grid in dB")
    p.add_argument("--max-frames", type=int)
    p.add_argument("--min-errors", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--decoders", help="comma-separated subset of sc,fssc,snfsc")
    p.add_argument("--threads", type=int)
    p.add_argument("--chunk-size", type=int)
    p.add_argument("--m-policy", choices=("joint", "per_segment"))
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_fer_sim)

    p = sub.add_parser("latency", help="time-step bounds and optional measured mean")
    _add_code_args(p)
    _add_out(p)
    p.add_argument("--features", default=SNFSC, help="comma-separated feature sets")
    p.add_argument("--ebn0", help="measure mean steps at these Eb/N0 values")
    p.add_argument("--frames", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_latency)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # pragma: no cover - unexpected failures
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
