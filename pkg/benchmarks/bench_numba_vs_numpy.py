"""Compare decoder throughput with numba kernels against the pure-numpy fallback.

Each backend runs in its own subprocess because the backend is chosen at
import time from ``ARTIFACT_DISABLE_NUMBA``.

Usage::

    python3 benchmarks/bench_numba_vs_numpy.py [--n 10] [--k 512] [--frames 200]
"""

import argparse
import json
import os
import subprocess
import sys

_WORKER = """
import json, sys, time
from artifact import NUMBA_ENABLED
from artifact.fast_decoder import FastDecoder
from artifact.harness import frame_llrs
from artifact.node_classifier import FSSC, SNFSC, classify
from artifact.polar_code import construct
from artifact.sc_decoder import SCDecoder

n, k, frames = (int(a) for a in sys.argv[1:4])
code = construct(n, k)
_, llrs = frame_llrs(code, 2.0, 0, 0, range(frames))
decoders = {
    "sc": SCDecoder(code),
    "fssc": FastDecoder(classify(code, FSSC)),
    "snfsc": FastDecoder(classify(code, SNFSC)),
}
out = {"numba": NUMBA_ENABLED}
for name, dec in decoders.items():
    dec.decode_batch(llrs[:2])  # warm-up, includes JIT compilation
    t0 = time.perf_counter()
    dec.decode_batch(llrs)
    out[name] = frames / (time.perf_counter() - t0)
print(json.dumps(out))
"""


def run_backend(disable_numba, n, k, frames):
    env = dict(os.environ)
    env.pop("ARTIFACT_DISABLE_NUMBA", None)
    if disable_numba:
        env["ARTIFACT_DISABLE_NUMBA"] = "1"
    res = subprocess.run(
        [sys.executable, "-c", _WORKER, str(n), str(k), str(frames)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10, help="log2 of the code length")
    ap.add_argument("--k", type=int, default=512, help="number of information bits")
    ap.add_argument("--frames", type=int, default=200, help="frames per timed batch")
    args = ap.parse_args(argv)

    jit = run_backend(False, args.n, args.k, args.frames)
    ref = run_backend(True, args.n, args.k, args.frames)
    if not jit["numba"]:
        print("warning: numba unavailable, both runs use numpy", file=sys.stderr)

    print(f"P({1 << args.n},{args.k}), {args.frames} frames, frames/second")
    print(f"{'decoder':<8}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name in ("sc", "fssc", "snfsc"):
        print(f"{name:<8}{jit[name]:>12.1f}{ref[name]:>12.1f}{jit[name] / ref[name]:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
