"""Monte-Carlo FER and latency simulation.

Frames are grouped in fixed-size chunks. Every frame draws its message and
noise from a generator keyed by ``(seed, grid point, frame index)``, and all
decoders see the same LLRs. Chunks are merged in order and early stopping is
decided at chunk boundaries, so results do not depend on the thread count.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .channel import frame_rng
from .fast_decoder import FastDecoder
from .latency_model import code_bounds, steps_from_odd_counts
from .node_classifier import FEATURE_SETS, PLAIN_SC, classify
from .polar_code import PolarCode, encode
from .sc_decoder import SCDecoder

THREADS_ENV = "ARTIFACT_THREADS"
CSV_COLUMNS = (
    "decoder", "n", "k", "construction", "ebn0_db", "frames", "frame_errors",
    "fer", "fer_ci_lo", "fer_ci_hi", "mean_steps", "lb", "ub",
)


def default_threads() -> int:
    """Thread count from ``ARTIFACT_THREADS`` (default 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    v = int(raw)
    if v < 1:
        raise ValueError(f"{THREADS_ENV} must be >= 1")
    return v


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    Attributes
    ----------
    code : PolarCode
    ebn0_grid : tuple of float
    max_frames : int
    min_frame_errors : int
        Stop a grid point once every decoder has at least this many errors.
    seed : int
    decoders : tuple of str
        Subset of ``("sc", "fssc", "snfsc")``; ``"sc"`` uses the dedicated
        plain SC kernel.
    threads : int
    chunk_size : int
        Frames per work unit; part of the result's definition, unlike
        ``threads``.
    m_policy : str
        Flip-bit selection of the SR1/SPC decoder.
    """

    code: PolarCode
    ebn0_grid: tuple
    max_frames: int = 100_000
    min_frame_errors: int = 100
    seed: int = 0
    decoders: tuple = ("sc", "snfsc")
    threads: int = 1
    chunk_size: int = 1000
    m_policy: str = "joint"

    def __post_init__(self):
        if self.code.K < 1:
            raise ValueError("code has no information bits")
        if not self.ebn0_grid:
            raise ValueError("Eb/N0 grid is empty")
        if self.max_frames < 1 or self.min_frame_errors < 1 or self.chunk_size < 1:
            raise ValueError("max_frames, min_frame_errors and chunk_size must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        bad = [d for d in self.decoders if d not in FEATURE_SETS]
        if bad or not self.decoders:
            raise ValueError(f"unknown decoders {bad}")
        object.__setattr__(self, "ebn0_grid", tuple(float(x) for x in self.ebn0_grid))
        object.__setattr__(self, "decoders", tuple(self.decoders))


@dataclass
class PointResult:
    """Statistics of one decoder at one Eb/N0."""

    decoder: str
    ebn0_db: float
    frames: int
    frame_errors: int
    steps_sum: int
    lb: int
    ub: int
    wall_seconds: float = 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def mean_steps(self) -> float:
        return self.steps_sum / self.frames if self.frames else float("nan")

    def fer_ci(self, level: float = 0.95) -> tuple:
        """Clopper-Pearson interval."""
        ci = binomtest(self.frame_errors, self.frames).proportion_ci(level, method="exact")
        return float(ci.low), float(ci.high)

    def counters(self) -> tuple:
        return (self.decoder, self.ebn0_db, self.frames, self.frame_errors, self.steps_sum, self.lb, self.ub)


@dataclass
class SimResult:
    """All grid points of a run."""

    code: PolarCode
    points: list = field(default_factory=list)

    def get(self, decoder: str, ebn0_db: float) -> PointResult:
        for p in self.points:
            if p.decoder == decoder and p.ebn0_db == float(ebn0_db):
                return p
        raise KeyError((decoder, ebn0_db))

    def counters(self) -> list:
        """Everything except wall-clock time."""
        return [p.counters() for p in self.points]

    def rows(self) -> list:
        out = []
        for p in self.points:
            lo, hi = p.fer_ci()
            out.append({
                "decoder": p.decoder, "n": self.code.n, "k": self.code.K,
                "construction": self.code.construction, "ebn0_db": p.ebn0_db,
                "frames": p.frames, "frame_errors": p.frame_errors, "fer": p.fer,
                "fer_ci_lo": lo, "fer_ci_hi": hi, "mean_steps": p.mean_steps,
                "lb": p.lb, "ub": p.ub,
            })
        return out


def frame_llrs(code: PolarCode, ebn0_db: float, seed: int, point: int, frames) -> tuple:
    """Messages and channel LLRs for the given frame indices."""
    N, K = code.N, code.K
    sigma2 = 1.0 / (2.0 * code.rate * 10.0 ** (ebn0_db / 10.0))
    frames = list(frames)
    msgs = np.empty((len(frames), K), dtype=np.uint8)
    noise = np.empty((len(frames), N))
    for j, f in enumerate(frames):
        rng = frame_rng(seed, point, f)
        msgs[j] = rng.integers(0, 2, K, dtype=np.uint8)
        noise[j] = rng.standard_normal(N)
    x = encode(code, msgs)
    y = (1.0 - 2.0 * x) + noise * np.sqrt(sigma2)
    return msgs, 2.0 * y / sigma2


class _Engine:
    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        code = cfg.code
        self.info = code.info_positions
        self.decoders = {}
        self.bounds = {}
        for name in cfg.decoders:
            plan = classify(code, name)
            self.bounds[name] = (plan, code_bounds(plan))
            if name == PLAIN_SC:
                self.decoders[name] = SCDecoder(code)
            else:
                self.decoders[name] = FastDecoder(plan, m_policy=cfg.m_policy)

    def run_chunk(self, ebn0, point, start, stop):
        msgs, llrs = frame_llrs(self.cfg.code, ebn0, self.cfg.seed, point, range(start, stop))
        out = {}
        for name, dec in self.decoders.items():
            t0 = time.perf_counter()
            plan, (lb, _) = self.bounds[name]
            if name == PLAIN_SC:
                m_hat, _ = dec.decode_batch(llrs)
                steps = lb * len(msgs)
            else:
                u, _, odd = dec.decode_batch(llrs)
                m_hat = u[:, self.info]
                steps = int(steps_from_odd_counts(plan, odd).sum())
            errs = int(np.any(m_hat != msgs, axis=1).sum())
            out[name] = (errs, steps, time.perf_counter() - t0)
        return stop - start, out


def run_fer(cfg: SimConfig, progress=None) -> SimResult:
    """Simulate every grid point and decoder.

    Parameters
    ----------
    cfg : SimConfig
    progress : callable, optional
        Called as ``progress(ebn0, frames, errors_by_decoder)`` after each merge.
    """
    eng = _Engine(cfg)
    result = SimResult(cfg.code)
    cs = cfg.chunk_size
    n_chunks = -(-cfg.max_frames // cs)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        for point, ebn0 in enumerate(cfg.ebn0_grid):
            acc = {d: [0, 0, 0, 0.0] for d in cfg.decoders}  # frames, errors, steps, seconds
            c = 0
            done = False
            while c < n_chunks and not done:
                wave = range(c, min(c + cfg.threads, n_chunks))
                futs = [pool.submit(eng.run_chunk, ebn0, point, i * cs, min((i + 1) * cs, cfg.max_frames)) for i in wave]
                for fut in futs:
                    if done:
                        fut.cancel()
                        continue
                    nf, out = fut.result()
                    for d, (e, s, t) in out.items():
                        a = acc[d]
                        a[0] += nf
                        a[1] += e
                        a[2] += s
                        a[3] += t
                    if progress is not None:
                        progress(ebn0, acc[cfg.decoders[0]][0], {d: a[1] for d, a in acc.items()})
                    if all(a[1] >= cfg.min_frame_errors for a in acc.values()):
                        done = True
                c += len(wave)
            for d in cfg.decoders:
                f, e, s, t = acc[d]
                lb, ub = eng.bounds[d][1]
                result.points.append(PointResult(d, ebn0, f, e, s, lb, ub, t))
    return result


def write_csv(rows, fh, columns=CSV_COLUMNS) -> None:
    """Write dict rows as CSV with a fixed column order."""
    import csv

    w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r[k]) for k in columns})


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return v
