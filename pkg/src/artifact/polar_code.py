"""Polar code construction and encoding.

A polar code of length ``N = 2**n`` uses the generator ``G_N = F^{(x)n}`` with
kernel ``F = [[1, 0], [1, 1]]`` (no bit-reversal permutation). Bit-channel
indices are 1-based in the public API; descriptor files store them 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._jit import njit
from .reliability import NR_SEQUENCE_MAX_N, nr_sequence

FIVE_G = "5g"
GAUSSIAN_APPROX = "ga"
EXPLICIT = "explicit"
CONSTRUCTIONS = (FIVE_G, GAUSSIAN_APPROX, EXPLICIT)


@dataclass(frozen=True)
class PolarCode:
    """Parameters of a polar code.

    Attributes
    ----------
    n : int
        log2 of the code length.
    K : int
        Number of information bits.
    info_set : tuple of int
        Sorted 1-based information indices (the set A).
    construction : str
        One of ``"5g"``, ``"ga"`` or ``"explicit"``.
    design_snr_db : float or None
        Design Eb/N0 used by the GA construction.
    """

    n: int
    K: int
    info_set: tuple
    construction: str = FIVE_G
    design_snr_db: float | None = None
    _indicator: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        N = 1 << self.n
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if len(self.info_set) != self.K:
            raise ValueError("info_set size must equal K")
        if self.info_set and (min(self.info_set) < 1 or max(self.info_set) > N):
            raise ValueError("info_set indices must lie in 1..N")
        if len(set(self.info_set)) != self.K:
            raise ValueError("info_set contains duplicates")
        c = np.zeros(N, dtype=np.uint8)
        c[np.asarray(self.info_set, dtype=np.int64) - 1] = 1
        c.setflags(write=False)
        object.__setattr__(self, "info_set", tuple(sorted(int(i) for i in self.info_set)))
        object.__setattr__(self, "_indicator", c)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def indicator(self) -> np.ndarray:
        """Read-only vector ``c`` with ``c[k-1] = 1`` iff ``k`` is an information index."""
        return self._indicator

    @property
    def frozen_mask(self) -> np.ndarray:
        """Boolean mask of frozen positions (0-based)."""
        return self._indicator == 0

    @property
    def info_positions(self) -> np.ndarray:
        """0-based information positions in increasing order."""
        return np.flatnonzero(self._indicator)


def k_for_rate(N: int, rate, rounding: str = "floor") -> int:
    """Number of information bits for a nominal rate.

    Parameters
    ----------
    N : int
        Code length.
    rate : float, str or Fraction
        Nominal rate such as ``"1/3"``.
    rounding : {"floor", "round", "ceil"}
        ``"round"`` rounds half up.
    """
    r = Fraction(rate)
    if isinstance(rate, float):
        r = r.limit_denominator(1 << 20)
    x = r * N
    if rounding == "floor":
        return math.floor(x)
    if rounding == "ceil":
        return math.ceil(x)
    if rounding == "round":
        return math.floor(x + Fraction(1, 2))
    raise ValueError(f"unknown rounding {rounding!r}")


def _phi(x: np.ndarray) -> np.ndarray:
    """Log of the two-segment approximation of the GA phi function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    lo = (x > 0) & (x < 10.0)
    hi = x >= 10.0
    out[lo] = -0.4527 * x[lo] ** 0.86 + 0.0218
    xh = x[hi]
    out[hi] = 0.5 * np.log(np.pi / xh) - xh / 4.0 + np.log1p(-10.0 / (7.0 * xh))
    return out


def _phi_inv(log_y: np.ndarray) -> np.ndarray:
    """Invert :func:`_phi` by bisection on the mean."""
    log_y = np.asarray(log_y, dtype=np.float64)
    lo = np.zeros_like(log_y)
    hi = np.ones_like(log_y)
    # grow the bracket until phi(hi) <= y
    while True:
        need = _phi(hi) > log_y
        if not need.any():
            break
        hi[need] *= 2.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        above = _phi(mid) > log_y
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def ga_reliability(n: int, design_snr_db: float, rate: float = 0.5) -> np.ndarray:
    """Bit-channel LLR means under the Gaussian approximation.

    Parameters
    ----------
    n : int
        log2 code length, ``n >= 1``.
    design_snr_db : float
        Design Eb/N0 in dB.
    rate : float
        Code rate used to convert Eb/N0 into the channel LLR mean
        ``4 * rate * 10**(design_snr_db / 10)``.

    Returns
    -------
    numpy.ndarray
        Means indexed by 0-based bit-channel; larger is more reliable.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = np.array([4.0 * rate * 10.0 ** (design_snr_db / 10.0)])
    for _ in range(n):
        nxt = np.empty(2 * m.size)
        lp = _phi(m)
        # 1 - (1 - phi)^2 = phi * (2 - phi), evaluated in the log domain
        nxt[0::2] = _phi_inv(lp + np.log(2.0 - np.exp(lp)))
        nxt[1::2] = 2.0 * m
        m = nxt
    return m


def construct(n: int, K: int, method: str = FIVE_G, design_snr_db: float | None = None) -> PolarCode:
    """Build a polar code from the ``K`` most reliable bit-channels.

    Parameters
    ----------
    n : int
        log2 code length.
    K : int
        Information length, ``0 <= K <= 2**n``.
    method : {"5g", "ga"}
        Reliability source.
    design_snr_db : float, optional
        Required for ``"ga"``.
    """
    N = 1 << n
    if not 0 <= K <= N:
        raise ValueError(f"K={K} out of range for N={N}")
    if method == FIVE_G:
        if N > NR_SEQUENCE_MAX_N:
            raise ValueError(f"5G construction supports N <= {NR_SEQUENCE_MAX_N}, got {N}")
        order = nr_sequence(N)
        info = order[N - K:]
    elif method == GAUSSIAN_APPROX:
        if design_snr_db is None:
            raise ValueError("GA construction needs design_snr_db")
        rel = ga_reliability(n, design_snr_db, rate=max(K, 1) / N)
        # stable sort: equal means keep the lower index as less reliable
        order = np.argsort(rel, kind="stable")
        info = order[N - K:]
    else:
        raise ValueError(f"unknown construction {method!r}")
    return PolarCode(n, K, tuple(int(i) + 1 for i in info), method, design_snr_db)


def from_frozen(n: int, frozen) -> PolarCode:
    """Build a code from an explicit set of 1-based frozen indices."""
    N = 1 << n
    frozen = {int(i) for i in frozen}
    if any(i < 1 or i > N for i in frozen):
        raise ValueError("frozen indices must lie in 1..N")
    info = tuple(i for i in range(1, N + 1) if i not in frozen)
    return PolarCode(n, len(info), info, EXPLICIT, None)


def from_indicator(c) -> PolarCode:
    """Build a code from an indicator vector (1 = information)."""
    c = np.asarray(c).astype(np.uint8)
    N = c.size
    if N < 1 or N & (N - 1):
        raise ValueError("indicator length must be a power of two")
    info = tuple(int(i) + 1 for i in np.flatnonzero(c))
    return PolarCode(N.bit_length() - 1, len(info), info, EXPLICIT, None)


@njit(cache=True, nogil=True)
def _butterfly_2d(x):
    B, N = x.shape
    for b in range(B):
        h = 1
        while h < N:
            for s in range(0, N, 2 * h):
                for k in range(s, s + h):
                    x[b, k] ^= x[b, k + h]
            h *= 2


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Return ``u G_N`` over GF(2) for a vector or a batch of row vectors.

    The transform is its own inverse.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    if N & (N - 1):
        raise ValueError("length must be a power of two")
    if x.ndim == 1:
        _butterfly_2d(x.reshape(1, N))
    else:
        _butterfly_2d(x.reshape(-1, N))
    return x


def encode(code: PolarCode, msg) -> np.ndarray:
    """Encode a message (or a batch of messages along the last axis).

    Parameters
    ----------
    code : PolarCode
    msg : array_like
        Bits of length ``K``; a 2-D array encodes one message per row.

    Returns
    -------
    numpy.ndarray
        Codeword(s) of length ``N``, dtype ``uint8``.
    """
    msg = np.asarray(msg, dtype=np.uint8)
    if msg.shape[-1] != code.K:
        raise ValueError(f"message length {msg.shape[-1]} != K={code.K}")
    u = np.zeros(msg.shape[:-1] + (code.N,), dtype=np.uint8)
    u[..., code.info_positions] = msg & 1
    return polar_transform(u)


def extract_message(code: PolarCode, u: np.ndarray) -> np.ndarray:
    """Pick the information bits out of a full ``u`` vector."""
    return np.asarray(u)[..., code.info_positions]


# --- descriptor files -------------------------------------------------------

def parse_kv(text: str) -> dict:
    """Parse flat ``key=value`` text; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().lower().replace("-", "_")] = value.strip()
    return out


def code_from_mapping(d: dict) -> PolarCode:
    """Build a code from descriptor keys ``n``, ``K``, ``construction``,
    ``design_snr_db`` and optional ``frozen`` (0-based, comma separated)."""
    d = {k.lower(): v for k, v in d.items()}
    if "n" not in d:
        raise ValueError("descriptor is missing n")
    n = int(d["n"])
    frozen = d.get("frozen")
    if frozen not in (None, ""):
        idx = [int(t) + 1 for t in str(frozen).replace(" ", "").split(",") if t != ""]
        code = from_frozen(n, idx)
        if "k" in d and d["k"] != "" and int(d["k"]) != code.K:
            raise ValueError(f"K={d['k']} disagrees with frozen set (K={code.K})")
        return code
    if "k" not in d:
        raise ValueError("descriptor is missing K")
    method = str(d.get("construction", FIVE_G)).lower()
    snr = d.get("design_snr_db")
    snr = None if snr in (None, "", "none") else float(snr)
    return construct(n, int(d["k"]), method, snr)


def load_descriptor(path) -> PolarCode:
    """Read a code descriptor file."""
    return code_from_mapping(parse_kv(Path(path).read_text()))


def dump_descriptor(code: PolarCode) -> str:
    """Serialize a code as descriptor text (frozen list is 0-based)."""
    lines = [f"n={code.n}", f"K={code.K}", f"construction={code.construction}"]
    if code.design_snr_db is not None:
        lines.append(f"design_snr_db={code.design_snr_db}")
    if code.construction == EXPLICIT:
        frozen = np.flatnonzero(code.frozen_mask)
        lines.append("frozen=" + ",".join(str(int(i)) for i in frozen))
    return "\n".join(lines) + "\n"
