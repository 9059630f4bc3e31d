"""Plain successive-cancellation decoding with min-sum updates.

The kernel walks the leaves in order and keeps one LLR slice per tree level
(level ``p`` lives at ``alpha[2**p : 2**(p+1)]``), so no recursion is needed.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit
from .polar_code import PolarCode, extract_message


def _check_pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def f_op(a, b) -> np.ndarray:
    """Min-sum check update ``sign(a) sign(b) min(|a|, |b|)``."""
    a, b = _check_pair(a, b)
    sa = np.where(a < 0, -1.0, 1.0)
    sb = np.where(b < 0, -1.0, 1.0)
    return sa * sb * np.minimum(np.abs(a), np.abs(b))


def g_op(a, b, left_bits) -> np.ndarray:
    """Variable update ``b + (1 - 2 beta) a``."""
    a, b = _check_pair(a, b)
    beta = np.asarray(left_bits)
    if beta.shape != a.shape:
        raise ValueError(f"length mismatch: bits {beta.shape} vs llr {a.shape}")
    return b + (1.0 - 2.0 * beta) * a


def combine(left, right) -> np.ndarray:
    """Partial-sum merge: ``(left xor right, right)``."""
    left = np.asarray(left, dtype=np.uint8)
    right = np.asarray(right, dtype=np.uint8)
    if left.shape != right.shape:
        raise ValueError(f"length mismatch: {left.shape} vs {right.shape}")
    return np.concatenate([left ^ right, right])


@njit(cache=True, nogil=True)
def _fmin(a, b):
    m = abs(a) if abs(a) < abs(b) else abs(b)
    if (a < 0) != (b < 0):
        return -m
    return m


@njit(cache=True, nogil=True)
def sc_kernel(llr, frozen, alpha, bl, cur, u):
    """Decode one frame in place.

    Parameters
    ----------
    llr : float64[N]
    frozen : uint8[N]
        1 marks a frozen leaf.
    alpha : float64[2N]
        LLR scratch, level ``p`` at ``[2**p, 2**(p+1))``.
    bl : uint8[2N]
        Stashed left-child bits per level, same layout.
    cur : uint8[2N]
        Bits of the node being completed; holds the codeword on return.
    u : uint8[N]
        Receives the leaf decisions.
    """
    N = llr.shape[0]
    n = 0
    while (1 << n) < N:
        n += 1
    for k in range(N):
        alpha[N + k] = llr[k]
    for i in range(N):
        if i == 0:
            top = n
        else:
            t = 0
            while not (i >> t) & 1:
                t += 1
            h = 1 << t
            for k in range(h):
                a = alpha[2 * h + k]
                b = alpha[3 * h + k]
                alpha[h + k] = b - a if bl[h + k] else b + a
            top = t
        for lev in range(top, 0, -1):
            h = 1 << (lev - 1)
            for k in range(h):
                alpha[h + k] = _fmin(alpha[2 * h + k], alpha[3 * h + k])
        bit = 0
        if frozen[i] == 0 and alpha[1] < 0:
            bit = 1
        u[i] = bit
        cur[0] = bit
        lev = 0
        j = i
        while j & 1:
            h = 1 << lev
            for k in range(h):
                r = cur[k]
                cur[h + k] = r
                cur[k] = bl[h + k] ^ r
            lev += 1
            j >>= 1
        if lev < n:
            h = 1 << lev
            for k in range(h):
                bl[h + k] = cur[k]


@njit(cache=True, nogil=True)
def sc_batch_kernel(llrs, frozen, u_out, x_out):
    """Decode every row of ``llrs``."""
    B, N = llrs.shape
    alpha = np.empty(2 * N)
    bl = np.zeros(2 * N, dtype=np.uint8)
    cur = np.zeros(2 * N, dtype=np.uint8)
    u = np.zeros(N, dtype=np.uint8)
    for b in range(B):
        sc_kernel(llrs[b], frozen, alpha, bl, cur, u)
        for k in range(N):
            u_out[b, k] = u[k]
            x_out[b, k] = cur[k]


class SCDecoder:
    """Plain SC decoder bound to one code.

    Instances own scratch buffers; use one instance per thread.

    Parameters
    ----------
    code : PolarCode
    """

    def __init__(self, code: PolarCode):
        self.code = code
        N = code.N
        self._frozen = code.frozen_mask.astype(np.uint8)
        self._alpha = np.empty(2 * N)
        self._bl = np.zeros(2 * N, dtype=np.uint8)
        self._cur = np.zeros(2 * N, dtype=np.uint8)
        self._u = np.zeros(N, dtype=np.uint8)

    def decode(self, llr):
        """Return ``(message, codeword)`` for one frame."""
        llr = np.ascontiguousarray(llr, dtype=np.float64)
        if llr.shape != (self.code.N,):
            raise ValueError(f"expected {self.code.N} LLRs, got {llr.shape}")
        sc_kernel(llr, self._frozen, self._alpha, self._bl, self._cur, self._u)
        u = self._u.copy()
        return extract_message(self.code, u), self._cur[: self.code.N].copy()

    def decode_u(self, llr) -> np.ndarray:
        """Return the full leaf vector ``u`` for one frame."""
        llr = np.ascontiguousarray(llr, dtype=np.float64)
        sc_kernel(llr, self._frozen, self._alpha, self._bl, self._cur, self._u)
        return self._u.copy()

    def decode_batch(self, llrs):
        """Decode rows of ``llrs``; returns ``(messages, codewords)``."""
        llrs = np.ascontiguousarray(llrs, dtype=np.float64)
        B, N = llrs.shape
        u = np.empty((B, N), dtype=np.uint8)
        x = np.empty((B, N), dtype=np.uint8)
        sc_batch_kernel(llrs, self._frozen, u, x)
        return extract_message(self.code, u), x


def sc_decode(code: PolarCode, llr):
    """Decode one frame with plain SC; returns ``(message, codeword)``."""
    return SCDecoder(code).decode(llr)
