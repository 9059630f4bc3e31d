"""Parity constraints carried by SR1/SPC nodes.

For a node at level ``p`` with source level ``q``:

* the parallel constraints (P-PC) tie every stride ``root[k::2**q]`` to the
  source bit ``k``;
* an SPC sibling at level ``r`` adds a segmental constraint (S-PC): the XOR
  of all bits in the odd-numbered blocks of length ``2**r`` is zero.

Segment ``k`` (1-based) is the block of ``2**q`` consecutive root bits
``[(k-1) 2**q, k 2**q)``. The ``t``-th S-PC (level ``r = q + t - 1``)
involves segment ``k`` iff ``(k-1) >> (t-1)`` is odd.
"""

from __future__ import annotations

import numpy as np

RATE1_SENTINEL = -1


def _bits(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint8) & 1


def _log2(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    return n.bit_length() - 1


def ppc_check(root_bits, source_bits) -> bool:
    """True iff every stride ``root[k::2**q]`` XORs to ``source[k]``."""
    root = _bits(root_bits)
    src = _bits(source_bits)
    p, q = _log2(root.size), _log2(src.size)
    if q > p:
        raise ValueError("source longer than root")
    par = np.bitwise_xor.reduce(root.reshape(1 << (p - q), 1 << q), axis=0)
    return bool(np.array_equal(par, src))


def spc_check(root_bits, r: int) -> int:
    """XOR of the root bits that lie in odd-numbered blocks of length ``2**r``."""
    root = _bits(root_bits)
    p = _log2(root.size)
    if not 0 <= r < p:
        raise ValueError(f"level r={r} out of range for p={p}")
    return int(np.bitwise_xor.reduce(root.reshape(1 << (p - r), 1 << r)[1::2].ravel()))


def gamma_spc(root_bits, q: int, spc_levels) -> np.ndarray:
    """S-PC check vector indexed by ``t = r - q + 1``.

    Entries are the check values for SPC levels and ``-1`` for Rate-1
    levels, which impose no segmental constraint.
    """
    root = _bits(root_bits)
    p = _log2(root.size)
    spc = set(spc_levels)
    out = np.full(p - q, RATE1_SENTINEL, dtype=np.int8)
    for r in range(q, p):
        if r in spc:
            out[r - q] = spc_check(root, r)
    return out


def gamma_for_node(root_bits, spec) -> np.ndarray:
    """:func:`gamma_spc` using the parameters of an SR1/SPC :class:`NodeSpec`."""
    return gamma_spc(root_bits, spec.q, spec.spc_levels)


def segment_involved(t: int, k: int, order: int) -> bool:
    """Whether segment ``k`` takes part in the ``t``-th S-PC.

    Parameters
    ----------
    t : int
        1-based check index, ``1 <= t <= order``.
    k : int
        1-based segment index, ``1 <= k <= 2**order``.
    order : int
        ``p - q``.
    """
    if not 1 <= t <= order:
        raise ValueError(f"t={t} out of range 1..{order}")
    if not 1 <= k <= (1 << order):
        raise ValueError(f"k={k} out of range 1..{1 << order}")
    return bool(((k - 1) >> (t - 1)) & 1)


def involvement_matrix(order: int) -> np.ndarray:
    """Boolean matrix ``M[t-1, k-1] = segment_involved(t, k, order)``."""
    k = np.arange(1 << order)
    t = np.arange(order)[:, None]
    return ((k[None, :] >> t) & 1).astype(bool)
