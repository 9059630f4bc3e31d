"""Special-node decoders and a recursive reference decoder for whole plans.

These functions favour clarity over speed; :mod:`artifact.fast_decoder`
runs the same rules in a compiled kernel and is checked against them.

Conventions: LLRs are float arrays, bits are ``uint8``; an LLR of exactly
zero decides bit 0; every argmin/argmax breaks ties toward the lowest index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .constraints import gamma_spc
from .flip_sets import gen_sr1spc
from .node_classifier import DecodePlan, Kind, NodeSpec, node_indicator
from .polar_code import polar_transform
from .sc_decoder import combine, f_op, g_op


def _hd(llr) -> np.ndarray:
    return (np.asarray(llr) < 0).astype(np.uint8)


def decode_rate0(length: int) -> np.ndarray:
    """All-zero block."""
    return np.zeros(length, dtype=np.uint8)


def decode_rate1(llr) -> np.ndarray:
    """Hard decisions."""
    return _hd(llr)


def decode_rep(llr) -> np.ndarray:
    """Repetition node: every bit takes the decision on the LLR sum."""
    llr = np.asarray(llr, dtype=np.float64)
    return np.full(llr.size, 1 if llr.sum() < 0 else 0, dtype=np.uint8)


def decode_spc(llr, check_bit: int = 0) -> np.ndarray:
    """Wagner decoder: hard decisions, then flip the least reliable bit if
    the parity differs from ``check_bit``."""
    llr = np.asarray(llr, dtype=np.float64)
    if llr.size == 0:
        raise ValueError("empty LLR block")
    out = _hd(llr)
    if (int(out.sum()) & 1) != (int(check_bit) & 1):
        out[int(np.argmin(np.abs(llr)))] ^= 1
    return out


# --- SR0/REP ---------------------------------------------------------------

def repetition_sequences(spec: NodeSpec) -> np.ndarray:
    """All repetition sequences of an SR0/REP node, one row per path.

    Entry ``m`` (0-based segment) is the product of ``eta_r`` over the levels
    ``r`` whose bit ``r - q`` of ``m`` is zero, i.e. the segments covered by
    the left sibling at level ``r``. Rate-0 siblings fix ``eta_r = +1``; REP
    siblings contribute both signs. Row ``l`` sets ``eta = -1`` on the REP
    levels selected by the bits of ``l``.
    """
    d = spec.level - spec.q
    m = np.arange(1 << d)
    rows = []
    for l in range(1 << len(spec.rep_levels)):
        s = np.ones(1 << d)
        for j, r in enumerate(spec.rep_levels):
            if (l >> j) & 1:
                s[((m >> (r - spec.q)) & 1) == 0] *= -1.0
        rows.append(s)
    return np.array(rows)


def decode_sr0rep(llr, spec: NodeSpec, source_decoder=None) -> np.ndarray:
    """Decode an SR0/REP node by repetition-path selection.

    Parameters
    ----------
    llr : array_like
        ``2**p`` node LLRs.
    spec : NodeSpec
        SR0/REP node.
    source_decoder : callable, optional
        Maps the folded source LLRs to source bits; defaults to the
        recursive plan decoder on ``spec.source``.
    """
    llr = np.asarray(llr, dtype=np.float64)
    q = spec.q
    A = llr.reshape(-1, 1 << q)
    S = repetition_sequences(spec)
    folded = S @ A
    best = int(np.argmax(np.abs(folded).sum(axis=1)))
    if source_decoder is None:
        source_decoder = lambda a: decode_node(spec.source, a)
    src = np.asarray(source_decoder(folded[best]), dtype=np.uint8)
    flip = (S[best] < 0).astype(np.uint8)
    return (src[None, :] ^ flip[:, None]).ravel()


# --- SR1 / SR1/SPC ---------------------------------------------------------

def sr1_fold(llr, q: int) -> np.ndarray:
    """Source LLRs: per stride, product of signs times the minimum magnitude."""
    A = np.asarray(llr, dtype=np.float64).reshape(-1, 1 << q)
    sign = np.where(np.sum(A < 0, axis=0) % 2 == 1, -1.0, 1.0)
    return sign * np.abs(A).min(axis=0)


def decode_sr1(llr, q: int, source_decoder=None, source_is_rate0: bool = False) -> tuple:
    """Decode the P-PC part of a sequence node with parallel Wagner decoders.

    Parameters
    ----------
    llr : array_like
        ``2**p`` node LLRs.
    q : int
        Source level.
    source_decoder : callable
        Maps ``2**q`` folded LLRs to source bits.
    source_is_rate0 : bool
        Skip the fold and use an all-zero source.

    Returns
    -------
    (bits, source_bits)
    """
    llr = np.asarray(llr, dtype=np.float64)
    A = llr.reshape(-1, 1 << q)
    if source_is_rate0:
        src = np.zeros(1 << q, dtype=np.uint8)
    else:
        src = np.asarray(source_decoder(sr1_fold(llr, q)), dtype=np.uint8)
    B = _hd(A)
    par = np.bitwise_xor.reduce(B, axis=0) ^ src
    rows = np.argmin(np.abs(A), axis=0)
    cols = np.flatnonzero(par)
    B[rows[cols], cols] ^= 1
    return B.ravel(), src


def best_flip(llr, bits, q: int, coords, m_policy: str = "joint"):
    """Pick the flip ``(k1, k2, m)`` (1-based) with the smallest penalty.

    The penalty of flipping bit ``m`` of segments ``k1`` and ``k2`` is
    ``sum (1 - 2 beta) alpha`` over the two bits, i.e. the loss in
    correlation metric.

    Parameters
    ----------
    m_policy : {"joint", "per_segment"}
        ``"joint"`` minimizes over every ``(coordinate, m)``.
        ``"per_segment"`` fixes ``m`` per coordinate at the least reliable
        position of segment ``k1`` and then compares coordinates.
    """
    A = np.asarray(llr, dtype=np.float64).reshape(-1, 1 << q)
    B = np.asarray(bits, dtype=np.uint8).reshape(-1, 1 << q)
    term = (1.0 - 2.0 * B) * A
    best = None
    for k1, k2 in coords:
        if m_policy == "joint":
            lam = term[k1 - 1] + term[k2 - 1]
            m = int(np.argmin(lam))
            val = lam[m]
        elif m_policy == "per_segment":
            m = int(np.argmin(term[k1 - 1]))
            val = term[k1 - 1, m] + term[k2 - 1, m]
        else:
            raise ValueError(f"unknown m_policy {m_policy!r}")
        if best is None or val < best[0]:
            best = (val, k1, k2, m + 1)
    return None if best is None else best[1:]


def decode_sr1spc(llr, spec: NodeSpec, source_decoder=None, m_policy: str = "joint", literal_flip_sets: bool = False, trace=None) -> np.ndarray:
    """Decode an SR1/SPC node: Wagner phase, then one pair flip if any S-PC is odd.

    Parameters
    ----------
    llr : array_like
    spec : NodeSpec
        SR1/SPC node.
    source_decoder : callable, optional
        Defaults to the recursive plan decoder on ``spec.source``.
    m_policy : str
        See :func:`best_flip`.
    literal_flip_sets : bool
        See :func:`artifact.flip_sets.gen_sr1spc`.
    trace : list, optional
        Receives ``(spec, gamma)`` after the Wagner phase.
    """
    q = spec.q
    if source_decoder is None:
        source_decoder = lambda a: decode_node(spec.source, a, trace=trace, m_policy=m_policy, literal_flip_sets=literal_flip_sets)
    bits, _ = decode_sr1(llr, q, source_decoder, spec.source.kind == Kind.RATE0)
    gamma = gamma_spc(bits, q, spec.spc_levels)
    if trace is not None:
        trace.append((spec, gamma.copy()))
    if np.any(gamma == 1):
        choice = best_flip(llr, bits, q, gen_sr1spc(gamma, literal_flip_sets), m_policy)
        if choice is not None:
            k1, k2, m = choice
            seg = 1 << q
            bits[(k1 - 1) * seg + m - 1] ^= 1
            bits[(k2 - 1) * seg + m - 1] ^= 1
    return bits


# --- whole plans -------------------------------------------------------------

def decode_node(spec: NodeSpec, llr, trace=None, m_policy: str = "joint", literal_flip_sets: bool = False) -> np.ndarray:
    """Recursively decode one plan node; returns its codeword bits."""
    llr = np.asarray(llr, dtype=np.float64)
    k = spec.kind
    if k == Kind.RATE0:
        return decode_rate0(llr.size)
    if k == Kind.RATE1:
        return decode_rate1(llr)
    if k == Kind.REP:
        return decode_rep(llr)
    if k == Kind.SPC:
        return decode_spc(llr, 0)
    if k == Kind.SR0REP:
        return decode_sr0rep(llr, spec, lambda a: decode_node(spec.source, a, trace, m_policy, literal_flip_sets))
    if k == Kind.SR1SPC:
        return decode_sr1spc(llr, spec, None, m_policy, literal_flip_sets, trace)
    h = llr.size // 2
    a, b = llr[:h], llr[h:]
    left = decode_node(spec.children[0], f_op(a, b), trace, m_policy, literal_flip_sets)
    right = decode_node(spec.children[1], g_op(a, b, left), trace, m_policy, literal_flip_sets)
    return combine(left, right)


@dataclass
class ReferenceResult:
    """Output of :func:`decode_plan_reference`."""

    codeword: np.ndarray
    u: np.ndarray
    trace: list = field(default_factory=list)


def decode_plan_reference(plan: DecodePlan, llr, m_policy: str = "joint", literal_flip_sets: bool = False) -> ReferenceResult:
    """Decode a frame with the plan; ``u`` is recovered by re-applying the transform."""
    trace = []
    x = decode_node(plan.root, llr, trace, m_policy, literal_flip_sets)
    return ReferenceResult(x, polar_transform(x), trace)


# --- brute force -------------------------------------------------------------

def codebook(indicator) -> np.ndarray:
    """Every codeword of the subcode with the given indicator (rows)."""
    c = np.asarray(indicator, dtype=np.uint8)
    info = np.flatnonzero(c)
    msgs = np.array(list(itertools.product((0, 1), repeat=info.size)), dtype=np.uint8).reshape(-1, info.size)
    u = np.zeros((msgs.shape[0], c.size), dtype=np.uint8)
    u[:, info] = msgs
    return polar_transform(u)


def ml_decode(indicator, llr, book=None) -> np.ndarray:
    """Exhaustive ML decision ``argmax sum (1 - 2 x) llr`` over the subcode."""
    if book is None:
        book = codebook(indicator)
    llr = np.asarray(llr, dtype=np.float64)
    return book[int(np.argmax((1.0 - 2.0 * book) @ llr))].copy()


def node_codebook(spec: NodeSpec) -> np.ndarray:
    """Codebook of the subtree described by ``spec``."""
    return codebook(node_indicator(spec))
