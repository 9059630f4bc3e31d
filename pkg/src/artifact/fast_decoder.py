"""Compiled fast SC decoding of a :class:`DecodePlan`.

The plan is flattened into a linear program of small instructions that a
single numba kernel executes. LLR and bit scratch use one slice per tree
level (level ``l`` at ``[2**l, 2**(l+1))``); a sequence node at level ``p``
decodes its source in the level-``q`` slice, which is free at that moment.
"""

from __future__ import annotations

import numpy as np

from ._jit import njit
from .flip_sets import flip_table
from .node_classifier import DecodePlan, Kind, NodeSpec
from .seq_decoders import repetition_sequences

OP_F, OP_G, OP_STORE, OP_COMBINE = 0, 1, 2, 3
OP_RATE0, OP_RATE1, OP_REP, OP_SPC = 4, 5, 6, 7
OP_SR0_FOLD, OP_SR0_EXPAND, OP_SR1_FOLD, OP_SR1_FINISH = 8, 9, 10, 11

M_JOINT, M_PER_SEGMENT = 0, 1
_M_POLICIES = {"joint": M_JOINT, "per_segment": M_PER_SEGMENT}


class _Compiler:
    def __init__(self, literal_flip_sets):
        self.prog = []
        self.literal = literal_flip_sets
        # SR0/REP path tables
        self.s_off, self.s_paths, self.s_data = [], [], []
        # SR1/SPC tables
        self.t_off, self.t_cnt, self.t_data = [], [], []
        self.k_off, self.k_start, self.k_len, self.pairs = [], [], [], []

    def emit(self, op, p=0, q=0, node=0):
        self.prog.append((op, p, q, node))

    def sr0_id(self, spec):
        S = repetition_sequences(spec)
        self.s_off.append(len(self.s_data))
        self.s_paths.append(S.shape[0])
        self.s_data.extend(S.ravel().tolist())
        return len(self.s_off) - 1

    def sr1_id(self, spec):
        d = spec.level - spec.q
        spc_t = [r - spec.q for r in spec.spc_levels]
        self.t_off.append(len(self.t_data))
        self.t_cnt.append(len(spc_t))
        self.t_data.extend(spc_t)
        self.k_off.append(len(self.k_start))
        for coords in _flip_table(d, spc_t, self.literal):
            self.k_start.append(len(self.pairs))
            self.k_len.append(len(coords))
            self.pairs.extend(coords)
        return len(self.t_off) - 1

    def node(self, s: NodeSpec):
        p = s.level
        k = s.kind
        if k == Kind.RATE0:
            self.emit(OP_RATE0, p)
        elif k == Kind.RATE1:
            self.emit(OP_RATE1, p)
        elif k == Kind.REP:
            self.emit(OP_REP, p)
        elif k == Kind.SPC:
            self.emit(OP_SPC, p)
        elif k == Kind.GENERIC:
            self.emit(OP_F, p)
            self.node(s.children[0])
            self.emit(OP_STORE, p - 1)
            self.emit(OP_G, p)
            self.node(s.children[1])
            self.emit(OP_COMBINE, p)
        elif k == Kind.SR0REP:
            nid = self.sr0_id(s)
            self.emit(OP_SR0_FOLD, p, s.q, nid)
            self.node(s.source)
            self.emit(OP_SR0_EXPAND, p, s.q, nid)
        elif k == Kind.SR1SPC:
            nid = self.sr1_id(s)
            if s.source.kind == Kind.RATE0:
                self.emit(OP_RATE0, s.q)
            else:
                self.emit(OP_SR1_FOLD, p, s.q)
                self.node(s.source)
            self.emit(OP_SR1_FINISH, p, s.q, nid)
        else:  # pragma: no cover
            raise ValueError(f"unknown kind {k}")


def _flip_table(d, spc_t, literal):
    if not literal:
        return flip_table(d, spc_t)
    from .flip_sets import gamma_keys, gen_sr1spc

    return [gen_sr1spc(g, literal=True) if 1 in g else () for g in gamma_keys(d, spc_t)]


@njit(cache=True, nogil=True)
def _hd(v):
    return 1 if v < 0 else 0


@njit(cache=True, nogil=True)
def run_program(prog, s_off, s_paths, s_data, t_off, t_cnt, t_data, k_off, k_start, k_len, pairs,
                m_policy, alpha, bc, bl, sel):
    """Execute a compiled plan on ``alpha[N:2N]``; the codeword ends in ``bc[N:2N]``.

    Returns the number of SR1/SPC nodes that needed a flip.
    """
    odd_nodes = 0
    for ins in range(prog.shape[0]):
        op = prog[ins, 0]
        p = prog[ins, 1]
        q = prog[ins, 2]
        nid = prog[ins, 3]
        L = 1 << p
        if op == OP_F:
            h = L >> 1
            for k in range(h):
                a = alpha[L + k]
                b = alpha[L + h + k]
                m = abs(a) if abs(a) < abs(b) else abs(b)
                alpha[h + k] = -m if (a < 0) != (b < 0) else m
        elif op == OP_G:
            h = L >> 1
            for k in range(h):
                a = alpha[L + k]
                b = alpha[L + h + k]
                alpha[h + k] = b - a if bl[h + k] else b + a
        elif op == OP_STORE:
            for k in range(L):
                bl[L + k] = bc[L + k]
        elif op == OP_COMBINE:
            h = L >> 1
            for k in range(h):
                r = bc[h + k]
                bc[L + h + k] = r
                bc[L + k] = bl[h + k] ^ r
        elif op == OP_RATE0:
            for k in range(L):
                bc[L + k] = 0
        elif op == OP_RATE1:
            for k in range(L):
                bc[L + k] = _hd(alpha[L + k])
        elif op == OP_REP:
            s = 0.0
            for k in range(L):
                s += alpha[L + k]
            b = 1 if s < 0 else 0
            for k in range(L):
                bc[L + k] = b
        elif op == OP_SPC:
            par = 0
            jmin = 0
            vmin = abs(alpha[L])
            for k in range(L):
                b = _hd(alpha[L + k])
                bc[L + k] = b
                par ^= b
                if abs(alpha[L + k]) < vmin:
                    vmin = abs(alpha[L + k])
                    jmin = k
            if par:
                bc[L + jmin] ^= 1
        elif op == OP_SR0_FOLD:
            Q = 1 << q
            D = L >> q
            base = s_off[nid]
            best = -1.0
            bestl = 0
            for l in range(s_paths[nid]):
                tot = 0.0
                for k in range(Q):
                    acc = 0.0
                    for m in range(D):
                        acc += alpha[L + m * Q + k] * s_data[base + l * D + m]
                    tot += abs(acc)
                if tot > best:
                    best = tot
                    bestl = l
            sel[p] = bestl
            for k in range(Q):
                acc = 0.0
                for m in range(D):
                    acc += alpha[L + m * Q + k] * s_data[base + bestl * D + m]
                alpha[Q + k] = acc
        elif op == OP_SR0_EXPAND:
            Q = 1 << q
            D = L >> q
            row = s_off[nid] + sel[p] * D
            for m in range(D):
                f = 1 if s_data[row + m] < 0 else 0
                for k in range(Q):
                    bc[L + m * Q + k] = bc[Q + k] ^ f
        elif op == OP_SR1_FOLD:
            Q = 1 << q
            D = L >> q
            for k in range(Q):
                neg = 0
                mn = abs(alpha[L + k])
                for m in range(D):
                    v = alpha[L + m * Q + k]
                    if v < 0:
                        neg ^= 1
                    if abs(v) < mn:
                        mn = abs(v)
                alpha[Q + k] = -mn if neg else mn
        elif op == OP_SR1_FINISH:
            Q = 1 << q
            D = L >> q
            # parallel Wagner decoders, one per stride
            for k in range(Q):
                par = bc[Q + k]
                jmin = 0
                vmin = abs(alpha[L + k])
                for m in range(D):
                    v = alpha[L + m * Q + k]
                    b = 1 if v < 0 else 0
                    bc[L + m * Q + k] = b
                    par ^= b
                    if abs(v) < vmin:
                        vmin = abs(v)
                        jmin = m
                if par:
                    bc[L + jmin * Q + k] ^= 1
            # segmental checks on the SPC levels
            key = 0
            cnt = t_cnt[nid]
            for j in range(cnt):
                r = q + t_data[t_off[nid] + j]
                R = 1 << r
                par = 0
                for blk in range(1, L >> r, 2):
                    for k in range(R):
                        par ^= bc[L + blk * R + k]
                key |= par << j
            if key:
                odd_nodes += 1
                e = k_off[nid] + key
                start = k_start[e]
                bestv = 0.0
                bk1 = -1
                bk2 = -1
                bm = -1
                for c in range(start, start + k_len[e]):
                    k1 = pairs[c, 0] - 1
                    k2 = pairs[c, 1] - 1
                    if m_policy == M_JOINT:
                        for m in range(Q):
                            i1 = L + k1 * Q + m
                            i2 = L + k2 * Q + m
                            t1 = -alpha[i1] if bc[i1] else alpha[i1]
                            t2 = -alpha[i2] if bc[i2] else alpha[i2]
                            v = t1 + t2
                            if bk1 < 0 or v < bestv:
                                bestv = v
                                bk1 = k1
                                bk2 = k2
                                bm = m
                    else:
                        mm = 0
                        tmin = 0.0
                        for m in range(Q):
                            i1 = L + k1 * Q + m
                            t1 = -alpha[i1] if bc[i1] else alpha[i1]
                            if m == 0 or t1 < tmin:
                                tmin = t1
                                mm = m
                        i2 = L + k2 * Q + mm
                        t2 = -alpha[i2] if bc[i2] else alpha[i2]
                        v = tmin + t2
                        if bk1 < 0 or v < bestv:
                            bestv = v
                            bk1 = k1
                            bk2 = k2
                            bm = mm
                if bk1 >= 0:
                    bc[L + bk1 * Q + bm] ^= 1
                    bc[L + bk2 * Q + bm] ^= 1
    return odd_nodes


@njit(cache=True, nogil=True)
def _to_u(x, u):
    N = x.shape[0]
    for k in range(N):
        u[k] = x[k]
    h = 1
    while h < N:
        for s in range(0, N, 2 * h):
            for k in range(s, s + h):
                u[k] ^= u[k + h]
        h *= 2


@njit(cache=True, nogil=True)
def decode_batch_kernel(llrs, prog, s_off, s_paths, s_data, t_off, t_cnt, t_data, k_off, k_start, k_len,
                        pairs, m_policy, u_out, x_out, odd_out):
    B, N = llrs.shape
    alpha = np.zeros(2 * N)
    bc = np.zeros(2 * N, dtype=np.uint8)
    bl = np.zeros(2 * N, dtype=np.uint8)
    sel = np.zeros(64, dtype=np.int64)
    u = np.zeros(N, dtype=np.uint8)
    for b in range(B):
        for k in range(N):
            alpha[N + k] = llrs[b, k]
        odd_out[b] = run_program(prog, s_off, s_paths, s_data, t_off, t_cnt, t_data, k_off, k_start,
                                 k_len, pairs, m_policy, alpha, bc, bl, sel)
        for k in range(N):
            x_out[b, k] = bc[N + k]
        _to_u(x_out[b], u)
        for k in range(N):
            u_out[b, k] = u[k]


def _arr(x, dtype):
    return np.ascontiguousarray(np.asarray(x, dtype=dtype))


class FastDecoder:
    """Fast SC decoder executing a compiled plan.

    Parameters
    ----------
    plan : DecodePlan
    m_policy : {"joint", "per_segment"}
        Flip-bit selection; see :func:`artifact.seq_decoders.best_flip`.
    literal_flip_sets : bool
        Use the literal flip-set generator (see
        :func:`artifact.flip_sets.gen_sr1spc`).
    """

    def __init__(self, plan: DecodePlan, m_policy: str = "joint", literal_flip_sets: bool = False):
        if m_policy not in _M_POLICIES:
            raise ValueError(f"unknown m_policy {m_policy!r}")
        self.plan = plan
        self.N = 1 << plan.n
        comp = _Compiler(literal_flip_sets)
        comp.node(plan.root)
        self._m_policy = _M_POLICIES[m_policy]
        pairs = np.asarray(comp.pairs, dtype=np.int64).reshape(-1, 2)
        if pairs.size == 0:
            pairs = np.zeros((1, 2), dtype=np.int64)
        self._tables = (
            _arr(comp.prog, np.int64).reshape(-1, 4),
            _arr(comp.s_off or [0], np.int64),
            _arr(comp.s_paths or [0], np.int64),
            _arr(comp.s_data or [0.0], np.float64),
            _arr(comp.t_off or [0], np.int64),
            _arr(comp.t_cnt or [0], np.int64),
            _arr(comp.t_data or [0], np.int64),
            _arr(comp.k_off or [0], np.int64),
            _arr(comp.k_start or [0], np.int64),
            _arr(comp.k_len or [0], np.int64),
            pairs,
        )

    @property
    def program_length(self) -> int:
        return self._tables[0].shape[0]

    def decode_batch(self, llrs):
        """Decode rows of ``llrs``.

        Returns
        -------
        u : uint8[B, N]
            Leaf vectors (frozen positions are zero).
        x : uint8[B, N]
            Codewords.
        odd : int64[B]
            Number of SR1/SPC nodes that applied a flip, per frame.
        """
        llrs = np.ascontiguousarray(np.atleast_2d(llrs), dtype=np.float64)
        B, N = llrs.shape
        if N != self.N:
            raise ValueError(f"expected {self.N} LLRs per frame, got {N}")
        u = np.empty((B, N), dtype=np.uint8)
        x = np.empty((B, N), dtype=np.uint8)
        odd = np.empty(B, dtype=np.int64)
        decode_batch_kernel(llrs, *self._tables, self._m_policy, u, x, odd)
        return u, x, odd

    def decode(self, llr):
        """Decode one frame; returns ``(u, x, odd)``."""
        u, x, odd = self.decode_batch(np.asarray(llr)[None, :])
        return u[0], x[0], int(odd[0])
