"""Static analysis of a code's frozen pattern into a pruned decoding plan.

Every subtree of the decoding tree is matched greedily from the root: the
four basic patterns first, then SR1/SPC, then SR0/REP, otherwise the node is
generic and both children are analysed.

Node geometry: a node at level ``p`` with 1-based index ``i`` covers the
0-based leaves ``[(i-1) 2**p, i 2**p)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .polar_code import PolarCode


class Kind(str, Enum):
    RATE0 = "rate0"
    RATE1 = "rate1"
    REP = "rep"
    SPC = "spc"
    SR0REP = "sr0rep"
    SR1SPC = "sr1spc"
    GENERIC = "generic"


BASIC_KINDS = (Kind.RATE0, Kind.RATE1, Kind.REP, Kind.SPC)

PLAIN_SC = "sc"
FSSC = "fssc"
SNFSC = "snfsc"
FEATURE_SETS = (PLAIN_SC, FSSC, SNFSC)


@dataclass(frozen=True)
class NodeSpec:
    """One node of a decoding plan.

    Attributes
    ----------
    level : int
        Tree level ``p``; the node spans ``2**p`` leaves.
    index : int
        1-based position among the nodes of that level.
    kind : Kind
    q : int or None
        Source level for sequence nodes.
    rep_levels : tuple of int
        SR0/REP: levels whose left sibling on the right path is REP
        (the rest are Rate-0).
    spc_levels : tuple of int
        SR1/SPC: the set ``L`` of levels whose right sibling is SPC
        (the rest are Rate-1).
    source : NodeSpec or None
        Source node of a sequence node, itself classified.
    children : tuple of NodeSpec
        ``(left, right)`` for generic nodes.
    """

    level: int
    index: int
    kind: Kind
    q: int | None = None
    rep_levels: tuple = ()
    spc_levels: tuple = ()
    source: "NodeSpec | None" = None
    children: tuple = ()

    @property
    def length(self) -> int:
        return 1 << self.level

    @property
    def start(self) -> int:
        """0-based first leaf."""
        return (self.index - 1) << self.level

    @property
    def order(self) -> int:
        """``p - q`` for sequence nodes."""
        return self.level - self.q

    def walk(self):
        """Yield this node and every nested node, depth first."""
        yield self
        for ch in self.children:
            yield from ch.walk()
        if self.source is not None:
            yield from self.source.walk()

    def walk_generic(self) -> list:
        """Generic nodes of the top-level tree, not descending into sources."""
        if self.kind != Kind.GENERIC:
            return []
        return [self] + self.children[0].walk_generic() + self.children[1].walk_generic()

    def describe(self) -> str:
        if self.kind == Kind.SR1SPC:
            L = "{" + ",".join(map(str, self.spc_levels)) + "}"
            return f"sr1spc NS({self.level},{self.q},{L}) len={self.length} start={self.start}"
        if self.kind == Kind.SR0REP:
            R = "{" + ",".join(map(str, self.rep_levels)) + "}"
            return f"sr0rep p={self.level} q={self.q} rep={R} len={self.length} start={self.start}"
        return f"{self.kind.value} len={self.length} start={self.start}"


@dataclass(frozen=True)
class DecodePlan:
    """Pruned decoding tree of one code.

    Attributes
    ----------
    root : NodeSpec
    features : str
        ``"sc"``, ``"fssc"`` or ``"snfsc"``.
    n : int
    """

    root: NodeSpec
    features: str
    n: int
    entries: tuple = field(init=False)

    def __post_init__(self):
        out = []

        def rec(s):
            if s.kind == Kind.GENERIC:
                rec(s.children[0])
                rec(s.children[1])
            else:
                out.append(s)

        rec(self.root)
        object.__setattr__(self, "entries", tuple(out))

    def nodes(self):
        """Every node in the plan, including generic and nested ones."""
        return list(self.root.walk())

    def render(self) -> str:
        """Indented text listing."""
        lines = []

        def rec(s, depth, tag=""):
            lines.append("  " * depth + tag + s.describe())
            for ch in s.children:
                rec(ch, depth + 1)
            if s.source is not None:
                rec(s.source, depth + 1, "source: ")

        rec(self.root, 0)
        return "\n".join(lines)


class _Matcher:
    def __init__(self, c, features, min_basic_len, min_seq_len):
        self.c = np.asarray(c, dtype=np.int64)
        self.cs = np.concatenate([[0], np.cumsum(self.c)])
        self.basic = features in (FSSC, SNFSC)
        self.seq = features == SNFSC
        self.min_basic_len = min_basic_len
        self.min_seq_len = min_seq_len

    def ones(self, s, L):
        return int(self.cs[s + L] - self.cs[s])

    def basic_kind(self, s, L):
        w = self.ones(s, L)
        if w == 0:
            return Kind.RATE0
        if w == L:
            return Kind.RATE1
        if L >= self.min_basic_len:
            if w == 1 and self.c[s + L - 1]:
                return Kind.REP
            if w == L - 1 and not self.c[s]:
                return Kind.SPC
        return None

    def match_sr1spc(self, p, s):
        """Smallest source level ``q`` whose right siblings are all Rate-1/SPC."""
        kinds = [self.basic_kind(s + (1 << r), 1 << r) for r in range(p)]
        for q in range(p):
            if all(k in (Kind.RATE1, Kind.SPC) for k in kinds[q:p]):
                return q, tuple(r for r in range(q, p) if kinds[r] == Kind.SPC)
        return None

    def match_sr0rep(self, p, s):
        """Smallest source level ``q`` whose left siblings are all Rate-0/REP."""
        L = 1 << p
        kinds = [self.basic_kind(s + L - (2 << r), 1 << r) for r in range(p)]
        for q in range(p):
            if all(k in (Kind.RATE0, Kind.REP) for k in kinds[q:p]):
                return q, tuple(r for r in range(q, p) if kinds[r] == Kind.REP)
        return None

    def classify(self, p, i):
        L = 1 << p
        s = (i - 1) * L
        if self.basic or p == 0:
            k = self.basic_kind(s, L)
            if k is not None:
                return NodeSpec(p, i, k)
        if self.seq and L >= self.min_seq_len:
            m = self.match_sr1spc(p, s)
            if m is not None:
                q, spc = m
                src = self.classify(q, (s >> q) + 1)
                return NodeSpec(p, i, Kind.SR1SPC, q=q, spc_levels=spc, source=src)
            m = self.match_sr0rep(p, s)
            if m is not None:
                q, rep = m
                src = self.classify(q, ((s + L) >> q))
                return NodeSpec(p, i, Kind.SR0REP, q=q, rep_levels=rep, source=src)
        left = self.classify(p - 1, 2 * i - 1)
        right = self.classify(p - 1, 2 * i)
        return NodeSpec(p, i, Kind.GENERIC, children=(left, right))


def classify(code, features: str = SNFSC, min_basic_len: int = 2, min_seq_len: int = 4) -> DecodePlan:
    """Build the decoding plan of a code.

    Parameters
    ----------
    code : PolarCode or array_like
        Code or its indicator vector.
    features : {"sc", "fssc", "snfsc"}
        ``"sc"`` keeps the full tree, ``"fssc"`` prunes Rate-0/Rate-1/REP/SPC
        nodes, ``"snfsc"`` additionally matches SR1/SPC and SR0/REP nodes.
    min_basic_len : int
        Smallest REP/SPC node length (Rate-0/Rate-1 match at any length).
    min_seq_len : int
        Smallest SR1/SPC or SR0/REP node length.
    """
    if features not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {features!r}")
    c = code.indicator if isinstance(code, PolarCode) else np.asarray(code)
    N = c.size
    n = N.bit_length() - 1
    if N < 1 or (1 << n) != N:
        raise ValueError("indicator length must be a power of two")
    m = _Matcher(c, features, min_basic_len, min_seq_len)
    return DecodePlan(m.classify(n, 1), features, n)


def sr1spc_nodes(plan: DecodePlan, include_nested: bool = True, include_empty: bool = True):
    """List SR1/SPC nodes of a plan.

    Parameters
    ----------
    include_nested : bool
        Also report SR1/SPC nodes inside the source of another sequence node.
    include_empty : bool
        Also report nodes with ``L`` empty (every sibling Rate-1).
    """
    out = []

    def rec(s, nested):
        if s.kind == Kind.SR1SPC and (include_empty or s.spc_levels) and (include_nested or not nested):
            out.append(s)
        for ch in s.children:
            rec(ch, nested)
        if s.source is not None:
            rec(s.source, True)

    rec(plan.root, False)
    return out


def count_sr1spc(plan: DecodePlan, include_nested: bool = False, include_empty: bool = False) -> dict:
    """Histogram ``{node length: count}`` of SR1/SPC nodes.

    The defaults count top-level nodes that carry at least one SPC sibling,
    which is the convention of the published node-count tables.
    """
    return dict(sorted(Counter(s.length for s in sr1spc_nodes(plan, include_nested, include_empty)).items()))


def pattern(kind: Kind, length: int) -> np.ndarray:
    """Indicator bits of a basic node."""
    c = np.zeros(length, dtype=np.uint8)
    if kind == Kind.RATE1:
        c[:] = 1
    elif kind == Kind.REP:
        c[-1] = 1
    elif kind == Kind.SPC:
        c[1:] = 1
    elif kind != Kind.RATE0:
        raise ValueError(f"{kind} is not a basic kind")
    return c


def node_indicator(spec: NodeSpec) -> np.ndarray:
    """Expand a node back to the indicator bits of its leaves."""
    L = spec.length
    if spec.kind in BASIC_KINDS:
        return pattern(spec.kind, L)
    if spec.kind == Kind.GENERIC:
        return np.concatenate([node_indicator(spec.children[0]), node_indicator(spec.children[1])])
    out = np.zeros(L, dtype=np.uint8)
    q = spec.q
    if spec.kind == Kind.SR1SPC:
        out[: 1 << q] = node_indicator(spec.source)
        for r in range(q, spec.level):
            k = Kind.SPC if r in spec.spc_levels else Kind.RATE1
            out[1 << r: 2 << r] = pattern(k, 1 << r)
        return out
    out[L - (1 << q):] = node_indicator(spec.source)
    for r in range(q, spec.level):
        k = Kind.REP if r in spec.rep_levels else Kind.RATE0
        out[L - (2 << r): L - (1 << r)] = pattern(k, 1 << r)
    return out


def plan_indicator(plan: DecodePlan) -> np.ndarray:
    """Indicator vector reconstructed from a plan."""
    return node_indicator(plan.root)
