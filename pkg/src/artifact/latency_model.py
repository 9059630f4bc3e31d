"""Decoding latency in abstract time steps.

Cost assumptions: one step per real addition/subtraction stage, per
comparison stage and per Wagner decode; bit operations are free. The rule
table below is the single place these assumptions live.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .node_classifier import DecodePlan, Kind, NodeSpec


@dataclass(frozen=True)
class CostRules:
    """Time steps charged per operation.

    Attributes
    ----------
    f, g : int
        LLR updates at a generic node.
    combine : int
        Partial-sum merge (XOR).
    rate0, rate1, rep, spc : int
        Basic node decoders (hard decision, LLR sum, Wagner).
    sr1_fold : int
        Source LLRs of an SR1/SPC node (sign product and minimum per stride).
    wagner : int
        The parallel Wagner decoders of the SR1 phase.
    sr0_fold : int
        Source LLRs of an SR0/REP node (signed sums).
    sr0_select : int
        Path metric and argmax, charged only when there is more than one path.
    flip_metric, flip_select : int
        Penalty additions and the comparison tree, charged when an SR1/SPC
        node has an odd S-PC.
    """

    f: int = 1
    g: int = 1
    combine: int = 0
    rate0: int = 0
    rate1: int = 0
    rep: int = 1
    spc: int = 1
    sr1_fold: int = 1
    wagner: int = 1
    sr0_fold: int = 1
    sr0_select: int = 1
    flip_metric: int = 1
    flip_select: int = 1

    @property
    def flip(self) -> int:
        return self.flip_metric + self.flip_select


def cost_rules() -> CostRules:
    """The default rule table."""
    return CostRules()


def _sr1_phase(spec: NodeSpec, rules: CostRules) -> int:
    src = spec.source
    if src.kind == Kind.RATE0:
        return rules.wagner
    if src.kind == Kind.REP:
        # Wagner runs alongside the REP decision on both candidate sources
        return rules.sr1_fold + rules.rep
    return rules.sr1_fold + node_latency(src, None, rules) + rules.wagner


def node_latency(spec: NodeSpec, gamma=None, rules: CostRules | None = None) -> int:
    """Steps to decode one node.

    Parameters
    ----------
    spec : NodeSpec
    gamma : array_like, optional
        Realized S-PC checks of an SR1/SPC node; any entry equal to 1 adds
        the flip cost. Nested SR1/SPC nodes are charged at their minimum.
    rules : CostRules, optional
    """
    rules = rules or cost_rules()
    k = spec.kind
    if k == Kind.RATE0:
        return rules.rate0
    if k == Kind.RATE1:
        return rules.rate1
    if k == Kind.REP:
        return rules.rep
    if k == Kind.SPC:
        return rules.spc
    if k == Kind.GENERIC:
        return rules.f + rules.g + rules.combine + sum(node_latency(c, None, rules) for c in spec.children)
    if k == Kind.SR0REP:
        sel = rules.sr0_select if spec.rep_levels else 0
        return rules.sr0_fold + sel + node_latency(spec.source, None, rules)
    if k == Kind.SR1SPC:
        t = _sr1_phase(spec, rules)
        if gamma is not None and np.any(np.asarray(gamma) == 1):
            t += rules.flip
        return t
    raise ValueError(f"unknown kind {k}")  # pragma: no cover


def variable_nodes(plan: DecodePlan) -> list:
    """SR1/SPC nodes whose cost depends on the channel (``L`` non-empty)."""
    return [s for s in plan.nodes() if s.kind == Kind.SR1SPC and s.spc_levels]


def code_bounds(plan: DecodePlan, rules: CostRules | None = None) -> tuple:
    """``(LB, UB)``: every S-PC even versus every SR1/SPC node flipping."""
    rules = rules or cost_rules()
    lb = node_latency(plan.root, None, rules)
    return lb, lb + rules.flip * len(variable_nodes(plan))


@dataclass
class LatencyBudget:
    """Steps spent on one decoded frame.

    Attributes
    ----------
    steps : int
        Total, ``traversal + sum of per_node``.
    traversal : int
        LLR updates at generic nodes.
    per_node : list of (NodeSpec, int)
        Cost of each pruned subtree at the top of the plan.
    """

    steps: int = 0
    traversal: int = 0
    per_node: list = field(default_factory=list)


def measure(plan: DecodePlan, trace, rules: CostRules | None = None) -> LatencyBudget:
    """Steps of one frame from its decode trace.

    Parameters
    ----------
    plan : DecodePlan
    trace : iterable of (NodeSpec, gamma)
        As produced by :func:`artifact.seq_decoders.decode_plan_reference`.
    """
    rules = rules or cost_rules()
    odd = {id(s) for s, g in trace if np.any(np.asarray(g) == 1)}

    def realized(s):
        base = node_latency(s, None, rules)
        extra = sum(rules.flip for x in s.walk() if id(x) in odd)
        return base + extra

    per_node = [(s, realized(s)) for s in plan.entries]
    n_generic = len(plan.root.walk_generic())
    traversal = n_generic * (rules.f + rules.g + rules.combine)
    return LatencyBudget(traversal + sum(c for _, c in per_node), traversal, per_node)


def steps_from_odd_counts(plan: DecodePlan, odd_counts, rules: CostRules | None = None) -> np.ndarray:
    """Per-frame steps from the number of flipping SR1/SPC nodes."""
    rules = rules or cost_rules()
    lb, _ = code_bounds(plan, rules)
    return lb + rules.flip * np.asarray(odd_counts, dtype=np.int64)
