"""Polar codes with fast simplified successive-cancellation decoding.

The decoder prunes the SC tree at Rate-0, Rate-1, repetition and
single-parity-check nodes, and at two sequence node types: SR0/REP (a source
followed by Rate-0 or repetition siblings) and SR1/SPC (a source followed by
Rate-1 or SPC siblings).
"""

from ._jit import NUMBA_ENABLED
from .channel import ChannelConfig, bpsk, frame_rng, hard_decision, transmit
from .fast_decoder import FastDecoder
from .harness import SimConfig, SimResult, run_fer
from .latency_model import CostRules, code_bounds, cost_rules, measure, node_latency
from .node_classifier import DecodePlan, Kind, NodeSpec, classify, count_sr1spc
from .polar_code import PolarCode, construct, encode, extract_message, k_for_rate, polar_transform
from .sc_decoder import SCDecoder, sc_decode
from .seq_decoders import decode_plan_reference

__version__ = "0.1.0"

__all__ = [
    "NUMBA_ENABLED", "ChannelConfig", "bpsk", "frame_rng", "hard_decision", "transmit",
    "FastDecoder", "SimConfig", "SimResult", "run_fer", "CostRules", "code_bounds",
    "cost_rules", "measure", "node_latency", "DecodePlan", "Kind", "NodeSpec", "classify",
    "count_sr1spc", "PolarCode", "construct", "encode", "extract_message", "k_for_rate",
    "polar_transform", "SCDecoder", "sc_decode", "decode_plan_reference",
]
