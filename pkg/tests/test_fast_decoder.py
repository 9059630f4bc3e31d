import json
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact.harness import frame_llrs
from artifact.node_classifier import FSSC, PLAIN_SC, SNFSC, Kind, classify, sr1spc_nodes
from artifact.polar_code import construct, from_indicator
from artifact.fast_decoder import FastDecoder
from artifact.sc_decoder import SCDecoder
from artifact.seq_decoders import decode_plan_reference


def odd_in_trace(trace):
    return sum(int(np.any(g == 1)) for _, g in trace)


@given(
    st.integers(2, 8),
    st.floats(0.1, 0.9),
    st.integers(0, 2**32 - 1),
    st.sampled_from([SNFSC, FSSC]),
    st.sampled_from(["joint", "per_segment"]),
)
def test_kernel_matches_reference(n, p, seed, features, policy):
    rng = np.random.default_rng(seed)
    # sorted-ish random indicator to exercise sequence nodes
    c = (np.sort(rng.random(1 << n)) ** 0.5 + 0.3 * rng.random(1 << n) > 1 - p).astype(np.uint8)
    plan = classify(c, features)
    dec = FastDecoder(plan, policy)
    llrs = rng.normal(0.4, 2.0, (8, c.size))
    u, x, odd = dec.decode_batch(llrs)
    for i in range(8):
        ref = decode_plan_reference(plan, llrs[i], policy)
        assert np.array_equal(x[i], ref.codeword)
        assert np.array_equal(u[i], ref.u)
        assert odd[i] == odd_in_trace(ref.trace)


@pytest.mark.parametrize("n, K", [(7, 64), (8, 128), (9, 300), (10, 512)])
def test_kernel_matches_reference_on_5g_codes(n, K):
    code = construct(n, K)
    plan = classify(code)
    _, llrs = frame_llrs(code, 1.0, 3, 0, range(40))
    u, x, odd = FastDecoder(plan).decode_batch(llrs)
    for i in range(40):
        ref = decode_plan_reference(plan, llrs[i])
        assert np.array_equal(x[i], ref.codeword)
        assert odd[i] == odd_in_trace(ref.trace)


@pytest.mark.parametrize("features", [PLAIN_SC, FSSC])
def test_sc_equivalent_plans(features):
    code = construct(9, 256)
    _, llrs = frame_llrs(code, 1.5, 0, 0, range(500))
    _, x_sc = SCDecoder(code).decode_batch(llrs)
    _, x, odd = FastDecoder(classify(code, features)).decode_batch(llrs)
    assert np.array_equal(x, x_sc)
    assert not odd.any()


def test_decode_single_and_frozen_zero():
    code = construct(8, 100)
    dec = FastDecoder(classify(code))
    _, llrs = frame_llrs(code, 0.0, 1, 0, range(30))
    for llr in llrs:
        u, x, odd = dec.decode(llr)
        assert not u[code.frozen_mask].any()
        assert 0 <= odd <= len(sr1spc_nodes(dec.plan))


def test_literal_flip_sets_option():
    code = construct(10, 853)
    plan = classify(code)
    _, llrs = frame_llrs(code, 2.0, 1, 0, range(50))
    a = FastDecoder(plan, literal_flip_sets=True).decode_batch(llrs)[1]
    for i in range(50):
        ref = decode_plan_reference(plan, llrs[i], literal_flip_sets=True)
        assert np.array_equal(a[i], ref.codeword)


def test_argument_checks():
    plan = classify(construct(4, 8))
    with pytest.raises(ValueError):
        FastDecoder(plan, m_policy="greedy")
    with pytest.raises(ValueError):
        FastDecoder(plan).decode_batch(np.zeros((2, 8)))


def test_program_is_shorter_than_sc():
    code = construct(10, 512)
    lengths = {f: FastDecoder(classify(code, f)).program_length for f in (PLAIN_SC, FSSC, SNFSC)}
    assert lengths[SNFSC] < lengths[FSSC] < lengths[PLAIN_SC]


_FALLBACK_SCRIPT = """
import json, numpy as np
from artifact import NUMBA_ENABLED
from artifact.harness import frame_llrs
from artifact.polar_code import construct
from artifact.node_classifier import classify
from artifact.fast_decoder import FastDecoder
from artifact.sc_decoder import SCDecoder
code = construct(7, 64)
_, llrs = frame_llrs(code, 1.0, 5, 0, range(64))
_, xs = SCDecoder(code).decode_batch(llrs)
_, xf, odd = FastDecoder(classify(code)).decode_batch(llrs)
print(json.dumps({"numba": NUMBA_ENABLED, "sc": xs.tolist(), "fast": xf.tolist(), "odd": odd.tolist()}))
"""


def test_pure_numpy_fallback_matches():
    env = dict(os.environ, ARTIFACT_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", _FALLBACK_SCRIPT], env=env, capture_output=True, text=True, check=True)
    res = json.loads(out.stdout)
    assert res["numba"] is False
    code = construct(7, 64)
    _, llrs = frame_llrs(code, 1.0, 5, 0, range(64))
    _, xs = SCDecoder(code).decode_batch(llrs)
    _, xf, odd = FastDecoder(classify(code)).decode_batch(llrs)
    assert res["sc"] == xs.tolist()
    assert res["fast"] == xf.tolist()
    assert res["odd"] == odd.tolist()
