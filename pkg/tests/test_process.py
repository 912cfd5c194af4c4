from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causametrics.process import (
    InstrumentElement,
    InvalidProcessMatrix,
    ProcessMatrix,
    can_signal,
    channel_process_matrix,
    degrade,
    depolarizing_choi,
    identity_choi,
    joint_probability,
    local_unitary,
    measure_prepare_instrument,
    normalize_direction,
    signalling_spectrum,
    state_process_matrix,
    validate,
)
from causametrics.sampling import haar_unitary, random_channel_choi, random_density, substream
from causametrics.tensor import maximally_mixed

from conftest import model


def test_w1_passes_every_check(w1):
    report = validate(w1)
    assert report.valid and report.psd and report.trace_ok and report.normalized


def test_product_of_mixed_states_is_valid():
    W = ProcessMatrix(np.eye(16) / 4, (2, 2, 2, 2))
    assert validate(W).valid


def test_wrong_trace_is_flagged():
    W = ProcessMatrix(np.eye(16) / 16, (2, 2, 2, 2))
    report = validate(W)
    assert not report.trace_ok and not report.valid


def test_bilinear_cross_term_is_caught():
    # a term linear in both parties' directions has the right trace and
    # passes every single-party check, so only the cross terms reveal it
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    ident = np.eye(2)
    bad = np.kron(np.kron(ident, X), np.kron(ident, X)) * 0.1
    W = ProcessMatrix(np.eye(16) / 4 + bad, (2, 2, 2, 2))
    report = validate(W)
    assert not report.normalized


def test_identity_channel_transmits_zero(w1):
    A = InstrumentElement(identity_choi(2), "A")
    inst = measure_prepare_instrument([np.diag([1.0, 0]), np.diag([0, 1.0])], np.diag([1.0, 0]), "B")
    probs = [joint_probability(w1, A, e) for e in inst.elements]
    assert np.isclose(probs[0], 1) and np.isclose(probs[1], 0)


def test_single_element_instruments_give_one(w1, w3):
    rng = substream(0)
    for W in (w1, w3):
        A = InstrumentElement(random_channel_choi(rng, 2, 2), "A")
        B = InstrumentElement(random_channel_choi(rng, 2, 2), "B")
        assert np.isclose(joint_probability(W, A, B), 1)


def test_invalid_probability_raises():
    W = ProcessMatrix(-np.eye(16) / 4, (2, 2, 2, 2))
    A = InstrumentElement(depolarizing_choi(2, 2), "A")
    with pytest.raises(InvalidProcessMatrix):
        joint_probability(W, A, InstrumentElement(depolarizing_choi(2, 2), "B"))


def test_instrument_must_sum_to_channel():
    with pytest.raises(ValueError):
        measure_prepare_instrument([np.diag([1.0, 0])], np.diag([1.0, 0]), "A")


def test_signalling_classification(w1, w2, w3, w_product):
    assert can_signal(w1, "fwd")[0] and not can_signal(w1, "bwd")[0]
    assert can_signal(w2, "bwd")[0] and not can_signal(w2, "fwd")[0]
    for W in (w3, w_product):
        assert not can_signal(W, "A->B")[0] and not can_signal(W, "B->A")[0]


def test_direction_aliases():
    assert normalize_direction("A->B") == "fwd"
    assert normalize_direction("B->A") == "bwd"
    with pytest.raises(ValueError):
        normalize_direction("sideways")


def test_json_roundtrip(w1):
    assert np.array_equal(ProcessMatrix.from_json(w1.to_json()).matrix, w1.matrix)


def test_channel_and_state_builders_are_valid():
    rng = substream(1)
    W = channel_process_matrix(random_channel_choi(rng, 3, 3), random_density(rng, 2), d_b2=2)
    assert validate(W).valid and can_signal(W)[0]
    S = state_process_matrix(np.kron(maximally_mixed(2), random_density(rng, 3)), 2, 2, d_a1=2)
    assert validate(S).valid and not can_signal(S)[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["A", "B"]))
def test_degradation_keeps_validity_and_cannot_create_signalling(seed, party):
    rng = substream(seed)
    p = rng.dirichlet(np.ones(3))
    p[0] = 0
    W = model(p / p.sum(), 2)
    from causametrics.harmonic import reduce

    W = reduce(W)
    Wd = degrade(W, party, random_channel_choi(rng, 2, 2), random_channel_choi(rng, 2, 2))
    assert validate(Wd).valid
    assert not can_signal(Wd, "fwd")[0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_signalling_spectrum_is_unitarily_invariant(seed):
    from causametrics.harmonic import reduce

    rng = substream(seed)
    W = reduce(model(rng.dirichlet(np.ones(3)), 2))
    us = [haar_unitary(rng, 2) for _ in range(4)]
    Wu = local_unitary(local_unitary(W, "A", us[0], us[1]), "B", us[2], us[3])
    for direction in ("fwd", "bwd"):
        assert np.allclose(signalling_spectrum(W, direction), signalling_spectrum(Wu, direction), atol=1e-10)
