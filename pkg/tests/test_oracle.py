from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causametrics.capacity import f_ent, f_min
from causametrics.harmonic import reduce
from causametrics.oracle import (
    PreconditionError,
    canonical_protocol,
    classical_identity_process,
    compose_decoder,
    ent_fidelity,
    min_output_fidelity,
    nonsignalling_fidelity_check,
    oracle_report,
    output_fidelities,
    random_protocol,
    sampled_max_fidelity,
    separable_fidelity,
)
from causametrics.process import state_process_matrix
from causametrics.tensor import max_entangled, maximally_mixed

from conftest import model


def test_canonical_examples():
    for d in (2, 3):
        W = model([1, 0, 0], d)
        assert np.isclose(ent_fidelity(W, canonical_protocol(W, d)), 1)
    W3 = model([0, 0, 1], 2)
    assert np.isclose(ent_fidelity(W3, canonical_protocol(W3, 2)), 0.25)
    W = model([0.8, 0.1, 0.1], 2)
    assert np.isclose(ent_fidelity(W, canonical_protocol(W, 2)), 0.85)


def test_backward_direction_uses_p2():
    W = model([0.1, 0.6, 0.3], 3)
    for m in (1, 2, 3):
        assert np.isclose(ent_fidelity(W, canonical_protocol(W, m, "bwd"), "bwd"), f_ent(0.6, m))


def test_min_output_fidelity_is_flat():
    W = model([0.5, 0.2, 0.3], 2, "mixed_b1")
    proto = canonical_protocol(W, 2)
    values = output_fidelities(W, proto, 50, seed=1)
    assert np.allclose(values, 0.75)
    W1 = model([1, 0, 0], 3, "mixed_b1")
    assert np.isclose(min_output_fidelity(W1, canonical_protocol(W1, 2)), 1)


def test_classical_identity_channel():
    W = classical_identity_process(2)
    values = output_fidelities(W, canonical_protocol(W, 2), 0)
    assert np.isclose(values[0], 0.5)


def test_entangled_resource_is_capped():
    W = state_process_matrix(max_entangled(2), 2, 2)
    assert nonsignalling_fidelity_check(W, 2, 40, seed=0) <= 0.25 + 1e-9
    product = state_process_matrix(np.kron(maximally_mixed(2), np.diag([1.0, 0])), 2, 2)
    assert np.isclose(ent_fidelity(product, canonical_protocol(product, 2)), 0.25)
    with pytest.raises(PreconditionError):
        nonsignalling_fidelity_check(reduce(model([1, 0, 0])), 2, 2)


def test_separable_states_are_capped():
    for seed in range(10):
        assert separable_fidelity(2, seed=seed) <= 0.5 + 1e-9
        assert separable_fidelity(3, seed=seed) <= 1 / 3 + 1e-9


def test_code_dimension_bounds():
    with pytest.raises(ValueError):
        canonical_protocol(model([1, 0, 0], 2), 3)


def test_report_and_reproducibility():
    W = model([0.8, 0.1, 0.1], 2)
    r = oracle_report(W, 2, 20, seed=7)
    assert r.agrees and r.formula == 0.85
    assert r.sampled_max == oracle_report(W, 2, 20, seed=7).sampled_max


def test_post_operation_and_decoder_composition():
    W = model([0.6, 0.2, 0.2], 2)
    proto = canonical_protocol(W, 2)
    ident = np.outer([1, 0, 0, 1], [1, 0, 0, 1]).astype(complex)
    assert np.isclose(ent_fidelity(W, proto.with_post_op(ident)), f_ent(0.6, 2))
    assert np.isclose(ent_fidelity(W, compose_decoder(proto, ident)), f_ent(0.6, 2))
    depol = np.eye(4) / 2
    assert np.isclose(ent_fidelity(W, compose_decoder(proto, depol)), 0.25)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_random_protocols_never_beat_the_formula(seed, d):
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(3))
    W = reduce(model(p, d))
    for m in range(1, d + 1):
        assert sampled_max_fidelity(W, m, 6, seed) <= f_ent(p[0], m) + 1e-9


def test_post_operation_can_beat_the_passive_optimum():
    # resetting M to |0> while the receiver emits |0> on M' turns the
    # non-signalling branches into a pure product state with overlap 1/m
    m = 2
    zero = np.diag([1.0, 0.0]).astype(complex)
    reset = np.kron(np.eye(m), zero)
    for p1 in (0.0, 0.2, 0.5, 0.9):
        W = model([p1, 0, 1 - p1], 2)
        proto = canonical_protocol(W, m)
        emit_zero = np.kron(np.eye(2), np.kron(zero, zero))
        active = proto.with_decoder(emit_zero).with_post_op(reset)
        assert np.isclose(ent_fidelity(W, active), 1 / m)
        assert (ent_fidelity(W, active) > f_ent(p1, m)) == (p1 < 1 / (m + 1))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_random_protocols_never_beat_min_fidelity(seed, d):
    # the uniform superposition is always among the probed inputs
    p = np.random.default_rng(seed).dirichlet(np.ones(3))
    W = model(p, d, "mixed_b1")
    proto = random_protocol(seed, W, 2)
    assert min_output_fidelity(W, proto, 10, seed) <= f_min(p[0], 2) + 1e-9
