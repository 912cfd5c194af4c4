from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causametrics.harmonic import HarmonicModel, branch, build_global, mixture, preset_psi, reduce
from causametrics.process import can_signal, validate
from causametrics.sampling import random_pure_state, substream
from causametrics.tensor import Factorization, identity_vector, is_psd, maximally_mixed, partial_trace, projector

from conftest import model


def test_reduction_is_the_branch_mixture():
    # the reduced W equals p1 W1 + p2 W2 + p3 W3 built from seed marginals
    rng = substream(0)
    psi = random_pure_state(rng, 2 * 2 * 2)
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
    m = HarmonicModel(tuple(np.sqrt([0.2, 0.5, 0.3]) * phases), 2, psi, 2)
    assert np.allclose(reduce(m).matrix, mixture(m).matrix, atol=1e-13)


def test_reduction_matches_explicit_partial_trace():
    m = model([0.4, 0.35, 0.25], 2, "mixed_b1")
    g = build_global(m)
    traced = partial_trace(g.density(), g.systems, ["g", "e1", "e2", "e3"])
    assert np.allclose(traced, reduce(m).matrix)
    assert is_psd(g.density())


def test_pure_branches():
    W1, W2 = reduce(model([1, 0, 0])), reduce(model([0, 1, 0]))
    phi = projector(identity_vector(2))
    rho0 = np.diag([1.0, 0])
    assert np.allclose(W1.matrix, np.kron(np.kron(rho0, phi), np.eye(2)))
    assert np.allclose(W2.matrix, branch(model([0, 1, 0]), 2).matrix)
    assert can_signal(W2, "bwd")[0] and not can_signal(W2, "fwd")[0]


def test_branch_two_seeds_receiver_with_y_marginal():
    # a seed whose x and y marginals differ pins down which one reaches b1
    psi = np.kron(np.array([1, 0]), np.array([0, 1])).astype(complex)
    m = HarmonicModel((0, 1, 0), 2, psi, 1)
    W = reduce(m)
    rho_b1 = partial_trace(W.matrix, W.systems, ["a1", "a2", "b2"]) / 4
    assert np.allclose(rho_b1, np.diag([0, 1]))


def test_presets_and_marginals():
    vec, k = preset_psi("mixed_b1", 3)
    assert k == 3 and np.isclose(np.linalg.norm(vec), 1)
    m = HarmonicModel.from_preset((1, 0, 0), 3, "mixed_b1")
    assert m.is_maximally_mixed("y") and not m.is_maximally_mixed("x")
    assert np.allclose(m.rho_b1, maximally_mixed(3))
    with pytest.raises(ValueError):
        preset_psi("bell", 2)


def test_invalid_models_rejected():
    with pytest.raises(ValueError):
        HarmonicModel((1, 1, 0), 2, np.array([1, 0, 0, 0]))
    with pytest.raises(ValueError):
        HarmonicModel((1, 0, 0), 2, np.array([1, 0, 0]))
    with pytest.raises(ValueError):
        HarmonicModel.from_preset((1, 0, 0), 9)


def test_json_roundtrip():
    m = model([0.3, 0.3, 0.4], 2, "mixed_b1")
    back = HarmonicModel.from_json(m.to_json())
    assert np.allclose(back.psi, m.psi) and back.alpha == m.alpha
    preset = HarmonicModel.from_json({"alpha": [[1, 0], [0, 0], [0, 0]], "dim": 2, "psi": {"preset": "product"}})
    assert preset.e3_dim == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 3]), st.sampled_from(["product", "mixed_b1"]))
def test_random_models_are_valid_and_phase_blind(seed, d, kind):
    rng = substream(seed)
    p = rng.dirichlet(np.ones(3))
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
    m = HarmonicModel.from_preset(tuple(np.sqrt(p) * phases), d, kind)
    W = reduce(m)
    assert validate(W).valid
    assert np.isclose(np.trace(W.matrix).real, d * d)
    assert np.allclose(W.matrix, reduce(HarmonicModel.from_preset(tuple(np.sqrt(p)), d, kind)).matrix)
