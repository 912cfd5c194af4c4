from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causametrics import capacity as cap
from causametrics.capacity import (
    CapacityQuery,
    HypothesisViolation,
    ModelSummary,
    f_ent,
    f_min,
    max_capacity_iff,
    normalize_capacity,
    q_ent_nonsignalling_baseline,
    q_ent_value,
    q_sub_value,
    zero_capacity_iff,
)

from conftest import model


def test_fidelity_examples():
    assert f_ent(0.5, 2) == 0.625
    assert f_ent(1, 4) == 1
    assert math.isclose(f_ent(0, 3), 1 / 9)
    assert f_min(0.5, 2) == 0.75
    assert math.isclose(f_min(0, 3), 1 / 3)
    assert f_min(1, 3) == 1
    with pytest.raises(HypothesisViolation):
        f_min(0.5, 2, rho_b1_is_maximally_mixed=False)


def test_capacity_examples():
    assert q_ent_value(0.9, 2, 0.2) == 1
    assert q_ent_value(0.5, 2, 0.3) == 0
    assert q_ent_value(0.7, 3, 0.28) == math.log2(3)
    assert q_sub_value(0.5, 2, 0.3) == 1
    assert q_sub_value(0.8, 3, 0.25) == math.log2(3)
    assert q_sub_value(0, 2, 0.4) == 0


def test_boundary_examples():
    assert zero_capacity_iff(0.5, 0.3)
    assert not zero_capacity_iff(0.5, 0.375)
    assert max_capacity_iff(0.9, 2, 0.1)


def test_baseline_examples():
    assert q_ent_nonsignalling_baseline(2, 0.5) == 0
    assert q_ent_nonsignalling_baseline(2, 0.8) == 1
    assert q_ent_nonsignalling_baseline(3, 0) == 0


def test_normalization_examples():
    assert normalize_capacity(math.log2(3), 3) == 1
    assert normalize_capacity(0, 5) == 0
    assert normalize_capacity(1, 4) == 0.5


def test_queries_check_hypotheses():
    plain = ModelSummary.of(model([0.5, 0.2, 0.3], 2))
    mixed = ModelSummary.of(model([0.5, 0.2, 0.3], 2, "mixed_b1"))
    assert mixed.rho_b1_is_maximally_mixed and not mixed.rho_a1_is_maximally_mixed
    assert cap.capacity(CapacityQuery("sub", "fwd", 0.3, mixed)) == 1
    with pytest.raises(HypothesisViolation):
        cap.capacity(CapacityQuery("sub", "fwd", 0.3, plain))
    with pytest.raises(HypothesisViolation):
        cap.capacity(CapacityQuery("sub", "bwd", 0.3, mixed))
    assert cap.capacity(CapacityQuery("ent", "bwd", 0.9, plain)) == 1
    with pytest.raises(ValueError):
        CapacityQuery("ent", "fwd", 1.5, plain)
    with pytest.raises(ValueError):
        ModelSummary(0.7, 0.7, 2)


def test_table_columns_and_nan():
    rows = cap.capacity_table(ModelSummary.of(model([0.5, 0.2, 0.3], 2)))
    assert len(rows) == 101 and tuple(rows[0]) == cap.TABLE_COLUMNS
    assert all(math.isnan(r["q_sub_fwd"]) for r in rows)
    assert rows[0]["epsilon"] == 0.005 and rows[-1]["epsilon"] == 0.995


def _exact_code_dim(p: Fraction, d: int, eps: Fraction, power: int) -> int:
    # largest m <= d with f(m) >= 1 - eps, in rational arithmetic
    best = 1
    for m in range(1, d + 1):
        f = p + (1 - p) / Fraction(m ** power)
        if f >= 1 - eps:
            best = m
    return best


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 100), st.integers(0, 100), st.sampled_from([2, 3, 4]))
def test_closed_forms_match_exact_fidelity_search(pk, ek, d):
    p, eps = Fraction(pk, 100), Fraction(ek, 100)
    assert q_ent_value(float(p), d, float(eps)) == math.log2(_exact_code_dim(p, d, eps, 2))
    assert q_sub_value(float(p), d, float(eps)) == math.log2(_exact_code_dim(p, d, eps, 1))


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.sampled_from([2, 3, 4]))
def test_capacities_are_monotone(p, e1, e2, d):
    lo, hi = sorted((e1, e2))
    assert q_ent_value(p, d, lo) <= q_ent_value(p, d, hi)
    assert q_ent_value(p, d, lo) <= q_sub_value(p, d, lo) <= math.log2(d)
    assert q_ent_nonsignalling_baseline(d, lo) <= q_ent_value(p, d, lo)


def test_grid_defaults():
    g = cap.default_grid()
    assert len(g) == 101 and np.isclose(g[1] - g[0], 0.0099)


def test_rounding_at_the_saturation_branch():
    # 1 - 0.99 rounds above 0.01; the exact point p = 1 - eps saturates
    assert q_ent_value(0.01, 2, 0.99) == 1
    assert q_sub_value(0.01, 3, 0.99) == math.log2(3)
