"""Closed-form one-shot capacities of harmonic clean models.

Capacities are in qubits (log base 2). ``p`` is the weight of the branch that
carries the sender's output to the receiver: p1 forward (A->B), p2 backward.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .process import normalize_direction

FLOOR_SLACK = 1e-12


class HypothesisViolation(ValueError):
    """The closed form does not apply to this model."""


@dataclass(frozen=True)
class ModelSummary:
    p1: float
    p2: float
    d: int
    rho_b1_is_maximally_mixed: bool = False
    rho_a1_is_maximally_mixed: bool = False

    def __post_init__(self):
        if self.p1 < 0 or self.p2 < 0 or self.p1 + self.p2 > 1 + 1e-12:
            raise ValueError(f"need p1, p2 >= 0 and p1 + p2 <= 1, got {self.p1}, {self.p2}")
        if self.d < 1:
            raise ValueError("d must be positive")

    @classmethod
    def of(cls, model) -> "ModelSummary":
        p1, p2, _ = model.p
        return cls(p1, p2, model.d,
                   model.is_maximally_mixed("y", 1e-9), model.is_maximally_mixed("x", 1e-9))


@dataclass(frozen=True)
class CapacityQuery:
    task: str
    direction: str
    epsilon: float
    model: ModelSummary

    def __post_init__(self):
        if self.task not in ("ent", "sub"):
            raise ValueError(f"task must be 'ent' or 'sub', got {self.task!r}")
        object.__setattr__(self, "direction", normalize_direction(self.direction))
        _check_epsilon(self.epsilon)

    @property
    def p(self) -> float:
        return self.model.p1 if self.direction == "fwd" else self.model.p2


def _check_epsilon(eps):
    if not 0 <= eps <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {eps}")


def _check_p(p):
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")


def f_ent(p1: float, m: int) -> float:
    """Optimal entanglement transmission fidelity at code dimension m."""
    _check_p(p1)
    return p1 + (1 - p1) / m ** 2


def f_min(p1: float, m: int, rho_b1_is_maximally_mixed: bool = True) -> float:
    """Optimal minimum output fidelity; only known when the receiver's seed marginal is maximally mixed."""
    _check_p(p1)
    if not rho_b1_is_maximally_mixed:
        raise HypothesisViolation("no closed form for the minimum output fidelity unless rho_b1 is maximally mixed")
    return p1 + (1 - p1) / m


def _max_code_dim(p: float, d: int, eps: float, power: float) -> int:
    _check_p(p)
    _check_epsilon(eps)
    if p >= 1 - eps - FLOOR_SLACK:
        return d
    ratio = eps / (1.0 - p)
    if ratio >= 1.0:
        return d
    bound = (1.0 / (1.0 - ratio)) ** power
    return max(1, min(d, math.floor(bound + FLOOR_SLACK)))


def max_code_dim_ent(p: float, d: int, eps: float) -> int:
    return _max_code_dim(p, d, eps, 0.5)


def max_code_dim_sub(p: float, d: int, eps: float) -> int:
    return _max_code_dim(p, d, eps, 1.0)


def q_ent_value(p: float, d: int, eps: float) -> float:
    return math.log2(max_code_dim_ent(p, d, eps))


def q_sub_value(p: float, d: int, eps: float) -> float:
    return math.log2(max_code_dim_sub(p, d, eps))


def q_ent(query: CapacityQuery) -> float:
    if query.task != "ent":
        raise ValueError("q_ent needs an entanglement transmission query")
    return q_ent_value(query.p, query.model.d, query.epsilon)


def q_sub(query: CapacityQuery) -> float:
    if query.task != "sub":
        raise ValueError("q_sub needs a subspace transmission query")
    s = query.model
    ok = s.rho_b1_is_maximally_mixed if query.direction == "fwd" else s.rho_a1_is_maximally_mixed
    if not ok:
        which = "rho_b1" if query.direction == "fwd" else "rho_a1"
        raise HypothesisViolation(f"subspace capacity needs {which} maximally mixed")
    return q_sub_value(query.p, s.d, query.epsilon)


def capacity(query: CapacityQuery) -> float:
    return q_ent(query) if query.task == "ent" else q_sub(query)


def zero_capacity_iff(p1: float, eps: float) -> bool:
    """True exactly when no code dimension above 1 is achievable (d >= 2)."""
    return p1 < 1 - 4 * eps / 3 - FLOOR_SLACK


def max_capacity_iff(p1: float, d: int, eps: float) -> bool:
    ratio = math.inf if p1 >= 1 else eps / (1 - p1)
    return ratio >= 1 - 1 / d ** 2 - FLOOR_SLACK


def q_ent_nonsignalling_baseline(d: int, eps: float) -> float:
    """Best entanglement transmission capacity of any non-signalling resource."""
    _check_epsilon(eps)
    if eps >= 1:
        return math.log2(d)
    m = math.floor((1 / (1 - eps)) ** 0.5 + FLOOR_SLACK)
    return math.log2(max(1, min(d, m)))


def normalize_capacity(value: float, d: int, task: str = "ent") -> float:
    if value < 0:
        raise ValueError("capacities are non-negative")
    if task not in ("ent", "sub"):
        raise ValueError(f"unknown task {task!r}")
    if d <= 1:
        return 0.0
    return value / math.log2(d)


def default_grid(n: int = 101, lo: float = 0.005, hi: float = 0.995) -> np.ndarray:
    return np.linspace(lo, hi, n)


def capacity_table(summary: ModelSummary, grid=None) -> list[dict]:
    """Rows of epsilon, both capacities in both directions, and the baseline.

    Subspace columns are NaN where the closed form's hypothesis fails.
    """
    grid = default_grid() if grid is None else grid
    rows = []
    for eps in grid:
        eps = float(eps)
        row = {"epsilon": eps,
               "q_ent_fwd": q_ent_value(summary.p1, summary.d, eps),
               "q_ent_bwd": q_ent_value(summary.p2, summary.d, eps)}
        row["q_sub_fwd"] = (q_sub_value(summary.p1, summary.d, eps)
                            if summary.rho_b1_is_maximally_mixed else float("nan"))
        row["q_sub_bwd"] = (q_sub_value(summary.p2, summary.d, eps)
                            if summary.rho_a1_is_maximally_mixed else float("nan"))
        row["baseline"] = q_ent_nonsignalling_baseline(summary.d, eps)
        rows.append(row)
    return rows


TABLE_COLUMNS = ("epsilon", "q_ent_fwd", "q_ent_bwd", "q_sub_fwd", "q_sub_bwd", "baseline")
