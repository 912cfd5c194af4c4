"""Causality measures and a property-test harness for their axioms.

A measure maps a correlation to a non-negative number that cannot grow under
local operations and is positive only if the sender can signal (classical
measures) or quantum signal (quantum measures).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import capacity as cap
from .harmonic import HarmonicModel, reduce
from .oracle import canonical_protocol, ent_fidelity, mixed_protocol, sampled_max_fidelity
from .process import (
    ProcessMatrix,
    can_signal,
    channel_process_matrix,
    degrade,
    identity_choi,
    local_unitary,
    normalize_direction,
    state_process_matrix,
)
from .sampling import haar_unitary, random_channel_choi, substream

KINDS = ("zero", "signalling", "q_signalling", "capacity", "normalized")
QUANTUM_KINDS = ("q_signalling", "capacity", "normalized")


class InapplicableMeasure(ValueError):
    pass


@dataclass(frozen=True)
class MeasureDescriptor:
    name: str
    direction: str = "fwd"
    kind: str = "zero"
    task: str = "ent"
    epsilon: float | None = None
    inner: "MeasureDescriptor | None" = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        object.__setattr__(self, "direction", normalize_direction(self.direction))
        if self.kind == "capacity" and self.epsilon is None:
            raise ValueError("capacity measures need an epsilon")
        if self.kind == "normalized" and self.inner is None:
            raise ValueError("normalized measures wrap an inner measure")

    @property
    def is_quantum(self) -> bool:
        if self.kind == "normalized":
            return self.inner.is_quantum
        return self.kind in QUANTUM_KINDS


def zero_measure(direction="fwd"):
    return MeasureDescriptor("zero", direction, "zero")


def signalling(direction="fwd"):
    return MeasureDescriptor("signalling", direction, "signalling")


def q_signalling(direction="fwd"):
    return MeasureDescriptor("q_signalling", direction, "q_signalling")


def capacity_measure(task="ent", epsilon=0.3, direction="fwd"):
    """One-shot capacity at fixed eps.

    Positive only for signalling models when eps < 3/4 (ent) or eps < 1/2
    (sub); above that a non-signalling resource already reaches 1 - eps.
    """
    return MeasureDescriptor(f"q_{task}", direction, "capacity", task, epsilon)


def normalized(inner: MeasureDescriptor):
    return MeasureDescriptor(f"{inner.name}_norm", inner.direction, "normalized", inner.task,
                             inner.epsilon, inner)


def build_measure(kind: str, task: str = "ent", epsilon: float = 0.3, direction: str = "fwd",
                  normalize: bool = False) -> MeasureDescriptor:
    base = {
        "zero": lambda: zero_measure(direction),
        "signalling": lambda: signalling(direction),
        "q_signalling": lambda: q_signalling(direction),
        "capacity": lambda: capacity_measure(task, epsilon, direction),
    }
    if kind not in base:
        raise ValueError(f"unknown measure {kind!r}")
    m = base[kind]()
    return normalized(m) if normalize else m


def signalling_measure(W: ProcessMatrix, direction: str = "fwd") -> int:
    return int(can_signal(W, direction)[0])


@dataclass
class QuantumSignal:
    signals: bool
    witness_epsilon: float | None
    conclusive: bool = True

    def to_json(self) -> dict:
        return {"signals": self.signals, "witness_epsilon": self.witness_epsilon,
                "conclusive": self.conclusive}


def quantum_signal(model: HarmonicModel, direction: str = "fwd", eps_grid=None) -> QuantumSignal:
    """Look for an epsilon where the model beats every non-signalling resource.

    Grid points inside the m = 2 window (3(1-p)/4, 3/4) are tried first, then
    the window midpoint, then the rest of the grid.
    """
    direction = normalize_direction(direction)
    p1, p2, _ = model.p
    p = p1 if direction == "fwd" else p2
    d = model.d
    grid = [float(e) for e in (cap.default_grid() if eps_grid is None else eps_grid)]
    candidates = []
    if p > 0 and d >= 2:
        lo, hi = 0.75 * (1 - p), 0.75
        candidates += [e for e in grid if lo < e < hi]
        candidates.append((lo + hi) / 2)
    candidates += grid
    for eps in candidates:
        if cap.q_ent_value(p, d, eps) > cap.q_ent_nonsignalling_baseline(d, eps):
            return QuantumSignal(True, eps)
    return QuantumSignal(False, None)


def quantum_signal_sampled(W: ProcessMatrix, direction: str = "fwd", n_samples: int = 32,
                           seed: int = 0) -> QuantumSignal:
    """Sampled witness search for correlations without a closed form.

    A protocol reaching fidelity F > 1/m^2 at m >= 2 is a witness at
    epsilon = 1 - F. Failing to find one is reported as inconclusive.
    """
    direction = normalize_direction(direction)
    Wd = W.swap_parties() if direction == "bwd" else W
    a1, a2, b1, b2 = Wd.dims
    for m in range(2, min(a2, b1) + 1):
        best = max(ent_fidelity(Wd, canonical_protocol(Wd, m)),
                   sampled_max_fidelity(Wd, m, n_samples, seed))
        if best > 1 / m ** 2 + 1e-9:
            return QuantumSignal(True, 1 - best)
    return QuantumSignal(False, None, conclusive=False)


def _require_harmonic(model, measure):
    if not isinstance(model, HarmonicModel):
        raise InapplicableMeasure(f"{measure.name} needs a harmonic clean model")


def evaluate(measure: MeasureDescriptor, model) -> float:
    """Value of ``measure`` on a harmonic model or a process matrix."""
    kind = measure.kind
    if kind == "zero":
        return 0.0
    if kind == "signalling":
        W = reduce(model) if isinstance(model, HarmonicModel) else model
        return float(signalling_measure(W, measure.direction))
    if kind == "q_signalling":
        if isinstance(model, HarmonicModel):
            return float(quantum_signal(model, measure.direction).signals)
        return float(quantum_signal_sampled(model, measure.direction).signals)
    if kind == "capacity":
        _require_harmonic(model, measure)
        query = cap.CapacityQuery(measure.task, measure.direction, measure.epsilon,
                                  cap.ModelSummary.of(model))
        return cap.capacity(query)
    inner = evaluate(measure.inner, model)
    if measure.inner.kind == "capacity":
        d = model.d if isinstance(model, HarmonicModel) else model.dim("a2")
        return cap.normalize_capacity(inner, d, measure.task)
    # zero and indicator measures already have supremum 0 or 1
    return inner


def nonconvexity_demo() -> dict:
    """Mixing a signalling and a non-signalling channel: average 1/2 vs value 1."""
    d = 2
    zero = np.zeros((d, d))
    zero[0, 0] = 1
    g1 = channel_process_matrix(identity_choi(d), zero)
    g2 = state_process_matrix(np.kron(zero, zero), d, d)
    mix = 0.5 * g1 + 0.5 * g2
    lhs = 0.5 * signalling_measure(g1) + 0.5 * signalling_measure(g2)
    rhs = signalling_measure(mix)
    return {"average_of_values": lhs, "value_of_average": float(rhs), "convex": lhs >= rhs}


@dataclass
class AxiomReport:
    measure: str
    n_models: int
    n_ops: int
    monotone_violations: int = 0
    worst_delta: float = -math.inf
    nonneg_ok: bool = True
    axiom3_ok: bool = True
    unitary_ok: bool = True
    normalized_range_ok: bool | None = None
    level: str = "measure"
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.monotone_violations == 0 and self.nonneg_ok and self.axiom3_ok
                and self.unitary_ok and self.normalized_range_ok is not False)

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "n_models": self.n_models,
            "n_ops": self.n_ops,
            "monotone_violations": self.monotone_violations,
            "worst_delta": None if math.isinf(self.worst_delta) else float(self.worst_delta),
            "nonneg_ok": self.nonneg_ok,
            "axiom3_ok": self.axiom3_ok,
            "unitary_ok": self.unitary_ok,
            "normalized_range_ok": self.normalized_range_ok,
            "level": self.level,
            "passed": self.passed,
        }


def sample_family(n_models: int, seed: int, dims=(2, 3)) -> list[HarmonicModel]:
    """Harmonic models with random |alpha|, phases, dimension and preset; p_i in {0} or [0.05, 1]."""
    models = []
    for i in range(n_models):
        rng = substream(seed, i)
        p = rng.dirichlet(np.ones(3))
        p[p < 0.05] = 0
        if i % 5 == 0:
            p = np.eye(3)[i % 3]
        p = p / p.sum()
        phases = np.exp(2j * np.pi * rng.uniform(size=3))
        d = int(dims[i % len(dims)])
        kind = "mixed_b1" if i % 2 else "product"
        models.append(HarmonicModel.from_preset(tuple(np.sqrt(p) * phases), d, kind))
    return models


def _local_op(seed: int, j: int, W: ProcessMatrix):
    rng = substream(seed, 10_000 + j)
    party = "A" if rng.uniform() < 0.5 else "B"
    d_in, d_out = (W.dim("a1"), W.dim("a2")) if party == "A" else (W.dim("b1"), W.dim("b2"))
    rank_in, rank_out = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    return party, random_channel_choi(rng, d_in, d_in, rank_in), random_channel_choi(rng, d_out, d_out, rank_out)


def axiom_suite(measure: MeasureDescriptor, family=None, n_ops: int = 50, seed: int = 0,
                tol: float = 1e-9) -> AxiomReport:
    """Check Axioms 1-3 and local-unitary invariance on sampled models and channels.

    Capacity measures leave the closed-form family once degraded, so their
    monotonicity is checked at the fidelity level: no protocol on a degraded
    model may beat the optimal fidelity of the original.
    """
    family = sample_family(20, seed) if family is None else list(family)
    report = AxiomReport(measure.name, len(family), n_ops)
    capacity_like = measure.kind == "capacity" or (measure.kind == "normalized"
                                                   and measure.inner.kind == "capacity")
    report.level = "fidelity" if capacity_like else "measure"
    if measure.kind == "normalized":
        report.normalized_range_ok = True
    direction = measure.direction

    for mi, model in enumerate(family):
        W = reduce(model)
        value = evaluate(measure, model)
        if value < 0:
            report.nonneg_ok = False
        if report.normalized_range_ok is not None and not (0 <= value <= 1):
            report.normalized_range_ok = False
        if value > 0:
            classical = can_signal(W, direction)[0]
            quantum = quantum_signal(model, direction).signals
            if not classical or (measure.is_quantum and not quantum):
                report.axiom3_ok = False

        p = model.p[0] if direction == "fwd" else model.p[1]
        for j in range(n_ops):
            party, c_in, c_out = _local_op(seed + mi, j, W)
            Wd = degrade(W, party, c_in, c_out)
            if capacity_like:
                for m in range(2, model.d + 1):
                    best = ent_fidelity(Wd, canonical_protocol(Wd, m, direction), direction)
                    best = max(best, ent_fidelity(Wd, mixed_protocol(seed + j, Wd, m, direction, mi), direction))
                    delta = best - cap.f_ent(p, m)
                    report.worst_delta = max(report.worst_delta, delta)
                    if delta > tol:
                        report.monotone_violations += 1
            elif measure.kind in ("signalling", "zero") or (
                    measure.kind == "normalized" and measure.inner.kind in ("signalling", "zero")):
                delta = evaluate(measure, Wd) - value
                report.worst_delta = max(report.worst_delta, delta)
                if delta > tol:
                    report.monotone_violations += 1
            else:
                # quantum signalling: a degraded model may only witness if the original does
                if value == 0:
                    witness = quantum_signal_sampled(Wd, direction, n_samples=4, seed=seed + j).signals
                    report.worst_delta = max(report.worst_delta, float(witness))
                    if witness:
                        report.monotone_violations += 1
                else:
                    report.worst_delta = max(report.worst_delta, 0.0)

        rng = substream(seed, 20_000 + mi)
        d = model.d
        us = [haar_unitary(rng, d) for _ in range(4)]
        Wu = local_unitary(local_unitary(W, "A", us[0], us[1]), "B", us[2], us[3])
        if capacity_like:
            back = local_unitary(local_unitary(Wu, "A", us[0].conj().T, us[1].conj().T),
                                 "B", us[2].conj().T, us[3].conj().T)
            for m in range(1, d + 1):
                f = ent_fidelity(back, canonical_protocol(back, m, direction), direction)
                if abs(f - cap.f_ent(p, m)) > tol:
                    report.unitary_ok = False
        elif measure.kind != "q_signalling":
            if evaluate(measure, Wu) != evaluate(measure, W):
                report.unitary_ok = False

    if math.isinf(report.worst_delta):
        report.worst_delta = 0.0
    return report


__all__ = [
    "MeasureDescriptor", "AxiomReport", "QuantumSignal", "InapplicableMeasure", "build_measure",
    "zero_measure", "signalling", "q_signalling", "capacity_measure", "normalized",
    "signalling_measure", "quantum_signal", "quantum_signal_sampled", "evaluate",
    "nonconvexity_demo", "axiom_suite", "sample_family",
]
