"""Causality measures for bipartite process matrices.

Process matrices, harmonic clean models with their closed-form one-shot
capacities, a protocol-simulation oracle, capacity-based reconstruction and
axiom checks for causality measures.
"""
from __future__ import annotations

from .capacity import CapacityQuery, ModelSummary, f_ent, f_min, q_ent, q_sub
from .harmonic import HarmonicModel, build_global, reduce
from .measures import AxiomReport, MeasureDescriptor, axiom_suite, evaluate, quantum_signal
from .oracle import Protocol, canonical_protocol, ent_fidelity, oracle_report
from .process import ProcessMatrix, can_signal, contract, degrade, joint_probability, validate
from .reconstruct import CapacityProfile, HarmonicReconstructor, ReconstructionResult, recover

__version__ = "0.1.0"

__all__ = [
    "CapacityQuery", "ModelSummary", "f_ent", "f_min", "q_ent", "q_sub",
    "HarmonicModel", "build_global", "reduce",
    "AxiomReport", "MeasureDescriptor", "axiom_suite", "evaluate", "quantum_signal",
    "Protocol", "canonical_protocol", "ent_fidelity", "oracle_report",
    "ProcessMatrix", "can_signal", "contract", "degrade", "joint_probability", "validate",
    "CapacityProfile", "HarmonicReconstructor", "ReconstructionResult", "recover",
]
