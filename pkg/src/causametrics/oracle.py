"""Brute-force protocol simulation for the one-shot transmission tasks.

Encoders and decoders are inserted into a process matrix with
:func:`causametrics.process.contract` and scored by fidelity. The canonical
protocol is the optimal one for harmonic clean models; random protocols
probe the closed-form optimum from below.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import capacity
from .harmonic import HarmonicModel, reduce
from .process import (
    ProcessMatrix,
    can_signal,
    channel_process_matrix,
    contract,
    normalize_direction,
)
from .sampling import (
    parallel_map,
    random_channel_choi,
    random_density,
    random_pure_state,
    substream,
)
from .tensor import (
    Factorization,
    choi,
    fidelity_pure,
    is_cptp,
    link,
    max_entangled,
    permute,
    projector,
)


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Protocol:
    """Encoder Choi on (M', in_s, out_s) and decoder Choi on (in_r, out_r, M')."""

    m: int
    encoder: np.ndarray
    decoder: np.ndarray
    sender_dims: tuple[int, int]
    receiver_dims: tuple[int, int]
    post_op: np.ndarray | None = None

    def __post_init__(self):
        m = self.m
        s_in, s_out = self.sender_dims
        r_in, r_out = self.receiver_dims
        if not is_cptp(self.encoder, m * s_in, s_out):
            raise ValueError("encoder is not CPTP")
        if not is_cptp(self.decoder, r_in, r_out * m):
            raise ValueError("decoder is not CPTP")
        if self.post_op is not None and not is_cptp(self.post_op, m, m):
            raise ValueError("post-operation is not CPTP")

    def with_post_op(self, post_op) -> "Protocol":
        return Protocol(self.m, self.encoder, self.decoder, self.sender_dims, self.receiver_dims, post_op)

    def with_decoder(self, decoder) -> "Protocol":
        return Protocol(self.m, self.encoder, decoder, self.sender_dims, self.receiver_dims, self.post_op)


def _oriented(resource, direction: str) -> ProcessMatrix:
    W = reduce(resource) if isinstance(resource, HarmonicModel) else resource
    return W.swap_parties() if normalize_direction(direction) == "bwd" else W


def _dims(resource, direction: str) -> tuple[tuple[int, int], tuple[int, int]]:
    if isinstance(resource, HarmonicModel):
        return (resource.d,) * 2, (resource.d,) * 2
    a1, a2, b1, b2 = _oriented(resource, direction).dims
    return (a1, a2), (b1, b2)


def canonical_protocol(resource, m: int, direction: str = "fwd") -> Protocol:
    """Embed M' into the sender's output and read the code space at the receiver's input.

    The sender discards its input. The receiver emits |0> on its output and
    maps anything outside the code space to the maximally mixed state on M'.
    """
    (s_in, s_out), (r_in, r_out) = _dims(resource, direction)
    if m > s_out or m > r_in:
        raise ValueError(f"code dimension {m} exceeds the available systems")
    embed = np.eye(s_out, m, dtype=np.complex128)
    v = embed.T.reshape(-1)
    enc = np.kron(np.outer(v, v.conj()), np.eye(s_in))
    enc = permute(enc, Factorization([("Mp", m), ("out", s_out), ("in", s_in)]), ("Mp", "in", "out"))

    zero = np.zeros((r_out, 1), dtype=np.complex128)
    zero[0, 0] = 1
    kraus = [np.kron(zero, np.eye(m, r_in))]
    for j in range(m, r_in):
        for k in range(m):
            op = np.zeros((m, r_in), dtype=np.complex128)
            op[k, j] = 1 / np.sqrt(m)
            kraus.append(np.kron(zero, op))
    dec = choi(kraus, r_in, r_out * m)
    return Protocol(m, enc, dec, (s_in, s_out), (r_in, r_out))


def random_protocol(seed, resource, m: int, direction: str = "fwd", index: int = 0,
                    post_op: bool = False) -> Protocol:
    """Encoder and decoder from Haar-random isometries; deterministic in (seed, index)."""
    rng = substream(seed, index)
    (s_in, s_out), (r_in, r_out) = _dims(resource, direction)
    enc = random_channel_choi(rng, m * s_in, s_out)
    dec = random_channel_choi(rng, r_in, r_out * m)
    post = random_channel_choi(rng, m, m) if post_op else None
    return Protocol(m, enc, dec, (s_in, s_out), (r_in, r_out), post)


def mixed_protocol(seed, resource, m: int, direction: str = "fwd", index: int = 0) -> Protocol:
    """Convex mixture of the canonical protocol with a Haar-random one.

    The mixing weight is drawn per sample, so these probe fidelities right up
    to the optimum rather than near the Haar average.
    """
    base = canonical_protocol(resource, m, direction)
    rand = random_protocol(seed, resource, m, direction, index)
    lam = substream(seed, index, 1).uniform()
    mu = substream(seed, index, 2).uniform()
    return Protocol(m, lam * base.encoder + (1 - lam) * rand.encoder,
                    mu * base.decoder + (1 - mu) * rand.decoder, base.sender_dims, base.receiver_dims)


def _output_state(W: ProcessMatrix, proto: Protocol, held, held_dims) -> np.ndarray:
    return contract(W, proto.encoder, (1,), proto.decoder, (proto.m,), held, held_dims)


def ent_fidelity(resource, proto: Protocol, direction: str = "fwd") -> float:
    """Entanglement transmission fidelity of one protocol run.

    A post-operation on M (the active task) can push the fidelity above the
    passive optimum p1 + (1 - p1)/m^2: resetting M lifts product outputs to 1/m.
    """
    W = _oriented(resource, direction)
    m = proto.m
    target = max_entangled(m)
    out = _output_state(W, proto, target, (m, m))
    if proto.post_op is not None:
        # post-operation acts on the sender's kept half M
        f = Factorization([("M", m), ("Mp", m)])
        C, fC = proto.post_op, Factorization([("M", m), ("Mo", m)])
        out, fo = link(out, f, C, fC)
        out = permute(out, fo, ("Mo", "Mp"))
    return fidelity_pure(target, out)


def output_state(resource, proto: Protocol, psi, direction: str = "fwd") -> np.ndarray:
    """Receiver's state for a pure input ``psi`` on the code space."""
    W = _oriented(resource, direction)
    return _output_state(W, proto, projector(psi), (1, proto.m))


def min_output_fidelity(resource, proto: Protocol, n_states: int = 100, seed: int = 0,
                        direction: str = "fwd") -> float:
    """Minimum of <psi|Psi(E,D)|psi> over sampled pure inputs.

    The uniform superposition is always included. A sampled minimum is an
    upper bound on the true minimum over all inputs.
    """
    m = proto.m
    states = [np.ones(m, dtype=np.complex128) / np.sqrt(m)]
    states += [random_pure_state(substream(seed, i), m) for i in range(n_states)]
    values = [fidelity_pure(projector(psi), output_state(resource, proto, psi, direction))
              for psi in states]
    return float(min(values))


def output_fidelities(resource, proto: Protocol, n_states: int = 100, seed: int = 0,
                      direction: str = "fwd") -> np.ndarray:
    m = proto.m
    states = [np.ones(m, dtype=np.complex128) / np.sqrt(m)]
    states += [random_pure_state(substream(seed, i), m) for i in range(n_states)]
    return np.array([fidelity_pure(projector(psi), output_state(resource, proto, psi, direction))
                     for psi in states])


def sampled_max_fidelity(resource, m: int, n_samples: int, seed: int, direction: str = "fwd",
                         post_op: bool = False) -> float:
    """Largest entanglement fidelity over ``n_samples`` random protocols (a lower bound on the optimum).

    Even samples are Haar-random protocols, odd samples canonical/Haar mixtures.
    """
    W = _oriented(resource, direction)

    def run(i):
        if i % 2 and not post_op:
            proto = mixed_protocol(seed, W, m, "fwd", i)
        else:
            proto = random_protocol(seed, W, m, "fwd", i, post_op)
        return ent_fidelity(W, proto)

    values = parallel_map(run, range(n_samples))
    return float(max(values)) if values else float("nan")


@dataclass
class OracleReport:
    formula: float
    canonical: float
    sampled_max: float
    n_samples: int
    seed: int
    agrees: bool

    def to_json(self) -> dict:
        return {"formula": self.formula, "canonical": self.canonical, "sampled_max": self.sampled_max,
                "n_samples": self.n_samples, "seed": self.seed, "agrees": self.agrees}


def oracle_report(model: HarmonicModel, m: int, n_samples: int = 200, seed: int = 0,
                  direction: str = "fwd", tol: float = 1e-9) -> OracleReport:
    direction = normalize_direction(direction)
    p = model.p[0] if direction == "fwd" else model.p[1]
    formula = capacity.f_ent(p, m)
    W = reduce(model)
    canonical = ent_fidelity(W, canonical_protocol(W, m, direction), direction)
    sampled = sampled_max_fidelity(W, m, n_samples, seed, direction)
    agrees = abs(canonical - formula) <= tol and sampled <= formula + tol
    return OracleReport(formula, canonical, sampled, n_samples, seed, bool(agrees))


def nonsignalling_fidelity_check(resource: ProcessMatrix, m: int, n_samples: int = 200, seed: int = 0,
                                 direction: str = "fwd") -> float:
    """Best sampled entanglement fidelity through a resource that cannot signal.

    Includes the canonical protocol. Never exceeds 1/m^2 for a non-signalling
    resource.
    """
    signals, _ = can_signal(resource, direction)
    if signals:
        raise PreconditionError("resource signals in the tested direction")
    W = _oriented(resource, direction)
    best = sampled_max_fidelity(W, m, n_samples, seed)
    return max(best, ent_fidelity(W, canonical_protocol(W, m)))


def random_separable_state(rng: np.random.Generator, m: int, n_terms: int = 4) -> np.ndarray:
    weights = rng.dirichlet(np.ones(n_terms))
    return sum(w * np.kron(random_density(rng, m), random_density(rng, m)) for w in weights)


def separable_fidelity(m: int, n_terms: int = 4, seed: int = 0) -> float:
    """Overlap of a random separable state with the maximally entangled state (at most 1/m)."""
    return fidelity_pure(max_entangled(m), random_separable_state(substream(seed), m, n_terms))


def dephasing_choi(d: int) -> np.ndarray:
    """Completely dephasing channel in the computational basis."""
    C = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        C[i * d + i, i * d + i] = 1
    return C


def classical_identity_process(d: int) -> ProcessMatrix:
    """A's output reaches B through the classical identity (dephasing) channel."""
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[0, 0] = 1
    return channel_process_matrix(dephasing_choi(d), rho)


def compose_decoder(proto: Protocol, channel_choi) -> Protocol:
    """Follow the decoder's M' output with an extra channel on M'."""
    r_in, r_out = proto.receiver_dims
    m = proto.m
    f_dec = Factorization([("b1", r_in), ("b2", r_out), ("Mp", m)])
    out, fo = link(proto.decoder, f_dec, channel_choi, Factorization([("Mp", m), ("Mq", m)]))
    out = permute(out, fo, ("b1", "b2", "Mq"))
    return proto.with_decoder(out)


__all__ = [
    "Protocol", "OracleReport", "PreconditionError", "canonical_protocol", "random_protocol",
    "mixed_protocol",
    "ent_fidelity", "output_state", "min_output_fidelity", "output_fidelities",
    "sampled_max_fidelity", "oracle_report", "nonsignalling_fidelity_check",
    "random_separable_state", "separable_fidelity", "dephasing_choi", "classical_identity_process",
    "compose_decoder",
]
