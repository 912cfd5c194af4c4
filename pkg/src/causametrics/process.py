"""Bipartite process matrices: validity, the generalized Born rule, and signalling.

A process matrix lives on ``a1 (x) a2 (x) b1 (x) b2`` in that order. Discarded
output systems are represented by the unnormalized identity, so a valid
process matrix has trace ``|a2| |b2|`` and the identity channel from a2 to b1
enters as its unnormalized Choi operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .tensor import (
    Factorization,
    as_matrix,
    channel_directions,
    is_cptp,
    is_hermitian,
    is_psd,
    link,
    matrix_from_json,
    matrix_to_json,
    min_eigenvalue,
    permute,
    projector,
    identity_vector,
)

PARTY_SYSTEMS = {"A": ("a1", "a2"), "B": ("b1", "b2")}
ORDER = ("a1", "a2", "b1", "b2")
DIRECTIONS = ("fwd", "bwd")

_DIRECTION_ALIASES = {
    "fwd": "fwd", "forward": "fwd", "A->B": "fwd", "AB": "fwd",
    "bwd": "bwd", "backward": "bwd", "B->A": "bwd", "BA": "bwd",
}


class InvalidProcessMatrix(ValueError):
    pass


def normalize_direction(direction: str) -> str:
    try:
        return _DIRECTION_ALIASES[direction]
    except KeyError:
        raise ValueError(f"unknown direction {direction!r}; use 'fwd' or 'bwd'") from None


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    matrix: np.ndarray
    dims: tuple[int, int, int, int]

    def __post_init__(self):
        M = as_matrix(self.matrix)
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != 4 or min(dims) < 1:
            raise ValueError(f"need four positive dimensions (a1, a2, b1, b2), got {self.dims}")
        if M.shape != (int(np.prod(dims)),) * 2:
            raise ValueError(f"matrix shape {M.shape} does not match systems {dims}")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "dims", dims)

    @property
    def systems(self) -> Factorization:
        return Factorization(zip(ORDER, self.dims))

    def dim(self, label: str) -> int:
        return self.dims[ORDER.index(label)]

    def swap_parties(self) -> "ProcessMatrix":
        """Relabel A <-> B, so that B->A questions become A->B ones."""
        f = self.systems
        M = permute(self.matrix, f, ("b1", "b2", "a1", "a2"))
        a1, a2, b1, b2 = self.dims
        return ProcessMatrix(M, (b1, b2, a1, a2))

    def __add__(self, other: "ProcessMatrix") -> "ProcessMatrix":
        if self.dims != other.dims:
            raise ValueError("dimension mismatch")
        return ProcessMatrix(self.matrix + other.matrix, self.dims)

    def __mul__(self, scalar) -> "ProcessMatrix":
        return ProcessMatrix(self.matrix * scalar, self.dims)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "systems": [{"label": l, "dim": d} for l, d in zip(ORDER, self.dims)],
            "matrix": matrix_to_json(self.matrix),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ProcessMatrix":
        systems = obj["systems"]
        labels = [s["label"] for s in systems]
        if labels != list(ORDER):
            raise ValueError(f"systems must be ordered {list(ORDER)}, got {labels}")
        return cls(matrix_from_json(obj["matrix"]), tuple(int(s["dim"]) for s in systems))


def from_factors(factors: Sequence[tuple[str, np.ndarray, Sequence[tuple[str, int]]]]) -> ProcessMatrix:
    """Assemble a process matrix from a tensor product of labeled operators.

    ``factors`` holds ``(name, operator, [(label, dim), ...])``; the labels
    over all factors must be exactly a1, a2, b1, b2 in any order.
    """
    M = np.ones((1, 1), dtype=np.complex128)
    systems = []
    for _, op, labels in factors:
        M = np.kron(M, as_matrix(op))
        systems.extend(labels)
    f = Factorization(systems)
    M = permute(M, f, ORDER)
    return ProcessMatrix(M, tuple(f.dim(l) for l in ORDER))


def channel_process_matrix(channel_choi, rho_a1, d_b2: int | None = None) -> ProcessMatrix:
    """rho^{a1} (x) C^{a2 b1} (x) 1^{b2}: A's output reaches B through a channel."""
    rho_a1 = as_matrix(rho_a1)
    d1 = rho_a1.shape[0]
    C = as_matrix(channel_choi)
    d2 = d3 = int(round(np.sqrt(C.shape[0])))
    if d2 * d3 != C.shape[0]:
        raise ValueError("channel Choi must be square in equal input/output dimensions")
    return from_factors([
        ("rho", rho_a1, [("a1", d1)]),
        ("channel", C, [("a2", d2), ("b1", d3)]),
        ("discard", np.eye(d_b2 or d3), [("b2", d_b2 or d3)]),
    ])


def state_process_matrix(rho_a1b1, d_a2: int, d_b2: int, d_a1: int | None = None) -> ProcessMatrix:
    """A static shared state on a1 b1 with both outputs discarded."""
    rho = as_matrix(rho_a1b1)
    if d_a1 is None:
        d_a1 = int(round(np.sqrt(rho.shape[0])))
    d_b1 = rho.shape[0] // d_a1
    return from_factors([
        ("state", rho, [("a1", d_a1), ("b1", d_b1)]),
        ("discard_a", np.eye(d_a2), [("a2", d_a2)]),
        ("discard_b", np.eye(d_b2), [("b2", d_b2)]),
    ])


def identity_choi(d: int) -> np.ndarray:
    return projector(identity_vector(d))


def depolarizing_choi(d_in: int, d_out: int) -> np.ndarray:
    """Completely depolarizing channel: every input goes to the maximally mixed state."""
    return np.eye(d_in * d_out, dtype=np.complex128) / d_out


@dataclass(frozen=True, eq=False)
class InstrumentElement:
    choi: np.ndarray
    party: str

    def __post_init__(self):
        if self.party not in PARTY_SYSTEMS:
            raise ValueError(f"party must be 'A' or 'B', got {self.party!r}")
        object.__setattr__(self, "choi", as_matrix(self.choi))


@dataclass(frozen=True, eq=False)
class Instrument:
    elements: tuple[InstrumentElement, ...]
    d_in: int
    d_out: int

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise ValueError("an instrument needs at least one element")
        if len({e.party for e in elements}) != 1:
            raise ValueError("instrument elements must belong to one party")
        total = sum(e.choi for e in elements)
        if not is_cptp(total, self.d_in, self.d_out):
            raise ValueError("instrument elements do not sum to a CPTP map")
        object.__setattr__(self, "elements", elements)

    @property
    def party(self) -> str:
        return self.elements[0].party


def measure_prepare_instrument(povm, prepared, party: str) -> Instrument:
    """Measure the input with ``povm`` and emit ``prepared`` on the output."""
    prepared = as_matrix(prepared)
    povm = [as_matrix(E) for E in povm]
    elements = tuple(InstrumentElement(np.kron(E.T, prepared), party) for E in povm)
    return Instrument(elements, povm[0].shape[0], prepared.shape[0])


def joint_probability(W: ProcessMatrix, mA: InstrumentElement, mB: InstrumentElement,
                      tol: float = 1e-9) -> float:
    """Generalized Born rule Tr[(mA (x) mB)^T W]."""
    if mA.party != "A" or mB.party != "B":
        raise ValueError("need one element for A and one for B")
    a1, a2, b1, b2 = W.dims
    if mA.choi.shape != (a1 * a2,) * 2 or mB.choi.shape != (b1 * b2,) * 2:
        raise ValueError("instrument element dimensions do not match the process matrix")
    M = W.matrix.reshape(a1 * a2, b1 * b2, a1 * a2, b1 * b2)
    p = np.einsum("ac,bd,abcd->", mA.choi, mB.choi, M)
    if abs(p.imag) > tol or not (-tol <= p.real <= 1 + tol):
        raise InvalidProcessMatrix(f"probability {p} outside [0, 1]: invalid W or instrument")
    return float(np.clip(p.real, 0.0, 1.0))


def _bilinear_form(W: ProcessMatrix) -> np.ndarray:
    """Matrix G with p = vec(C_A) . G . vec(C_B) for the Born rule."""
    a1, a2, b1, b2 = W.dims
    nA, nB = a1 * a2, b1 * b2
    M = W.matrix.reshape(nA, nB, nA, nB).transpose(0, 2, 1, 3)
    return M.reshape(nA * nA, nB * nB)


@dataclass
class ValidityReport:
    psd: bool
    trace_ok: bool
    normalized: bool
    residuals: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.psd and self.trace_ok and self.normalized

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "psd": self.psd,
            "trace_ok": self.trace_ok,
            "normalized": self.normalized,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }


def validate(W: ProcessMatrix, tol: float = 1e-9) -> ValidityReport:
    """Check positivity, trace and normalization of the Born rule.

    Probabilities are bi-affine in the two local Choi operators, so it is
    enough that p = 1 at (depolarizing, depolarizing) and that every
    first-order and mixed term along the CPTP direction spaces vanishes.
    """
    a1, a2, b1, b2 = W.dims
    M = W.matrix
    hermitian = is_hermitian(M, tol)
    lam = min_eigenvalue(M, tol) if hermitian else float("nan")
    psd = hermitian and lam >= -tol * max(1.0, float(np.abs(M).max()))
    trace = np.trace(M)
    trace_res = abs(trace - a2 * b2)
    trace_ok = bool(trace_res <= tol * a2 * b2)

    rows_A = [np.eye(a1 * a2) / a2] + channel_directions(a1, a2)
    rows_B = [np.eye(b1 * b2) / b2] + channel_directions(b1, b2)
    VA = np.array([R.reshape(-1) for R in rows_A])
    VB = np.array([R.reshape(-1) for R in rows_B])
    P = VA @ _bilinear_form(W) @ VB.T
    base_res = abs(P[0, 0] - 1)
    P[0, 0] = 0
    direction_res = float(np.abs(P).max())
    normalized = bool(base_res <= tol and direction_res <= tol)
    return ValidityReport(
        psd=bool(psd),
        trace_ok=trace_ok,
        normalized=normalized,
        residuals={
            "min_eigenvalue": lam,
            "trace": float(trace_res),
            "base_probability": float(base_res),
            "direction": direction_res,
        },
    )


def _signalling_map(W: ProcessMatrix, direction: str) -> tuple[np.ndarray, list[np.ndarray], int]:
    direction = normalize_direction(direction)
    if direction == "bwd":
        W = W.swap_parties()
    a1, a2, b1, b2 = W.dims
    nA, nB = a1 * a2, b1 * b2
    # R(Delta) = Tr_A[(Delta^T (x) I) W]  ->  R_{bb'} = sum Delta_{aa'} W_{(a b),(a' b')}
    L = W.matrix.reshape(nA, nB, nA, nB).transpose(1, 3, 0, 2).reshape(nB * nB, nA * nA)
    return L, channel_directions(a1, a2), nB


def can_signal(W: ProcessMatrix, direction: str = "fwd", tol: float = 1e-9) -> tuple[bool, float]:
    """Whether the sender's choice of operation changes the receiver's statistics.

    Returns ``(signals, residual)`` where residual is the largest operator norm
    of the receiver-side response over a unit-norm basis of CPTP directions.
    The threshold is ``tol`` times the operator norm of W.
    """
    L, basis, nB = _signalling_map(W, direction)
    if not basis:
        return False, 0.0
    D = np.array([B.reshape(-1) for B in basis]).T
    R = (L @ D).T.reshape(len(basis), nB, nB)
    residual = float(max(np.linalg.norm(r, 2) for r in R))
    scale = max(1.0, float(np.linalg.norm(W.matrix, 2)))
    return residual > tol * scale, residual


def signalling_spectrum(W: ProcessMatrix, direction: str = "fwd") -> np.ndarray:
    """Singular values of the signalling map restricted to CPTP directions.

    Basis independent, hence invariant under local unitaries of either party.
    """
    L, basis, _ = _signalling_map(W, direction)
    if not basis:
        return np.zeros(0)
    D = np.array([B.reshape(-1) for B in basis]).T
    return np.linalg.svd(L @ D, compute_uv=False)


def degrade(W: ProcessMatrix, party: str, in_choi=None, out_choi=None) -> ProcessMatrix:
    """Absorb local channels into W.

    ``in_choi`` acts on the party's input before its operation, ``out_choi``
    on its output afterwards. Any instrument applied to the result behaves
    like the composed instrument applied to W.
    """
    in_label, out_label = PARTY_SYSTEMS[party]
    M, f = W.matrix, W.systems
    if in_choi is not None:
        d = f.dim(in_label)
        M, f = link(M, f, in_choi, Factorization([(in_label, d), ("_in", d)]))
        f = f.relabel({"_in": in_label})
    if out_choi is not None:
        d = f.dim(out_label)
        M, f = link(M, f, out_choi, Factorization([("_out", d), (out_label, d)]))
        f = f.relabel({"_out": out_label})
    M = permute(M, f, ORDER)
    return ProcessMatrix(M, W.dims)


def local_unitary(W: ProcessMatrix, party: str, u_in, u_out) -> ProcessMatrix:
    def unitary_choi(U):
        U = as_matrix(U)
        return np.outer(U.T.reshape(-1), U.T.reshape(-1).conj())

    return degrade(W, party, unitary_choi(u_in), unitary_choi(u_out))


def contract(W: ProcessMatrix, enc_choi, enc_dims, dec_choi, dec_dims, held,
             held_dims: tuple[int, int], normalize: bool = True) -> np.ndarray:
    """Insert local operations into W and return the joint output state.

    ``held`` is a state on M (x) M'. The sender's operation is a channel
    M' (x) a1 -> a2 (x) K_A with ``enc_dims = (d_K_A,)`` and the receiver's
    a channel b1 -> b2 (x) K_B with ``dec_dims = (d_K_B,)``. The result is a
    state on M (x) K_A (x) K_B.
    """
    a1, a2, b1, b2 = W.dims
    dM, dMp = held_dims
    (dKA,), (dKB,) = tuple(enc_dims), tuple(dec_dims)
    f_held = Factorization([("M", dM), ("Mp", dMp)])
    f_enc = Factorization([("Mp", dMp), ("a1", a1), ("a2", a2), ("KA", dKA)])
    f_dec = Factorization([("b1", b1), ("b2", b2), ("KB", dKB)])
    X, fX = link(held, f_held, enc_choi, f_enc)
    Y, fY = link(dec_choi, f_dec, W.matrix, W.systems)
    out, f_out = link(X, fX, Y, fY)
    out = permute(out, f_out, ("M", "KA", "KB"))
    if normalize:
        tr = np.trace(out).real
        if tr <= 0:
            raise InvalidProcessMatrix("contraction produced a non-positive trace")
        out = out / tr
    return out
